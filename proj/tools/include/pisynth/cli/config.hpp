#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pisynth/errors.hpp"
#include "pisynth/expr.hpp"
#include "pisynth/sim.hpp"

namespace pisynth::cli {

inline constexpr const char* kConfigSchema = "pisynth-config/1";
inline constexpr const char* kSummarySchema = "pisynth-summary/1";
inline constexpr const char* kSweepSchema = "pisynth-sweep/1";

// Bad input: exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct InlineSystem {
  std::vector<std::string> states;
  std::vector<std::string> f, g;
  Point params;
  std::string time;
};

// eta' = beta(eta), x = pi(eta); states whose pi entry is a bare eta symbol
// identify eta, every other row contributes x_i - pi_i to the manifold.
struct TargetSpec {
  std::vector<std::string> eta;
  std::vector<std::string> beta;
  std::vector<std::string> pi;
};

struct ScenarioConfig {
  std::string scenario;                 // catalog id; empty for an inline system
  Point design;                         // catalog design overrides
  std::optional<InlineSystem> system;
  std::vector<std::string> manifold;    // inline manifold components
  std::optional<TargetSpec> target;
  double alpha = 0.0;                   // inline rate
  std::vector<std::vector<double>> initial_conditions;  // empty: catalog defaults
  Point plant_params;
  Point controller_params;
  SimOptions sim;
  std::string out_dir;                  // empty: PISYNTH_OUT or "."
  std::string prefix;                   // empty: scenario id or "custom"
  std::size_t stride = 1;               // CSV row decimation
};

ScenarioConfig parse_config(const std::string& yaml_text);
ScenarioConfig load_config(const std::string& path);

// Documented keys, printed by `pisynth run --help-config`.
const char* config_reference();

}  // namespace pisynth::cli
