#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pisynth/catalog.hpp"
#include "pisynth/cli/config.hpp"

namespace pisynth::cli {

enum Exit : int { kOk = 0, kFailed = 1, kBadInput = 2, kSynthesisFailed = 3, kRuntimeFailed = 4 };

// Command-line settings that take precedence over the config file.
struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<double> dt, t_end;
  std::optional<Method> method;
  bool timing = false;  // adds wall-clock seconds to the summary (breaks byte identity)
};

// Catalog entry or inline system, synthesized. Throws ConfigError for bad
// input and lets synthesis errors through.
CatalogEntry resolve(const ScenarioConfig& c);

// Applies overrides; output dir falls back to PISYNTH_OUT, then the config, then ".".
ScenarioConfig apply(ScenarioConfig c, const Overrides& o);

struct RunResult {
  int exit_code = kOk;
  nlohmann::json summary;
  std::vector<std::string> files;  // written paths, summary last
};

// Writes <prefix>_<k>.csv per initial condition and <prefix>.json.
RunResult run_scenario(const ScenarioConfig& c, const Overrides& o, std::ostream& err);

// `param` names a design constant or a plant parameter (inline: alpha or a
// system parameter). One run per value, concurrently; <prefix>_sweep.json.
int run_sweep(const ScenarioConfig& c, const std::string& param, const std::vector<double>& values,
              const Overrides& o, std::ostream& err);

void list_catalog(std::ostream& out);
int describe(const std::string& id, std::ostream& out, std::ostream& err);

// Largest deviation of phi and S from phi(0) e^{-rate t} and
// S(0) e^{-2 rate t} over t <= t_max, relative to the initial values.
struct DecayCheck {
  double dev_phi = 0.0, dev_s = 0.0;
  bool pass = false;  // both <= 1e-5 (|phi| <= 1e-9 when phi(0) = 0)
};
DecayCheck decay_check(const Trajectory& tr, double rate, double t_max);

// Shortest round-trip decimal form.
std::string format_number(double v);

// Writes to <path>.tmp and renames.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace pisynth::cli
