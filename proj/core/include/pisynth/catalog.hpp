#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pisynth/expr.hpp"
#include "pisynth/manifold.hpp"
#include "pisynth/psf.hpp"
#include "pisynth/sampling.hpp"
#include "pisynth/sim.hpp"
#include "pisynth/sysmodel.hpp"

namespace pisynth {

enum class Behavior { GesToOrigin, GasToOrigin, ZetaDecay, Tracking, PeriodicOrbit, KnownSingularity };
const char* to_string(Behavior b);

struct LawVariant {
  std::string name;
  Expr u;
  std::string note;
};

struct CatalogEntry {
  std::string id;
  std::string summary;
  ControlAffineSystem system;
  Point design;                 // rates and other design constants used to build the entry
  ImplicitManifold manifold;
  ControlLaw law;               // synthesized
  std::optional<Expr> reference;   // must match law pointwise
  std::vector<LawVariant> variants;  // reported only
  std::vector<std::vector<double>> initial_conditions;
  Behavior behavior = Behavior::GasToOrigin;
  std::vector<double> equilibrium;  // x*
  std::vector<Expr> zeta;           // coordinates for zeta-decay entries
  Expr tracking_error;              // tracking entries
  std::map<std::string, std::pair<double, double>> ranges;  // sampling boxes
  std::optional<PsfSystem> psf;
  std::optional<PsfSynthesis> psf_synthesis;
  std::optional<TargetDynamics> target;
  std::vector<Point> controller_variants;  // robustness sets for the controller parameters
  bool slow_zero_dynamics = false;  // zero dynamics converge polynomially, not exponentially
  double t_end = 20.0;
};

std::vector<std::string> catalog_ids();

// Tunable design constants with their defaults; throws UnknownId.
Point catalog_design(const std::string& id);

// Throws UnknownId; design overrides must name existing design constants.
CatalogEntry catalog_get(const std::string& id, const Point& design_overrides = {});

// x1' = x2 + x3^2 + x2 u, x2' = x3 - x3^2 u, x3' = u: upper-triangular with
// the input in every row.
ControlAffineSystem upper_triangular_example();

// Points inside the entry's sampling box (time included), nominal parameters
// bound, away from the law's guard.
std::vector<Point> sample_domain(const CatalogEntry& e, std::size_t n, std::uint64_t seed,
                                 double guard_margin = 1e-3);

// Synthesized law against another law over sample_domain.
PointwiseDiff compare_law(const CatalogEntry& e, const Expr& u, std::size_t n = 1000,
                          std::uint64_t seed = 42);

// The quantity the entry's behaviour drives to zero: distance to the
// equilibrium, norm of zeta, or the tracking error (absolute value).
std::vector<double> error_series(const CatalogEntry& e, const Trajectory& tr,
                                 const Point& plant_params = {});

}  // namespace pisynth
