#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pisynth/compiled.hpp"
#include "pisynth/expr.hpp"
#include "pisynth/manifold.hpp"
#include "pisynth/sysmodel.hpp"

namespace pisynth {

// Numeric closed loop: every parameter already bound.
struct ClosedLoop {
  std::vector<std::string> states;
  std::string time;             // empty when autonomous
  std::vector<Expr> field;
  Expr input;                   // u, recorded only
  std::vector<Expr> outputs;    // manifold components
  Expr phi;                     // combined manifold
  Expr guard = Expr(1.0);
  double guard_tol = 1e-9;
};

// Plant and controller parameters are bound separately, which is how model
// mismatch enters; missing entries fall back to the plant's nominal values.
ClosedLoop make_closed_loop(const ControlAffineSystem& plant, const ControlLaw& law,
                            const ImplicitManifold& m, const Point& plant_params = {},
                            const Point& controller_params = {});

// Plain vector field, no input or manifold.
ClosedLoop make_field(std::vector<std::string> states, std::vector<Expr> field,
                      std::string time = {});

enum class Method { RK4, RK45 };
enum class Termination { Completed, Singularity, DomainError, Divergence };

const char* to_string(Method m);
const char* to_string(Termination t);
std::optional<Method> method_from_string(const std::string& s);

struct SimOptions {
  Method method = Method::RK4;
  double dt = 1e-3;      // RK4 step, initial step for RK45
  double t_end = 20.0;
  double atol = 1e-9;
  double rtol = 1e-8;
  double divergence = 1e9;
  double near_guard = 1e-3;  // blow-ups with |guard| below this count as singular
};

struct Trajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> x;
  std::vector<double> u;
  std::vector<std::vector<double>> outputs;  // per sample, one per component
  std::vector<double> phi;
  std::vector<double> storage;               // phi^2 / 2
  Termination reason = Termination::Completed;
  std::string detail;

  std::size_t size() const { return t.size(); }
  std::vector<double> column(std::size_t state) const;
};

// RK4 on the uniform grid k*dt, or adaptive Dormand-Prince recording every
// accepted step. Singularity: |guard| < guard_tol or a sign change of the
// guard between samples, or a blow-up while |guard| <= near_guard.
// Divergence: non-finite state or |x_i| > divergence.
Trajectory integrate(const ClosedLoop& cl, const std::vector<double>& x0, const SimOptions& opt = {});

// ---------------------------------------------------------------------------
// trajectory analysis

struct ExponentialFit {
  double rate = 0.0;       // series ~ amplitude * exp(-rate t)
  double amplitude = 0.0;
  double max_log_residual = 0.0;
  std::size_t samples = 0;
};

// Least squares on log|series| over samples with |series| > floor (at least 10).
ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& series,
                               double t_max = INFINITY, double floor = 1e-12);

// First time after which err stays <= tol; empty if it never settles.
std::optional<double> settling_time(const std::vector<double>& t, const std::vector<double>& err,
                                    double tol);

// Euclidean distance to a point, or norm of a coordinate map evaluated on x.
std::vector<double> distance_series(const Trajectory& tr, const std::vector<double>& target);
std::vector<double> map_norm_series(const Trajectory& tr, const std::vector<Expr>& map,
                                    const std::vector<std::string>& states,
                                    const std::string& time = {});

struct Orbit {
  bool found = false;
  double period = 0.0;
  double amplitude = 0.0;
  double drift = 0.0;  // worst relative amplitude change per period
  std::size_t cycles = 0;
};

// Upward crossings of the window mean after discarding the transient.
// Fewer than three full cycles, a vanishing amplitude or a decaying envelope
// count as no orbit.
Orbit detect_orbit(const std::vector<double>& t, const std::vector<double>& series,
                   double transient = 0.3);

}  // namespace pisynth
