#include "pisynth/sim.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace pisynth {

namespace odeint = boost::numeric::odeint;

ClosedLoop make_closed_loop(const ControlAffineSystem& plant, const ControlLaw& law,
                            const ImplicitManifold& m, const Point& plant_params,
                            const Point& controller_params) {
  Point pp = plant.params, cp = plant.params;
  for (const auto& [k, v] : plant_params) pp[k] = v;
  for (const auto& [k, v] : controller_params) cp[k] = v;
  const auto bound_plant = bind_params(plant, pp);
  ControlLaw bound_law = law;
  bound_law.u = bind_values(law.u, cp);
  bound_law.guard = bind_values(law.guard, cp);

  ClosedLoop cl;
  cl.states = plant.states;
  cl.time = plant.time;
  cl.field = closed_loop(bound_plant, bound_law);
  cl.input = bound_law.u;
  for (const auto& c : m.components) cl.outputs.push_back(bind_values(c, cp));
  cl.phi = bind_values(combine(m), cp);
  cl.guard = bound_law.guard;
  return cl;
}

ClosedLoop make_field(std::vector<std::string> states, std::vector<Expr> field, std::string time) {
  ClosedLoop cl;
  cl.states = std::move(states);
  cl.field = std::move(field);
  cl.time = std::move(time);
  cl.input = Expr(0.0);
  cl.phi = Expr(0.0);
  return cl;
}

const char* to_string(Method m) { return m == Method::RK4 ? "rk4" : "rk45"; }

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::Singularity: return "singularity";
    case Termination::DomainError: return "domain-error";
    case Termination::Divergence: return "divergence";
  }
  return "?";
}

std::optional<Method> method_from_string(const std::string& s) {
  if (s == "rk4") return Method::RK4;
  if (s == "rk45" || s == "adaptive") return Method::RK45;
  return std::nullopt;
}

std::vector<double> Trajectory::column(std::size_t state) const {
  std::vector<double> c;
  c.reserve(x.size());
  for (const auto& row : x) c.push_back(row[state]);
  return c;
}

namespace {

using State = std::vector<double>;

class Runner {
 public:
  Runner(const ClosedLoop& cl, const SimOptions& opt) : cl_(cl), opt_(opt) {
    slots_ = cl.states;
    if (!cl.time.empty()) slots_.push_back(cl.time);
    n_ = cl.states.size();
    field_ = CompiledVector(cl.field, slots_);
    input_ = Compiled(cl.input, slots_);
    outputs_ = CompiledVector(cl.outputs, slots_);
    phi_ = Compiled(cl.phi, slots_);
    guard_ = Compiled(cl.guard, slots_);
    buf_.resize(slots_.size());
  }

  void rhs(const State& x, State& dx, double t) {
    std::copy(x.begin(), x.end(), buf_.begin());
    if (!cl_.time.empty()) buf_[n_] = t;
    dx.resize(n_);
    field_(buf_, dx);
  }

  // true when the run may continue
  // A blow-up while the guard is already close to zero is the law's
  // singularity showing through before the guard itself reaches zero.
  void blow_up(Trajectory& tr, const std::string& what) const {
    if (have_guard_ && !cl_.guard.is_const() && std::abs(last_guard_) <= opt_.near_guard) {
      tr.reason = Termination::Singularity;
      tr.detail = what + ", law guard at " + std::to_string(last_guard_);
    } else {
      tr.reason = Termination::Divergence;
      tr.detail = what;
    }
  }

  bool record(Trajectory& tr, const State& x, double t) {
    for (double v : x)
      if (!std::isfinite(v) || std::abs(v) > opt_.divergence) {
        blow_up(tr, "state left the bounded region at t=" + std::to_string(t));
        return false;
      }
    std::copy(x.begin(), x.end(), buf_.begin());
    if (!cl_.time.empty()) buf_[n_] = t;
    double g, u, p;
    std::vector<double> outs(outputs_.size());
    try {
      g = guard_(buf_);
      if (!(std::abs(g) >= cl_.guard_tol) || (have_guard_ && g * last_guard_ < 0.0)) {
        tr.reason = Termination::Singularity;
        tr.detail = "law guard vanished near t=" + std::to_string(t);
        return false;
      }
      u = input_(buf_);
      p = phi_(buf_);
      outputs_(buf_, outs);
    } catch (const DomainError& e) {
      tr.reason = Termination::DomainError;
      tr.detail = std::string(e.what()) + " at t=" + std::to_string(t);
      return false;
    }
    have_guard_ = true;
    last_guard_ = g;
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.u.push_back(u);
    tr.outputs.push_back(std::move(outs));
    tr.phi.push_back(p);
    tr.storage.push_back(0.5 * p * p);
    return true;
  }

 private:
  const ClosedLoop& cl_;
  const SimOptions& opt_;
  std::vector<std::string> slots_;
  std::size_t n_ = 0;
  CompiledVector field_, outputs_;
  Compiled input_, phi_, guard_;
  std::vector<double> buf_;
  bool have_guard_ = false;
  double last_guard_ = 0.0;
};

}  // namespace

Trajectory integrate(const ClosedLoop& cl, const std::vector<double>& x0, const SimOptions& opt) {
  if (x0.size() != cl.states.size()) throw Error("initial condition has wrong length");
  if (!(opt.dt > 0.0) || !(opt.t_end > 0.0)) throw Error("dt and t_end must be positive");
  Runner run(cl, opt);
  Trajectory tr;
  State x = x0;
  if (!run.record(tr, x, 0.0)) return tr;
  auto sys = [&run](const State& s, State& ds, double t) { run.rhs(s, ds, t); };

  try {
    if (opt.method == Method::RK4) {
      odeint::runge_kutta4<State> stepper;
      const auto steps = static_cast<std::size_t>(std::llround(opt.t_end / opt.dt));
      for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * opt.dt;
        stepper.do_step(sys, x, t, opt.dt);
        if (!run.record(tr, x, static_cast<double>(k + 1) * opt.dt)) return tr;
      }
    } else {
      auto stepper = odeint::make_controlled(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<State>());
      double t = 0.0, dt = opt.dt;
      std::size_t rejected = 0;
      while (t < opt.t_end) {
        if (t + dt > opt.t_end) dt = opt.t_end - t;
        if (stepper.try_step(sys, x, t, dt) == odeint::success) {
          rejected = 0;
          if (!run.record(tr, x, t)) return tr;
        } else if (++rejected > 500) {
          run.blow_up(tr, "step size collapsed at t=" + std::to_string(t));
          return tr;
        }
      }
    }
  } catch (const DomainError& e) {
    tr.reason = Termination::DomainError;
    tr.detail = e.what();
  }
  return tr;
}

}  // namespace pisynth
