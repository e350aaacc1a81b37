#include "pisynth/cli/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <set>
#include <sstream>

#include "pisynth/synth.hpp"

namespace pisynth::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw Error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, p);
}

DecayCheck decay_check(const Trajectory& tr, double rate, double t_max) {
  DecayCheck d;
  if (tr.size() == 0) return d;
  const double p0 = tr.phi.front(), s0 = tr.storage.front();
  const double sp = std::max(std::abs(p0), 1e-300), ss = std::max(s0, 1e-300);
  for (std::size_t k = 0; k < tr.size() && tr.t[k] <= t_max + 1e-12; ++k) {
    d.dev_phi = std::max(d.dev_phi, std::abs(tr.phi[k] - p0 * std::exp(-rate * tr.t[k])) / sp);
    d.dev_s = std::max(d.dev_s, std::abs(tr.storage[k] - s0 * std::exp(-2.0 * rate * tr.t[k])) / ss);
  }
  if (p0 == 0.0) {
    d.dev_phi = d.dev_s = 0.0;
    for (std::size_t k = 0; k < tr.size() && tr.t[k] <= t_max + 1e-12; ++k)
      d.dev_phi = std::max(d.dev_phi, std::abs(tr.phi[k]));
    d.pass = d.dev_phi <= 1e-9;
    return d;
  }
  d.pass = d.dev_phi <= 1e-5 && d.dev_s <= 1e-5;
  return d;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json point_json(const Point& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

std::vector<Expr> parse_all(const std::vector<std::string>& src, const Point& bindings = {}) {
  std::vector<Expr> out;
  for (const auto& s : src) out.push_back(bindings.empty() ? parse(s) : bind_values(parse(s), bindings));
  return out;
}

CatalogEntry resolve_inline(const ScenarioConfig& c) {
  const auto& s = *c.system;
  CatalogEntry e;
  e.id = "custom";
  e.summary = "inline system";
  try {
    e.system = ControlAffineSystem::make(s.states, parse_all(s.f), parse_all(s.g), s.params, s.time);
  } catch (const InvalidSystem& err) {
    throw ConfigError(err.what());
  } catch (const DuplicateVariable& err) {
    throw ConfigError(err.what());
  }

  if (c.target) {
    const auto& t = *c.target;
    if (t.eta.size() != t.beta.size() || t.pi.size() != s.states.size() || t.eta.empty() ||
        t.eta.size() >= s.states.size())
      throw ConfigError("target needs one beta per eta, one pi per state and dim eta < dim x");
    TargetDynamics td{t.eta, parse_all(t.beta), parse_all(t.pi)};
    // eta_j = x_i wherever pi_i is the bare symbol eta_j
    Substitution eta_of_x;
    std::vector<bool> identity(s.states.size(), false);
    for (std::size_t i = 0; i < s.states.size(); ++i) {
      const Expr& p = td.pi[i];
      if (p.is_symbol() && std::find(t.eta.begin(), t.eta.end(), p.name()) != t.eta.end() &&
          !eta_of_x.count(p.name())) {
        eta_of_x[p.name()] = sym(s.states[i]);
        identity[i] = true;
      }
    }
    if (eta_of_x.size() != t.eta.size())
      throw ConfigError("every eta must appear alone in some pi entry");
    for (std::size_t i = 0; i < s.states.size(); ++i)
      if (!identity[i])
        e.manifold.components.push_back(simplify(sym(s.states[i]) - substitute(td.pi[i], eta_of_x)));
    try {
      validate(td, e.system);
    } catch (const Error& err) {
      throw ConfigError(err.what());
    }
    e.target = std::move(td);
  } else {
    e.manifold.components = parse_all(c.manifold);
  }
  for (const auto& m : e.manifold.components)
    for (const auto& name : free_symbols(m))
      if (!e.system.knows(name)) throw ConfigError("manifold uses unknown symbol '" + name + "'");

  e.design = {{"alpha", c.alpha}};
  e.law = synthesize(e.system, combine(e.manifold), c.alpha);
  e.initial_conditions = c.initial_conditions;
  e.equilibrium.assign(e.system.dim(), 0.0);
  e.behavior = Behavior::ZetaDecay;
  e.zeta = {combine(e.manifold)};
  for (const auto& st : e.system.states) e.ranges[st] = {-2.0, 2.0};
  return e;
}

void check_params(const Point& p, const CatalogEntry& e, const char* what) {
  for (const auto& [k, v] : p)
    if (!e.system.params.count(k))
      throw ConfigError(std::string(what) + " names unknown parameter '" + k + "'");
}

json fit_json(const Trajectory& tr, const std::vector<double>& series, double t_max) {
  try {
    return fit_exponential(tr.t, series, t_max, 1e-10).rate;
  } catch (const InsufficientData&) {
    return nullptr;
  }
}

// Projects x0 onto the combined manifold along the last state and measures
// the closed-loop drift of phi there.
std::pair<bool, double> invariance_at(const CatalogEntry& e, const std::vector<double>& x0) {
  const Expr phi = combine(e.manifold);
  Point p = e.system.params;
  for (std::size_t i = 0; i < x0.size(); ++i) p[e.system.states[i]] = x0[i];
  if (!e.system.time.empty()) p[e.system.time] = 0.0;
  for (auto it = e.system.states.rbegin(); it != e.system.states.rend(); ++it) {
    if (!depends_on(phi, *it)) continue;
    auto on = project_onto(phi, p, *it);
    if (!on) continue;
    try {
      const double r = invariance_residual(e.system, e.law, ImplicitManifold{{phi}, {}}, *on);
      return {std::isfinite(r) && r <= 1e-8, r};
    } catch (const Error&) {
      continue;
    }
  }
  return {false, NAN};
}

std::string csv_of(const CatalogEntry& e, const Trajectory& tr, std::size_t stride) {
  std::string s = "t";
  for (const auto& x : e.system.states) s += "," + x;
  s += ",u";
  const std::size_t k = e.manifold.components.size();
  if (k == 1) s += ",phi";
  else
    for (std::size_t i = 1; i <= k; ++i) s += ",phi_" + std::to_string(i);
  s += ",S\n";
  for (std::size_t r = 0; r < tr.size(); ++r) {
    if (r % stride != 0 && r + 1 != tr.size()) continue;
    s += format_number(tr.t[r]);
    for (double v : tr.x[r]) s += "," + format_number(v);
    s += "," + format_number(tr.u[r]);
    for (double v : tr.outputs[r]) s += "," + format_number(v);
    s += "," + format_number(tr.storage[r]) + "\n";
  }
  return s;
}

std::string out_path(const ScenarioConfig& c, const std::string& name) {
  return (fs::path(c.out_dir.empty() ? "." : c.out_dir) / name).string();
}

std::string prefix_of(const ScenarioConfig& c) {
  if (!c.prefix.empty()) return c.prefix;
  return c.scenario.empty() ? "custom" : c.scenario;
}

json run_one(const CatalogEntry& e, const ScenarioConfig& c, std::size_t index,
             std::vector<std::string>& files, bool& runtime_failure) {
  const auto& x0 = e.initial_conditions[index];
  const auto cl = make_closed_loop(e.system, e.law, e.manifold, c.plant_params, c.controller_params);
  const Trajectory tr = integrate(cl, x0, c.sim);

  const std::string csv = prefix_of(c) + "_" + std::to_string(index) + ".csv";
  write_atomic(out_path(c, csv), csv_of(e, tr, c.stride));
  files.push_back(out_path(c, csv));

  json r;
  r["x0"] = x0;
  r["csv"] = csv;
  r["termination"] = to_string(tr.reason);
  if (!tr.detail.empty()) r["detail"] = tr.detail;
  r["t_final"] = tr.t.empty() ? 0.0 : tr.t.back();
  if (tr.reason != Termination::Completed) runtime_failure = true;

  const double t_fit = std::min(10.0, c.sim.t_end);
  r["rate_phi"] = fit_json(tr, tr.phi, t_fit);
  r["rate_S"] = fit_json(tr, tr.storage, t_fit);
  r["expected_rate_phi"] = e.law.output_rate;
  r["expected_rate_S"] = 2.0 * e.law.output_rate;

  std::vector<double> err;
  try {
    err = error_series(e, tr, c.plant_params);
  } catch (const Error&) {
  }
  json settle = nullptr;
  if (!err.empty()) {
    if (auto st = settling_time(tr.t, err, 1e-3)) settle = *st;
    r["final_error"] = finite_or_null(err.back());
  } else {
    r["final_error"] = nullptr;
  }
  r["settling_time"] = settle;
  r["error_kind"] = to_string(e.behavior);

  double late_max = 0.0;
  for (std::size_t k = 0; k < err.size(); ++k)
    if (tr.t[k] >= 10.0) late_max = std::max(late_max, err[k]);
  if (e.behavior == Behavior::Tracking) r["max_error_after_10s"] = late_max;

  Orbit orbit;
  if (e.behavior == Behavior::PeriodicOrbit) {
    orbit = detect_orbit(tr.t, tr.column(0));
    r["orbit"] = {{"found", orbit.found}, {"period", orbit.period}, {"amplitude", orbit.amplitude},
                  {"drift", orbit.drift}, {"cycles", orbit.cycles}};
  }

  const auto decay = decay_check(tr, e.law.output_rate, t_fit);
  const auto [inv_pass, inv_res] = invariance_at(e, x0);
  json checks;
  checks["decay-pass"] = decay.pass;
  checks["decay-max-dev-phi"] = decay.dev_phi;
  checks["decay-max-dev-S"] = decay.dev_s;
  checks["invariance-pass"] = inv_pass;
  checks["invariance-residual"] = finite_or_null(inv_res);
  if (!c.controller_params.empty()) {
    bool ok = tr.reason == Termination::Completed && !err.empty();
    if (ok) {
      if (e.behavior == Behavior::Tracking) ok = late_max <= 1e-2;
      else if (e.behavior == Behavior::PeriodicOrbit) ok = orbit.found;
      else ok = err.back() <= 1e-2;
    }
    checks["robustness-pass"] = ok;
  }
  r["checks"] = checks;
  return r;
}

}  // namespace

CatalogEntry resolve(const ScenarioConfig& c) {
  if (c.system) {
    auto e = resolve_inline(c);
    check_params(c.plant_params, e, "plant_params");
    check_params(c.controller_params, e, "controller_params");
    for (const auto& x0 : e.initial_conditions)
      if (x0.size() != e.system.dim()) throw ConfigError("initial condition has the wrong dimension");
    return e;
  }
  CatalogEntry base;
  Point tunable;
  try {
    tunable = catalog_design(c.scenario);
    base = catalog_get(c.scenario);
  } catch (const UnknownId& err) {
    throw ConfigError(err.what());
  }
  for (const auto& [k, v] : c.design)
    if (!tunable.count(k)) throw ConfigError("scenario '" + c.scenario + "' has no design constant '" + k + "'");
  check_params(c.plant_params, base, "plant_params");
  check_params(c.controller_params, base, "controller_params");
  CatalogEntry e = c.design.empty() ? std::move(base) : catalog_get(c.scenario, c.design);
  if (!c.initial_conditions.empty()) e.initial_conditions = c.initial_conditions;
  for (const auto& x0 : e.initial_conditions)
    if (x0.size() != e.system.dim()) throw ConfigError("initial condition has the wrong dimension");
  return e;
}

ScenarioConfig apply(ScenarioConfig c, const Overrides& o) {
  if (o.dt) c.sim.dt = *o.dt;
  if (o.t_end) c.sim.t_end = *o.t_end;
  if (o.method) c.sim.method = *o.method;
  if (!(c.sim.dt > 0.0) || !(c.sim.t_end > 0.0)) throw ConfigError("dt and t_end must be positive");
  if (o.out_dir) c.out_dir = *o.out_dir;
  else if (const char* env = std::getenv("PISYNTH_OUT"); env && *env) c.out_dir = env;
  if (c.out_dir.empty()) c.out_dir = ".";
  return c;
}

RunResult run_scenario(const ScenarioConfig& config, const Overrides& o, std::ostream& err) {
  RunResult res;
  const auto start = std::chrono::steady_clock::now();
  ScenarioConfig c;
  CatalogEntry e;
  try {
    c = apply(config, o);
    e = resolve(c);
  } catch (const ConfigError& ex) {
    err << "pisynth: " << ex.what() << "\n";
    res.exit_code = kBadInput;
    return res;
  } catch (const Error& ex) {
    err << "pisynth: synthesis failed: " << ex.what() << "\n";
    res.exit_code = kSynthesisFailed;
    return res;
  }

  json s;
  s["schema"] = kSummarySchema;
  s["scenario"] = e.id;
  s["behavior"] = to_string(e.behavior);
  s["design"] = point_json(e.design);
  s["output_rate"] = e.law.output_rate;
  s["provenance"] = to_string(e.law.provenance);
  s["law"] = to_string(e.law.u);
  s["integrator"] = {{"method", to_string(c.sim.method)}, {"dt", c.sim.dt}, {"t_end", c.sim.t_end},
                     {"atol", c.sim.atol}, {"rtol", c.sim.rtol}};
  s["plant_params"] = point_json(c.plant_params);
  s["controller_params"] = point_json(c.controller_params);

  json equiv = nullptr;
  if (e.reference) {
    try {
      const auto d = compare_law(e, *e.reference);
      equiv = d.max_rel <= 1e-9;
      s["law_equivalence_max_rel"] = d.max_rel;
    } catch (const Error& ex) {
      equiv = false;
      s["law_equivalence_error"] = ex.what();
    }
  }

  bool runtime_failure = false;
  json runs = json::array();
  try {
    for (std::size_t k = 0; k < e.initial_conditions.size(); ++k) {
      json r = run_one(e, c, k, res.files, runtime_failure);
      r["checks"]["law-equivalence-pass"] = equiv;
      runs.push_back(std::move(r));
    }
  } catch (const SymbolMismatch& ex) {
    err << "pisynth: " << ex.what() << "\n";
    res.exit_code = kBadInput;
    return res;
  } catch (const UnboundSymbol& ex) {
    err << "pisynth: " << ex.what() << "\n";
    res.exit_code = kBadInput;
    return res;
  }
  s["runs"] = runs;
  if (o.timing)
    s["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string path = out_path(c, prefix_of(c) + ".json");
  write_atomic(path, s.dump(2) + "\n");
  res.files.push_back(path);
  res.summary = std::move(s);
  if (runtime_failure) {
    for (const auto& r : res.summary["runs"])
      if (r["termination"] != "completed")
        err << "pisynth: " << r["csv"].get<std::string>() << ": " << r["termination"].get<std::string>()
            << (r.contains("detail") ? " (" + r["detail"].get<std::string>() + ")" : std::string()) << "\n";
    res.exit_code = kRuntimeFailed;
  }
  return res;
}

int run_sweep(const ScenarioConfig& config, const std::string& param, const std::vector<double>& values,
              const Overrides& o, std::ostream& err) {
  if (values.empty()) {
    err << "pisynth: sweep needs at least one value\n";
    return kBadInput;
  }
  ScenarioConfig c;
  CatalogEntry base;
  try {
    c = apply(config, o);
    base = resolve(c);
  } catch (const ConfigError& ex) {
    err << "pisynth: " << ex.what() << "\n";
    return kBadInput;
  } catch (const Error& ex) {
    err << "pisynth: synthesis failed: " << ex.what() << "\n";
    return kSynthesisFailed;
  }
  enum class Target { Design, Alpha, Param } target;
  if (c.system && param == "alpha") target = Target::Alpha;
  else if (!c.system && catalog_design(base.id).count(param)) target = Target::Design;
  else if (base.system.params.count(param)) target = Target::Param;
  else {
    err << "pisynth: '" << param << "' is neither a design constant nor a parameter\n";
    return kBadInput;
  }

  const std::string prefix = prefix_of(c);
  std::vector<std::future<std::pair<RunResult, std::string>>> jobs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ScenarioConfig ci = c;
    ci.prefix = prefix + "_" + param + "_" + std::to_string(i);
    switch (target) {
      case Target::Alpha: ci.alpha = values[i]; break;
      case Target::Design: ci.design[param] = values[i]; break;
      case Target::Param:
        ci.plant_params[param] = values[i];
        ci.controller_params[param] = values[i];
        break;
    }
    jobs.push_back(std::async(std::launch::async, [ci = std::move(ci)] {
      std::ostringstream e;
      RunResult r = run_scenario(ci, Overrides{}, e);
      return std::make_pair(std::move(r), e.str());
    }));
  }

  json out;
  out["schema"] = kSweepSchema;
  out["scenario"] = base.id;
  out["parameter"] = param;
  out["values"] = values;
  json runs = json::array();
  int worst = kOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto [r, msg] = jobs[i].get();
    err << msg;
    json j;
    j["value"] = values[i];
    j["exit_code"] = r.exit_code;
    j["summary"] = r.summary.is_null() ? json(nullptr) : r.summary;
    if (!msg.empty()) j["diagnostic"] = msg;
    runs.push_back(std::move(j));
    worst = std::max(worst, r.exit_code);
  }
  out["runs"] = runs;
  write_atomic(out_path(c, prefix + "_sweep.json"), out.dump(2) + "\n");
  return worst;
}

void list_catalog(std::ostream& out) {
  for (const auto& id : catalog_ids()) {
    const auto e = catalog_get(id);
    out << id << "\t" << to_string(e.behavior) << "\t" << e.summary << "\n";
  }
}

int describe(const std::string& id, std::ostream& out, std::ostream& err) {
  CatalogEntry e;
  try {
    e = catalog_get(id);
  } catch (const UnknownId& ex) {
    err << "pisynth: " << ex.what() << "\n";
    return kBadInput;
  }
  out << "id: " << e.id << "\n"
      << "summary: " << e.summary << "\n"
      << "behavior: " << to_string(e.behavior) << "\n"
      << "states:";
  for (const auto& s : e.system.states) out << " " << s;
  out << "\n";
  if (!e.system.time.empty()) out << "time: " << e.system.time << "\n";
  for (std::size_t i = 0; i < e.system.dim(); ++i)
    out << "  " << e.system.states[i] << "' = " << to_string(e.system.f[i]) << " + ("
        << to_string(e.system.g[i]) << ") u\n";
  out << "params:";
  for (const auto& [k, v] : e.system.params) out << " " << k << "=" << format_number(v);
  out << "\ndesign:";
  for (const auto& [k, v] : e.design) out << " " << k << "=" << format_number(v);
  out << "\nmanifold:\n";
  for (const auto& m : e.manifold.components) out << "  " << to_string(m) << "\n";
  out << "law (" << to_string(e.law.provenance) << "): u = " << to_string(e.law.u) << "\n"
      << "guard: " << to_string(e.law.guard) << "\n"
      << "output rate: " << format_number(e.law.output_rate) << "\n";
  if (e.reference) out << "reference: " << to_string(*e.reference) << "\n";
  for (const auto& v : e.variants) out << "variant " << v.name << ": " << v.note << "\n";
  out << "initial conditions:";
  for (const auto& x0 : e.initial_conditions) {
    out << " (";
    for (std::size_t i = 0; i < x0.size(); ++i) out << (i ? "," : "") << format_number(x0[i]);
    out << ")";
  }
  out << "\n";
  if (!e.controller_variants.empty()) out << "controller variants: " << e.controller_variants.size() << "\n";
  return kOk;
}

}  // namespace pisynth::cli
