#include "pisynth/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace pisynth::cli {

namespace {

template <class T>
T as(const YAML::Node& n, const std::string& where) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + where + "'");
  }
}

void check_keys(const YAML::Node& n, const std::set<std::string>& allowed, const std::string& where) {
  if (!n.IsMap()) throw ConfigError("'" + where + "' must be a mapping");
  for (const auto& kv : n) {
    const auto k = kv.first.as<std::string>();
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

Point point_of(const YAML::Node& n, const std::string& where) {
  Point p;
  if (!n) return p;
  if (!n.IsMap()) throw ConfigError("'" + where + "' must map names to numbers");
  for (const auto& kv : n) p[kv.first.as<std::string>()] = as<double>(kv.second, where);
  return p;
}

std::vector<std::string> strings_of(const YAML::Node& n, const std::string& where) {
  std::vector<std::string> out;
  if (!n) return out;
  if (!n.IsSequence()) throw ConfigError("'" + where + "' must be a list");
  for (const auto& e : n) out.push_back(as<std::string>(e, where));
  return out;
}

void check_expr(const std::string& s, const std::string& where) {
  try {
    (void)parse(s);
  } catch (const SyntaxError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML: ") + e.what());
  }
  check_keys(root,
             {"schema", "scenario", "design", "system", "manifold", "target", "alpha",
              "initial_conditions", "plant_params", "controller_params", "integrator", "output"},
             "config");
  if (!root["schema"] || root["schema"].as<std::string>() != kConfigSchema)
    throw ConfigError(std::string("config must declare schema: ") + kConfigSchema);

  ScenarioConfig c;
  if (root["scenario"]) c.scenario = as<std::string>(root["scenario"], "scenario");
  c.design = point_of(root["design"], "design");
  c.plant_params = point_of(root["plant_params"], "plant_params");
  c.controller_params = point_of(root["controller_params"], "controller_params");

  if (const auto s = root["system"]) {
    check_keys(s, {"states", "f", "g", "params", "time"}, "system");
    InlineSystem sys;
    sys.states = strings_of(s["states"], "system.states");
    sys.f = strings_of(s["f"], "system.f");
    sys.g = strings_of(s["g"], "system.g");
    sys.params = point_of(s["params"], "system.params");
    if (s["time"]) sys.time = as<std::string>(s["time"], "system.time");
    if (sys.states.empty() || sys.f.size() != sys.states.size() || sys.g.size() != sys.states.size())
      throw ConfigError("system needs states with one f and one g entry each");
    for (const auto& e : sys.f) check_expr(e, "system.f");
    for (const auto& e : sys.g) check_expr(e, "system.g");
    c.system = std::move(sys);
  }
  c.manifold = strings_of(root["manifold"], "manifold");
  for (const auto& e : c.manifold) check_expr(e, "manifold");
  if (const auto t = root["target"]) {
    check_keys(t, {"eta", "beta", "pi"}, "target");
    TargetSpec ts{strings_of(t["eta"], "target.eta"), strings_of(t["beta"], "target.beta"),
                  strings_of(t["pi"], "target.pi")};
    for (const auto& e : ts.beta) check_expr(e, "target.beta");
    for (const auto& e : ts.pi) check_expr(e, "target.pi");
    c.target = std::move(ts);
  }
  if (root["alpha"]) c.alpha = as<double>(root["alpha"], "alpha");

  if (const auto ic = root["initial_conditions"]) {
    if (!ic.IsSequence()) throw ConfigError("initial_conditions must be a list of lists");
    for (const auto& row : ic) c.initial_conditions.push_back(as<std::vector<double>>(row, "initial_conditions"));
  }

  if (const auto in = root["integrator"]) {
    check_keys(in, {"method", "dt", "t_end", "atol", "rtol"}, "integrator");
    if (in["method"]) {
      const auto m = method_from_string(as<std::string>(in["method"], "integrator.method"));
      if (!m) throw ConfigError("integrator.method must be rk4 or rk45");
      c.sim.method = *m;
    }
    if (in["dt"]) c.sim.dt = as<double>(in["dt"], "integrator.dt");
    if (in["t_end"]) c.sim.t_end = as<double>(in["t_end"], "integrator.t_end");
    if (in["atol"]) c.sim.atol = as<double>(in["atol"], "integrator.atol");
    if (in["rtol"]) c.sim.rtol = as<double>(in["rtol"], "integrator.rtol");
  }
  if (const auto o = root["output"]) {
    check_keys(o, {"dir", "prefix", "stride"}, "output");
    if (o["dir"]) c.out_dir = as<std::string>(o["dir"], "output.dir");
    if (o["prefix"]) c.prefix = as<std::string>(o["prefix"], "output.prefix");
    if (o["stride"]) c.stride = as<std::size_t>(o["stride"], "output.stride");
  }

  if (c.scenario.empty() == !c.system.has_value())
    throw ConfigError("give exactly one of 'scenario' or 'system'");
  if (c.system) {
    if (c.manifold.empty() == !c.target.has_value())
      throw ConfigError("an inline system needs exactly one of 'manifold' or 'target'");
    if (!(c.alpha > 0.0)) throw ConfigError("an inline system needs alpha > 0");
    if (c.initial_conditions.empty()) throw ConfigError("an inline system needs initial_conditions");
  } else if (!c.manifold.empty() || c.target || root["alpha"]) {
    throw ConfigError("catalog scenarios take rates under 'design', not manifold/target/alpha");
  }
  if (!(c.sim.dt > 0.0) || !(c.sim.t_end > 0.0)) throw ConfigError("dt and t_end must be positive");
  if (c.stride == 0) throw ConfigError("output.stride must be at least 1");
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

const char* config_reference() {
  return R"(schema: pisynth-config/1         # required
scenario: ex1                     # catalog id (see `pisynth list`), or use `system`
design: {alpha: 12}               # catalog design overrides (rates, k, ...)
system:                           # inline control-affine system x' = f + g u
  states: [x1, x2]
  f: ["-x1 + th*x1^3*x2", "0"]
  g: ["0", "1"]
  params: {th: 1}
  time: t                         # optional time symbol
manifold: ["x2 + x1^2"]           # inline: components, summed for synthesis
target:                           # inline alternative to manifold
  eta: [eta]
  beta: ["-eta"]
  pi: ["eta", "-eta^2"]
alpha: 12                         # inline rate: phi' = -(alpha/2) phi
initial_conditions: [[1, 1]]
plant_params: {th: 1.2}           # plant-side overrides
controller_params: {th: 0}        # controller-side overrides (robustness runs)
integrator: {method: rk4, dt: 0.001, t_end: 20, atol: 1e-9, rtol: 1e-8}
output: {dir: out, prefix: ex1, stride: 1}
)";
}

}  // namespace pisynth::cli
