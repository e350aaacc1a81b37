#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "pisynth/cli/acceptance.hpp"
#include "pisynth/cli/config.hpp"
#include "pisynth/cli/runner.hpp"

using namespace pisynth;
using namespace pisynth::cli;

namespace {

struct Common {
  std::string config_path, scenario, prefix;
  std::vector<std::string> sets, plant, controller, x0s;
  std::optional<std::string> out;
  std::optional<double> dt, t_end;
  std::string method;
  bool timing = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("config", c.config_path, "YAML scenario config (see `pisynth run --help-config`)");
  app->add_option("-s,--scenario", c.scenario, "catalog id, instead of or on top of a config");
  app->add_option("--set", c.sets, "design constant override, name=value");
  app->add_option("--plant", c.plant, "plant parameter override, name=value");
  app->add_option("--controller", c.controller, "controller parameter override, name=value");
  app->add_option("--x0", c.x0s, "initial condition, comma separated (repeatable)");
  app->add_option("-o,--out", c.out, "output directory (else PISYNTH_OUT, else config)");
  app->add_option("--prefix", c.prefix, "output file prefix");
  app->add_option("--dt", c.dt, "step size");
  app->add_option("--t-end", c.t_end, "horizon");
  app->add_option("--method", c.method, "rk4 or rk45");
  app->add_flag("--timing", c.timing, "record wall-clock time in the summary");
}

double number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number '" + s + "' in " + what);
  }
}

std::pair<std::string, double> assignment(const std::string& s, const std::string& what) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(what + " expects name=value, got '" + s + "'");
  return {s.substr(0, eq), number(s.substr(eq + 1), what)};
}

std::vector<double> numbers(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number(item, what));
  return out;
}

ScenarioConfig build(const Common& c, Overrides& o) {
  ScenarioConfig cfg;
  if (!c.config_path.empty()) cfg = load_config(c.config_path);
  else if (c.scenario.empty()) throw ConfigError("give a config file or --scenario");
  if (!c.scenario.empty()) {
    if (cfg.system) throw ConfigError("--scenario conflicts with an inline system");
    cfg.scenario = c.scenario;
  }
  for (const auto& s : c.sets) {
    const auto [k, v] = assignment(s, "--set");
    if (cfg.system && k == "alpha") cfg.alpha = v;
    else cfg.design[k] = v;
  }
  for (const auto& s : c.plant) cfg.plant_params.insert_or_assign(assignment(s, "--plant").first, assignment(s, "--plant").second);
  for (const auto& s : c.controller)
    cfg.controller_params.insert_or_assign(assignment(s, "--controller").first, assignment(s, "--controller").second);
  if (!c.x0s.empty()) {
    cfg.initial_conditions.clear();
    for (const auto& s : c.x0s) cfg.initial_conditions.push_back(numbers(s, "--x0"));
  }
  if (!c.prefix.empty()) cfg.prefix = c.prefix;
  o.out_dir = c.out;
  o.dt = c.dt;
  o.t_end = c.t_end;
  o.timing = c.timing;
  if (!c.method.empty()) {
    o.method = method_from_string(c.method);
    if (!o.method) throw ConfigError("--method must be rk4 or rk45");
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pisynth: passivity and immersion controller synthesis"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts;
  bool help_config = false;
  auto* run = app.add_subcommand("run", "synthesize and simulate a scenario");
  add_common(run, run_opts);
  run->add_flag("--help-config", help_config, "print the documented config keys and exit");

  std::string param, values;
  auto* sweep = app.add_subcommand("sweep", "run one scenario over a list of parameter values");
  add_common(sweep, sweep_opts);
  sweep->add_option("-p,--param", param, "design constant or parameter to vary")->required();
  sweep->add_option("-v,--values", values, "comma separated values")->required();

  app.add_subcommand("list", "list catalog ids");

  std::string id;
  auto* describe_cmd = app.add_subcommand("describe", "print a catalog entry");
  describe_cmd->add_option("id", id)->required();

  std::vector<int> only;
  auto* self = app.add_subcommand("selftest", "run the acceptance criteria");
  self->add_option("--only", only, "criterion numbers to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (run->parsed()) {
      if (help_config) {
        std::cout << config_reference();
        return kOk;
      }
      Overrides o;
      const auto cfg = build(run_opts, o);
      const auto r = run_scenario(cfg, o, std::cerr);
      for (const auto& f : r.files) std::cout << f << "\n";
      return r.exit_code;
    }
    if (sweep->parsed()) {
      Overrides o;
      const auto cfg = build(sweep_opts, o);
      return run_sweep(cfg, param, values.empty() ? std::vector<double>{} : numbers(values, "--values"), o,
                       std::cerr);
    }
    if (app.got_subcommand("list")) {
      list_catalog(std::cout);
      return kOk;
    }
    if (describe_cmd->parsed()) return describe(id, std::cout, std::cerr);
    if (self->parsed()) return selftest(std::cout, only);
  } catch (const ConfigError& e) {
    std::cerr << "pisynth: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "pisynth: " << e.what() << "\n";
    return kFailed;
  }
  return kOk;
}
