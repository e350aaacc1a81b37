#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pisynth/cli/config.hpp"
#include "pisynth/cli/runner.hpp"

using namespace pisynth;
using namespace pisynth::cli;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pisynth-test-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }
  int shell(const std::string& args) {
    const std::string cmd = std::string(PISYNTH_BIN) + " " + args + " >" + (dir_ / "stdout").string() +
                            " 2>" + (dir_ / "stderr").string();
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }

  fs::path dir_;
};

const char* kEx1 =
    "schema: pisynth-config/1\n"
    "scenario: ex1\n"
    "design: {alpha: 12}\n"
    "initial_conditions: [[1, 1]]\n"
    "integrator: {method: rk4, dt: 0.001, t_end: 4}\n";

}  // namespace

TEST(Config, ParsesAndValidates) {
  const auto c = parse_config(kEx1);
  EXPECT_EQ(c.scenario, "ex1");
  EXPECT_DOUBLE_EQ(c.design.at("alpha"), 12.0);
  EXPECT_DOUBLE_EQ(c.sim.t_end, 4.0);
  EXPECT_THROW(parse_config("scenario: ex1\n"), ConfigError);                            // no schema
  EXPECT_THROW(parse_config("schema: pisynth-config/1\nscenario: ex1\nbogus: 1\n"), ConfigError);
  EXPECT_THROW(parse_config("schema: pisynth-config/1\n"), ConfigError);                 // nothing to run
  EXPECT_THROW(parse_config("schema: pisynth-config/1\nscenario: ex1\nintegrator: {method: euler}\n"),
               ConfigError);
  EXPECT_THROW(parse_config("schema: pisynth-config/1\nsystem: {states: [x], f: ['x +* 1'], g: ['1']}\n"
                            "manifold: [x]\nalpha: 1\ninitial_conditions: [[1]]\n"),
               ConfigError);
  EXPECT_THROW(parse_config("{{{"), ConfigError);
}

TEST_F(Cli, RunWritesCsvAndSummary) {
  auto c = parse_config(kEx1);
  Overrides o;
  o.out_dir = dir_.string();
  std::ostringstream err;
  const auto r = run_scenario(c, o, err);
  ASSERT_EQ(r.exit_code, kOk) << err.str();
  const auto csv = slurp(dir_ / "ex1_0.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x1,x2,u,phi,S");
  const auto j = nlohmann::json::parse(slurp(dir_ / "ex1.json"));
  EXPECT_EQ(j["schema"], kSummarySchema);
  EXPECT_EQ(j["scenario"], "ex1");
  const auto& run = j["runs"][0];
  EXPECT_EQ(run["termination"], "completed");
  EXPECT_NEAR(run["rate_phi"].get<double>(), 6.0, 0.01);
  EXPECT_NEAR(run["rate_S"].get<double>(), 12.0, 0.02);
  EXPECT_TRUE(run["checks"]["decay-pass"].get<bool>());
  EXPECT_TRUE(run["checks"]["invariance-pass"].get<bool>());
  EXPECT_TRUE(run["checks"]["law-equivalence-pass"].get<bool>());
  EXPECT_FALSE(j.contains("wall_clock_s"));
  EXPECT_FALSE(fs::exists(dir_ / "ex1.json.tmp"));
}

TEST_F(Cli, MultiComponentHeader) {
  auto c = parse_config("schema: pisynth-config/1\nscenario: w2-alt\nintegrator: {t_end: 1}\n");
  Overrides o;
  o.out_dir = dir_.string();
  std::ostringstream err;
  ASSERT_EQ(run_scenario(c, o, err).exit_code, kOk);
  const auto csv = slurp(dir_ / "w2-alt_0.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x1,x2,x3,u,phi_1,phi_2,S");
}

TEST_F(Cli, RobustnessFlag) {
  auto c = parse_config(
      "schema: pisynth-config/1\nscenario: slotine-reg\ninitial_conditions: [[0.5, -0.5, -0.2]]\n"
      "controller_params: {th_a: 0, th_b: 0, th_c: 0, th_d: 0}\n");
  Overrides o;
  o.out_dir = dir_.string();
  std::ostringstream err;
  const auto r = run_scenario(c, o, err);
  ASSERT_EQ(r.exit_code, kOk);
  EXPECT_TRUE(r.summary["runs"][0]["checks"]["robustness-pass"].get<bool>());
}

TEST_F(Cli, InlineTargetSystem) {
  auto c = parse_config(
      "schema: pisynth-config/1\n"
      "system: {states: [x1, x2], f: ['-x1 + th_a*x1^3*x2', '0'], g: ['0', '1'], params: {th_a: 1}}\n"
      "target: {eta: [eta], beta: ['-eta'], pi: ['eta', '-eta^2']}\n"
      "alpha: 12\ninitial_conditions: [[1, 1]]\nintegrator: {t_end: 3}\n");
  Overrides o;
  o.out_dir = dir_.string();
  std::ostringstream err;
  const auto r = run_scenario(c, o, err);
  ASSERT_EQ(r.exit_code, kOk) << err.str();
  // the manifold built from pi is x2 + x1^2, the ex1 manifold
  const auto ex1 = catalog_get("ex1");
  EXPECT_LE(compare_law(ex1, resolve(c).law.u, 200, 1).max_rel, 1e-12);
  EXPECT_TRUE(r.summary["runs"][0]["checks"]["law-equivalence-pass"].is_null());
}

TEST_F(Cli, DeterministicReruns) {
  auto c = parse_config(kEx1);
  std::ostringstream err;
  Overrides a, b;
  a.out_dir = (dir_ / "a").string();
  b.out_dir = (dir_ / "b").string();
  ASSERT_EQ(run_scenario(c, a, err).exit_code, kOk);
  ASSERT_EQ(run_scenario(c, b, err).exit_code, kOk);
  for (const char* f : {"ex1_0.csv", "ex1.json"}) EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(shell("list"), 0);
  EXPECT_GE(std::count(std::istreambuf_iterator<char>(std::ifstream(dir_ / "stdout").rdbuf()), {}, '\n'), 14);
  EXPECT_EQ(shell("describe maglev"), 0);
  EXPECT_NE(slurp(dir_ / "stdout").find("m_b=3"), std::string::npos);
  EXPECT_EQ(shell("describe nope"), 2);
  EXPECT_EQ(shell("run --scenario nope"), 2);
  EXPECT_EQ(shell("run " + write("bad.yaml", "schema: pisynth-config/1\nsystem: {states: [x], f: ['x +* 1'], "
                                               "g: ['1']}\nmanifold: [x]\nalpha: 1\ninitial_conditions: [[1]]\n")),
            2);
  EXPECT_EQ(shell("run --scenario ex1 --set alpha=-2 -o " + dir_.string()), 3);
  EXPECT_EQ(shell("run --scenario w2-case2 --x0 0.5,-3,0 -o " + dir_.string()), 4);
  EXPECT_TRUE(fs::exists(dir_ / "w2-case2_0.csv"));  // partial trajectory kept
  EXPECT_NE(slurp(dir_ / "stderr").find("singularity"), std::string::npos);
  EXPECT_EQ(shell("run --scenario ex1 --t-end 0.5 --method rk45 -o " + dir_.string()), 0);
  EXPECT_EQ(shell("sweep --scenario ex1 --param alpha --values '' -o " + dir_.string()), 2);
  EXPECT_EQ(shell("frobnicate"), 2);
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
  const auto env = dir_ / "env";
  ::setenv("PISYNTH_OUT", env.c_str(), 1);
  EXPECT_EQ(shell("run --scenario ex1 --t-end 0.2"), 0);
  ::unsetenv("PISYNTH_OUT");
  EXPECT_TRUE(fs::exists(env / "ex1.json"));
}

TEST_F(Cli, SweepRunsEveryValue) {
  EXPECT_EQ(shell("sweep --scenario ccm-3rd-order --param alpha --values 10,20,40 --t-end 20 -o " + dir_.string()), 0);
  const auto j = nlohmann::json::parse(slurp(dir_ / "ccm-3rd-order_sweep.json"));
  ASSERT_EQ(j["runs"].size(), 3u);
  for (const auto& r : j["runs"]) {
    EXPECT_EQ(r["exit_code"], 0);
    EXPECT_FALSE(r["summary"]["runs"][0]["settling_time"].is_null());
  }
  EXPECT_DOUBLE_EQ(j["runs"][2]["summary"]["design"]["alpha"].get<double>(), 40.0);
}

TEST_F(Cli, SweepIwpOrbits) {
  EXPECT_EQ(shell("sweep --scenario iwp-orbital --param k --values 0.25,0.5,1 -o " + dir_.string()), 0);
  const auto j = nlohmann::json::parse(slurp(dir_ / "iwp-orbital_sweep.json"));
  for (const auto& r : j["runs"]) EXPECT_TRUE(r["summary"]["runs"][0]["orbit"]["found"].get<bool>());
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1e-300), "1e-300");
  EXPECT_EQ(format_number(-2.0), "-2");
  for (double v : {1.0 / 3.0, 2.718281828459045, -1e-17}) EXPECT_EQ(std::stod(format_number(v)), v);
}
