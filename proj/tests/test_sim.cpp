#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pisynth/catalog.hpp"
#include "pisynth/sim.hpp"

using namespace pisynth;

namespace {

const Expr x = sym("x");
constexpr double kCcmSettling = 10.085;  // ccm-3rd-order from (0.5, 0.5, 0.5), tol 1e-3

Trajectory decay(double dt, double t_end, Method m = Method::RK4) {
  SimOptions o;
  o.dt = dt;
  o.t_end = t_end;
  o.method = m;
  return integrate(make_field({"x"}, {-x}), {1.0}, o);
}

}  // namespace

TEST(Integrate, ExponentialDecay) {
  const auto tr = decay(1e-3, 1.0);
  ASSERT_EQ(tr.reason, Termination::Completed);
  EXPECT_NEAR(tr.t.back(), 1.0, 1e-12);
  EXPECT_NEAR(tr.x.back()[0], std::exp(-1.0), 1e-10);
  for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_GT(tr.t[k], tr.t[k - 1]);
}

TEST(Integrate, UniformGrid) {
  const auto tr = decay(0.01, 2.0);
  ASSERT_EQ(tr.size(), 201u);
  for (std::size_t k = 0; k < tr.size(); ++k) EXPECT_DOUBLE_EQ(tr.t[k], 0.01 * static_cast<double>(k));
}

TEST(Integrate, Rk4Order) {
  auto err = [](double dt) {
    const auto tr = decay(dt, 1.0);
    return std::abs(tr.x.back()[0] - std::exp(-tr.t.back()));
  };
  const double ratio = err(0.1) / err(0.05);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(Integrate, AdaptiveTolerance) {
  const auto tr = decay(1e-3, 5.0, Method::RK45);
  ASSERT_EQ(tr.reason, Termination::Completed);
  EXPECT_NEAR(tr.t.back(), 5.0, 1e-12);
  EXPECT_NEAR(tr.x.back()[0], std::exp(-5.0), 1e-8);
  EXPECT_LT(tr.size(), 1000u);
}

TEST(Integrate, Divergence) {
  SimOptions o;
  o.t_end = 5.0;
  const auto tr = integrate(make_field({"x"}, {x * x}), {1.0}, o);
  EXPECT_EQ(tr.reason, Termination::Divergence);
  EXPECT_LT(tr.t.back(), 1.01);
  for (const auto& row : tr.x) EXPECT_TRUE(std::isfinite(row[0]));
}

TEST(Integrate, DomainError) {
  const auto e = catalog_get("maglev");
  const auto tr = integrate(make_closed_loop(e.system, e.law, e.manifold), {0.0, 0.0, -1.0});
  EXPECT_EQ(tr.reason, Termination::DomainError);
}

TEST(Integrate, GuardSingularity) {
  const auto e = catalog_get("w2-case2");
  const auto tr = integrate(make_closed_loop(e.system, e.law, e.manifold), {0.5, -3.0, 0.0});
  EXPECT_EQ(tr.reason, Termination::Singularity);
  EXPECT_LT(std::abs(tr.x.back()[0]), 1e-3);
}

TEST(Integrate, TimeVaryingField) {
  // x' = cos t from 0 gives sin t
  SimOptions o;
  o.t_end = 2.0;
  const auto tr = integrate(make_field({"x"}, {cos(sym("t"))}, "t"), {0.0}, o);
  EXPECT_NEAR(tr.x.back()[0], std::sin(2.0), 1e-12);
}

TEST(Integrate, RecordsDiagnostics) {
  const auto e = catalog_get("ex1");
  const auto tr = integrate(make_closed_loop(e.system, e.law, e.manifold), {1.0, 1.0});
  ASSERT_EQ(tr.u.size(), tr.size());
  ASSERT_EQ(tr.phi.size(), tr.size());
  EXPECT_DOUBLE_EQ(tr.phi[0], 2.0);
  EXPECT_DOUBLE_EQ(tr.storage[0], 2.0);
  EXPECT_DOUBLE_EQ(tr.u[0], -12.0);  // hand: -(12-4)/2 - 6 - 2
}

TEST(Integrate, ModelMismatch) {
  const auto e = catalog_get("slotine-reg");
  const Point zero{{"th_a", 0}, {"th_b", 0}, {"th_c", 0}, {"th_d", 0}};
  const auto nominal = integrate(make_closed_loop(e.system, e.law, e.manifold), {0.5, -0.5, -0.2});
  const auto mismatched = integrate(make_closed_loop(e.system, e.law, e.manifold, {}, zero), {0.5, -0.5, -0.2});
  EXPECT_NE(nominal.u[1], mismatched.u[1]);
  EXPECT_EQ(nominal.x[0], mismatched.x[0]);
}

TEST(Fit, ExactExponential) {
  std::vector<double> t, s;
  for (int k = 0; k <= 5000; ++k) {
    t.push_back(k * 1e-3);
    s.push_back(std::exp(-2.0 * t.back()));
  }
  const auto f = fit_exponential(t, s);
  EXPECT_NEAR(f.rate, 2.0, 1e-6);
  EXPECT_NEAR(f.amplitude, 1.0, 1e-6);
  EXPECT_THROW(fit_exponential(t, std::vector<double>(t.size(), 0.0)), InsufficientData);
}

TEST(Fit, SynthesizedLoopRate) {
  const auto e = catalog_get("ex1", {{"alpha", 12.0}});
  SimOptions o;
  o.t_end = 3.0;
  const auto tr = integrate(make_closed_loop(e.system, e.law, e.manifold), {1.0, 1.0}, o);
  EXPECT_NEAR(fit_exponential(tr.t, tr.phi).rate, 6.0, 0.01);
  for (std::size_t k = 0; k < tr.size(); ++k)
    EXPECT_NEAR(tr.phi[k], 2.0 * std::exp(-6.0 * tr.t[k]), 1e-5 * 2.0);
}

TEST(Settling, Analytic) {
  const auto tr = decay(1e-3, 10.0);
  const auto st = settling_time(tr.t, tr.column(0), 1e-3);
  ASSERT_TRUE(st);
  EXPECT_NEAR(*st, std::log(1000.0), 1e-3);
  std::vector<double> grow;
  for (double ti : tr.t) grow.push_back(std::exp(ti));
  EXPECT_FALSE(settling_time(tr.t, grow, 1e-3));
}

TEST(Settling, CcmFrozen) {
  const auto e = catalog_get("ccm-3rd-order");
  const auto tr = integrate(make_closed_loop(e.system, e.law, e.manifold), {0.5, 0.5, 0.5});
  const auto st = settling_time(tr.t, distance_series(tr, e.equilibrium), 1e-3);
  ASSERT_TRUE(st);
  EXPECT_NEAR(*st, kCcmSettling, 0.2 * kCcmSettling);
}

TEST(Orbit, SmallPendulum) {
  const double a = 4.0;
  SimOptions o;
  o.t_end = 30.0;
  const auto tr = integrate(make_field({"q", "p"}, {sym("p"), -a * sin(sym("q"))}), {0.01, 0.0}, o);
  const auto orbit = detect_orbit(tr.t, tr.column(0));
  ASSERT_TRUE(orbit.found);
  EXPECT_NEAR(orbit.period, std::numbers::pi, 0.01 * std::numbers::pi);
  EXPECT_NEAR(orbit.amplitude, 0.01, 1e-4);
  EXPECT_LE(orbit.drift, 0.01);
}

TEST(Orbit, ConvergingIsNotAnOrbit) {
  const auto e = catalog_get("ex1");
  const auto tr = integrate(make_closed_loop(e.system, e.law, e.manifold), {1.0, 1.0});
  EXPECT_FALSE(detect_orbit(tr.t, tr.column(0)).found);
  SimOptions o;
  o.t_end = 40.0;
  const auto damped = integrate(make_field({"q", "p"}, {sym("p"), -4 * sym("q") - 0.3 * sym("p")}), {1.0, 0.0}, o);
  EXPECT_FALSE(detect_orbit(damped.t, damped.column(0)).found);
}

TEST(Orbit, InertiaWheelPendulum) {
  const auto e = catalog_get("iwp-orbital");
  const auto tr = integrate(make_closed_loop(e.system, e.law, e.manifold), e.initial_conditions[0]);
  ASSERT_EQ(tr.reason, Termination::Completed);
  const auto orbit = detect_orbit(tr.t, tr.column(0));
  ASSERT_TRUE(orbit.found);
  EXPECT_LE(orbit.drift, 0.01);
  // oracle: the target pendulum alone, released at the observed amplitude
  const auto& tgt = *e.target;
  const auto alone = integrate(make_field(tgt.eta, tgt.beta), {std::numbers::pi + orbit.amplitude, 0.0});
  const auto ref = detect_orbit(alone.t, alone.column(0));
  ASSERT_TRUE(ref.found);
  EXPECT_NEAR(orbit.period, ref.period, 0.01 * ref.period);
  EXPECT_NEAR(orbit.amplitude, ref.amplitude, 0.01 * ref.amplitude);
}

TEST(Analysis, DistanceAndMap) {
  Trajectory tr;
  tr.t = {0.0, 1.0};
  tr.x = {{3.0, 4.0}, {0.0, 1.0}};
  EXPECT_EQ(distance_series(tr, {0.0, 0.0}), (std::vector<double>{5.0, 1.0}));
  const auto m = map_norm_series(tr, {sym("x1") + sym("t")}, {"x1", "x2"}, "t");
  EXPECT_EQ(m, (std::vector<double>{3.0, 1.0}));
}
