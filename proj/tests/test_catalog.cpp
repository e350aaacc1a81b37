#include <gtest/gtest.h>

#include <set>

#include "pisynth/catalog.hpp"

using namespace pisynth;

TEST(Catalog, Ids) {
  const auto ids = catalog_ids();
  EXPECT_GE(ids.size(), 14u);
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), ids.size());
  for (const char* id : {"ex1", "w2-case1", "w2-case2", "w2-alt", "w3", "integrator-chain", "maglev",
                         "dc-motor", "ccm-3rd-order", "slotine-reg", "slotine-track", "ff-simple",
                         "iwp-orbital"})
    EXPECT_NE(std::find(ids.begin(), ids.end(), id), ids.end()) << id;
}

TEST(Catalog, Lookup) {
  const auto e = catalog_get("ex1");
  EXPECT_EQ(e.system.dim(), 2u);
  EXPECT_TRUE(e.system.params.count("th_a"));
  EXPECT_THROW(catalog_get("nope"), UnknownId);
  EXPECT_THROW(catalog_get("ex1", {{"nonsense", 1.0}}), Error);
  EXPECT_DOUBLE_EQ(catalog_get("maglev").system.params.at("m_b"), 3.0);
  EXPECT_DOUBLE_EQ(catalog_get("maglev").system.params.at("g0"), 9.81);
  EXPECT_DOUBLE_EQ(catalog_get("dc-motor").system.params.at("th_a"), 35.5391);
}

TEST(Catalog, DesignOverridesReachTheLaw) {
  const auto a = catalog_get("ex1", {{"alpha", 4.0}});
  EXPECT_DOUBLE_EQ(a.law.output_rate, 2.0);
  EXPECT_DOUBLE_EQ(catalog_design("ex1").at("alpha"), 12.0);
  EXPECT_THROW(catalog_get("ex1", {{"alpha", -1.0}}), NonpositiveRate);
}

TEST(Catalog, ReferencesMatchSynthesis) {
  for (const auto& id : catalog_ids()) {
    const auto e = catalog_get(id);
    if (!e.reference) continue;
    EXPECT_LE(compare_law(e, *e.reference, 300, 3).max_rel, 1e-9) << id;
  }
}

TEST(Catalog, CcmPrintedVariantDiffers) {
  const auto e = catalog_get("ccm-3rd-order");
  bool found = false;
  for (const auto& v : e.variants)
    if (v.name == "as-printed") {
      found = true;
      const auto d = compare_law(e, v.u, 300, 3);
      EXPECT_GT(d.max_rel, 1e-3);
    }
  EXPECT_TRUE(found);
}

TEST(Catalog, EntriesAreWellFormed) {
  for (const auto& id : catalog_ids()) {
    const auto e = catalog_get(id);
    SCOPED_TRACE(id);
    EXPECT_FALSE(e.summary.empty());
    EXPECT_FALSE(e.initial_conditions.empty());
    EXPECT_FALSE(e.manifold.components.empty());
    EXPECT_GT(e.law.output_rate, 0.0);
    EXPECT_EQ(e.equilibrium.size(), e.system.dim());
    for (const auto& x0 : e.initial_conditions) EXPECT_EQ(x0.size(), e.system.dim());
    for (const auto& s : free_symbols(e.law.u)) EXPECT_TRUE(e.system.knows(s)) << s;
    if (e.behavior == Behavior::ZetaDecay) EXPECT_FALSE(e.zeta.empty());
    if (e.psf) EXPECT_TRUE(e.psf_synthesis.has_value());
  }
}

TEST(Catalog, ConvergenceFromListedStarts) {
  for (const auto& id : catalog_ids()) {
    const auto e = catalog_get(id);
    const bool converging = e.behavior == Behavior::GasToOrigin || e.behavior == Behavior::GesToOrigin ||
                            e.behavior == Behavior::ZetaDecay;
    if (!converging || e.slow_zero_dynamics) continue;
    SimOptions o;
    o.t_end = 20.0;
    const auto cl = make_closed_loop(e.system, e.law, e.manifold);
    for (const auto& x0 : e.initial_conditions) {
      const auto tr = integrate(cl, x0, o);
      ASSERT_EQ(tr.reason, Termination::Completed) << id;
      EXPECT_LE(error_series(e, tr).back(), 1e-3) << id;
    }
  }
}

TEST(Catalog, SlowZeroDynamicsStillDecay) {
  const auto e = catalog_get("ff-simple");
  ASSERT_TRUE(e.slow_zero_dynamics);
  const auto tr = integrate(make_closed_loop(e.system, e.law, e.manifold), e.initial_conditions[0]);
  const auto err = error_series(e, tr);
  EXPECT_LT(err.back(), err.front());
  EXPECT_LE(std::abs(tr.phi.back()), 1e-6);
}

TEST(Catalog, TrackingReferenceIsConfigurable) {
  const auto e = catalog_get("slotine-track", {{"xd_amp", 0.0}});
  const auto tr = integrate(make_closed_loop(e.system, e.law, e.manifold), {0.5, -0.5, -0.2});
  ASSERT_EQ(tr.reason, Termination::Completed);
  EXPECT_LE(error_series(e, tr).back(), 1e-3);
}

TEST(Catalog, RobustnessSets) {
  EXPECT_EQ(catalog_get("slotine-reg").controller_variants.size(), 3u);
  EXPECT_EQ(catalog_get("slotine-track").controller_variants.size(), 3u);
}

TEST(Catalog, UpperTriangularExample) {
  const auto s = upper_triangular_example();
  EXPECT_EQ(s.dim(), 3u);
  for (const auto& g : s.g) EXPECT_FALSE(g.is_const(0.0));
}
