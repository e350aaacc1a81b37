#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pisynth/cli/acceptance.hpp"
#include "pisynth/compiled.hpp"
#include "pisynth/expr.hpp"

using namespace pisynth;

namespace {

const Expr x1 = sym("x1"), x2 = sym("x2"), x3 = sym("x3"), th = sym("th_a");

double at(const Expr& e, const Point& p) { return eval(e, p); }

// Numeric equality at a spread of points, the oracle for symbolic rewrites.
void expect_same_function(const Expr& a, const Expr& b, const std::vector<std::string>& vars,
                          std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 50; ++k) {
    Point p;
    for (const auto& v : vars) p[v] = u(rng);
    const double va = eval(a, p), vb = eval(b, p);
    ASSERT_NEAR(va, vb, 1e-10 * std::max({1.0, std::abs(va), std::abs(vb)}))
        << to_string(a) << " vs " << to_string(b);
  }
}

}  // namespace

TEST(Eval, Polynomials) {
  EXPECT_EQ(at(x2 + pow(x1, 2), {{"x1", 2}, {"x2", 1}}), 5.0);
  EXPECT_EQ(at(sin(x1), {{"x1", 0}}), 0.0);
  EXPECT_EQ(at(th * pow(x1, 3) * x2, {{"x1", 1}, {"x2", 1}, {"th_a", 2}}), 2.0);
}

TEST(Eval, Errors) {
  EXPECT_THROW(eval(x1 + x2, {{"x1", 1}}), UnboundSymbol);
  EXPECT_THROW(eval(ln(x1), {{"x1", -1}}), DomainError);
  EXPECT_THROW(eval(sqrt(x1), {{"x1", -1}}), DomainError);
  EXPECT_THROW(eval(Expr(1.0) / x1, {{"x1", 0}}), DomainError);
}

TEST(Diff, Rules) {
  EXPECT_EQ(simplify(diff(x2 + pow(x1, 2), "x1")), simplify(2 * x1));
  EXPECT_EQ(simplify(diff(sin(x1), "x1")), cos(x1));
  EXPECT_EQ(simplify(diff(th * pow(x1, 3) * x2, "x1")), simplify(3 * th * pow(x1, 2) * x2));
  EXPECT_TRUE(simplify(diff(x2, "x1")).is_const(0.0));
}

TEST(Grad, Examples) {
  auto g = grad(x2 + pow(x1, 2), {"x1", "x2"});
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(simplify(g[0]), simplify(2 * x1));
  EXPECT_TRUE(simplify(g[1]).is_const(1.0));
  for (const auto& d : grad(x1 + x2 + x3, {"x1", "x2", "x3"})) EXPECT_TRUE(simplify(d).is_const(1.0));
  EXPECT_TRUE(simplify(grad(Expr(3.0), {"x1"})[0]).is_const(0.0));
}

TEST(Simplify, Identities) {
  EXPECT_EQ(simplify(0 * x1 + x2), x2);
  EXPECT_EQ(simplify(x1 + 0), x1);
  EXPECT_EQ(simplify(1 * (x1 * 1)), x1);
  EXPECT_TRUE(simplify(x1 - x1).is_const(0.0));
  EXPECT_EQ(simplify(x1 + x1), simplify(2 * x1));
}

TEST(Simplify, PreservesValue) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> vars{"x1", "x2", "x3"};
  for (int k = 0; k < 300; ++k) {
    const Expr e = cli::random_expression(rng, vars, 3);
    expect_same_function(e, simplify(e), vars, k);
  }
}

TEST(Parse, Basics) {
  const Expr e = parse("-x1 + th_a*x1^3*x2");
  expect_same_function(e, -x1 + th * pow(x1, 3) * x2, {"x1", "x2", "th_a"});
  const Expr s = parse("sin(x1)");
  EXPECT_EQ(s.kind(), Kind::Func);
  EXPECT_EQ(s.fn(), Fn::Sin);
  EXPECT_THROW(parse("x1 +* x2"), SyntaxError);
  EXPECT_THROW(parse("sin(x1"), SyntaxError);
  EXPECT_THROW(parse(""), SyntaxError);
}

TEST(Parse, PrintRoundTrip) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> vars{"x1", "x2", "x3"};
  for (int k = 0; k < 300; ++k) {
    const Expr e = simplify(cli::random_expression(rng, vars, 3));
    const Expr back = parse(to_string(e));
    expect_same_function(e, back, vars, k);
    EXPECT_EQ(to_string(simplify(back)), to_string(e));
  }
}

TEST(Substitute, BindAndReplace) {
  const Expr e = th * x1;
  EXPECT_EQ(bind_values(e, {}), e);
  EXPECT_DOUBLE_EQ(eval(bind_values(e, {{"th_a", 35.5391}}), {{"x1", 1.0}}), 35.5391);
  const Expr r = substitute(pow(x1, 2) + x2, {{"x1", x2 + 1}});
  expect_same_function(r, pow(x2 + 1, 2) + x2, {"x2"});
  EXPECT_EQ(free_symbols(th * x1 + x3), (std::set<std::string>{"th_a", "x1", "x3"}));
  EXPECT_TRUE(depends_on(th * x1, "th_a"));
  EXPECT_FALSE(depends_on(th * x1, "x2"));
}

TEST(Compiled, MatchesEval) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const std::vector<std::string> vars{"x1", "x2", "x3"};
  for (int k = 0; k < 200; ++k) {
    const Expr e = cli::random_expression(rng, vars, 4);
    const Compiled c(e, vars);
    std::vector<double> x{u(rng), u(rng), u(rng)};
    const double ref = eval(e, {{"x1", x[0]}, {"x2", x[1]}, {"x3", x[2]}});
    EXPECT_NEAR(c(x), ref, 1e-12 * std::max(1.0, std::abs(ref)));
  }
  EXPECT_THROW(Compiled(x1 + th, {"x1"}), UnboundSymbol);
}

TEST(Gradient, FiniteDifferenceAgreement) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const std::vector<std::string> vars{"x1", "x2", "x3"};
  for (int k = 0; k < 200; ++k) {
    const Expr e = cli::random_expression(rng, vars, 3);
    const auto g = grad(e, vars);
    Point p{{"x1", u(rng)}, {"x2", u(rng)}, {"x3", u(rng)}};
    for (std::size_t i = 0; i < 3; ++i) {
      const double h = 1e-5;
      Point a = p, b = p;
      a[vars[i]] += h;
      b[vars[i]] -= h;
      const double fd = (eval(e, a) - eval(e, b)) / (2 * h);
      const double sy = eval(g[i], p);
      EXPECT_LE(std::abs(fd - sy) / std::max({1.0, std::abs(fd), std::abs(sy)}), 1e-5) << to_string(e);
    }
  }
}
