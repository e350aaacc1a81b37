#include "pisynth/catalog.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "pisynth/synth.hpp"

namespace pisynth {

const char* to_string(Behavior b) {
  switch (b) {
    case Behavior::GesToOrigin: return "GES-to-origin";
    case Behavior::GasToOrigin: return "GAS-to-origin";
    case Behavior::ZetaDecay: return "zeta-decay";
    case Behavior::Tracking: return "tracking";
    case Behavior::PeriodicOrbit: return "periodic-orbit";
    case Behavior::KnownSingularity: return "known-singularity";
  }
  return "?";
}

namespace {

// Parses and binds the design constants; plant parameters stay symbolic.
struct Ctx {
  Point d;
  double operator[](const std::string& k) const { return d.at(k); }
  Expr operator()(const std::string& s) const { return simplify(bind_values(parse(s), d)); }
  std::vector<Expr> operator()(std::initializer_list<const char*> rows) const {
    std::vector<Expr> out;
    for (const char* r : rows) out.push_back((*this)(r));
    return out;
  }
};

const std::vector<std::string> kX2{"x1", "x2"};
const std::vector<std::string> kX3{"x1", "x2", "x3"};
const std::vector<std::string> kX4{"x1", "x2", "x3", "x4"};

ControlAffineSystem make_sys(const Ctx& c, const std::vector<std::string>& x,
                             std::initializer_list<const char*> f,
                             std::initializer_list<const char*> g, Point params = {},
                             std::string time = {}) {
  return ControlAffineSystem::make(x, c(f), c(g), std::move(params), std::move(time));
}

void box(CatalogEntry& e, double lo, double hi) {
  for (const auto& s : e.system.states) e.ranges[s] = {lo, hi};
}

void generic(CatalogEntry& e, const Expr& phi, double alpha) {
  e.manifold = {{phi}, {}};
  e.law = synthesize(e.system, phi, alpha);
}

void from_psf(CatalogEntry& e, PsfSystem p, const std::vector<double>& alphas) {
  e.system = p.system();
  auto s = synthesize_psf(p, alphas);
  e.zeta = transform(p, s);
  e.manifold = {{e.zeta.back()}, {}};
  e.law = s.law;
  e.psf = std::move(p);
  e.psf_synthesis = std::move(s);
  e.behavior = Behavior::ZetaDecay;
}

const Point kSlotine{{"th_a", -0.3}, {"th_b", -0.8}, {"th_c", -0.25}, {"th_d", -0.75}};
const std::vector<Point> kSlotineController{
    {{"th_a", 0.0}, {"th_b", 0.0}, {"th_c", 0.0}, {"th_d", 0.0}},
    {{"th_a", -2.0}, {"th_b", -3.0}, {"th_c", -4.0}, {"th_d", -6.0}},
    {{"th_a", 1.0}, {"th_b", 2.0}, {"th_c", 3.0}, {"th_d", 4.0}},
};

using Builder = std::function<void(CatalogEntry&, const Ctx&)>;

struct Spec {
  const char* id;
  Point design;
  Builder build;
};

const char* kW2f = "-x1 + x1^2 + x1*x2";

const std::vector<Spec>& specs() {
  static const std::vector<Spec> s{
      {"ex1", {{"alpha", 12.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "planar system x1' = -x1 + th_a x1^3 x2, x2' = u; manifold x2 + x1^2";
         e.system = make_sys(c, kX2, {"-x1 + th_a*x1^3*x2", "0"}, {"0", "1"}, {{"th_a", 1.0}});
         generic(e, c("x2 + x1^2"), c["alpha"]);
         e.reference = c("-(alpha - 4)/2*x1^2 - alpha/2*x2 - 2*th_a*x1^4*x2");
         e.initial_conditions = {{1, 1}, {-1.5, 0.5}, {0.5, -2}};
         e.behavior = Behavior::GasToOrigin;
         e.target = TargetDynamics{{"eta"}, {c("-eta - th_a*eta^5")}, {c("eta"), c("-eta^2")}};
         box(e, -2, 2);
       }},
      {"w2-case1", {{"alpha2", 8.0}, {"alpha", 12.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "academic third-order example, first-order target, Psi1 = x1 + x2";
         e.system = make_sys(c, kX3, {kW2f, "x3", "0"}, {"0", "0", "1"});
         const Expr psi1 = c("x1 + x2");
         const auto st = backstep(e.system, psi1, c["alpha2"], "x3");
         generic(e, st.normalized, c["alpha"]);
         e.manifold.components = {st.normalized};
         e.zeta = {c("x1"), psi1, st.normalized};
         e.reference = c(
             "-((-x1 + x1^2 + x1*x2)*(-1 + 2*x1 + x2 + alpha2/2) + x3*(x1 + alpha2/2)"
             " + alpha/2*(x3 - x1 + x1^2 + x1*x2 + alpha2/2*(x1 + x2)))");
         e.initial_conditions = {{0.5, 0.5, 0.5}, {-1, 1, -1}, {1, -1, 2}};
         e.behavior = Behavior::GasToOrigin;
         box(e, -2, 2);
       }},
      {"w2-case2", {{"alpha2", 8.0}, {"alpha", 12.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "academic example with Psi1 = x1 (x1 + x2); law singular on x1 = 0";
         e.system = make_sys(c, kX3, {kW2f, "x3", "0"}, {"0", "0", "1"});
         const Expr psi1 = c("x1*(x1 + x2)");
         const auto st = backstep(e.system, psi1, c["alpha2"], "x3");
         generic(e, st.cleared, c["alpha"]);
         e.zeta = {c("x1"), psi1, st.cleared};
         e.variants.push_back(
             {"as-printed",
              c("-1/x1*((-4*x1 + 6*x1^2 + 4*x1*x2 - x2 + 2*x1*x2 + x3 + alpha2/2*(2*x1 + x3))"
                "*(-x1 + x1^2 + x1*x2) + (2*x1^2 - x1 + x1^2 + alpha2/2*x1)*x3)"
                " - 1/x1*(-2*x1^2 + 2*x1^3 + 2*x1^2*x2 - x2*x1 + x2*x1^2 + x2^2*x1 + x1*x3"
                " + alpha/2*(x1^2 + x1*x2))"),
              "printed closed form; does not reproduce the stated zeta dynamics"});
         // the first two reach x1 = 0; the third stays in x1 < 0 and converges
         e.initial_conditions = {{0.5, -3, 0}, {1, -3, 0}, {-0.5, 3, 0}};
         e.behavior = Behavior::KnownSingularity;
         box(e, -2, 2);
       }},
      {"w2-alt", {{"alpha2", 20.0}, {"alpha", 10.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "academic example, second-order target, Phi = Psi1 + Psi2";
         e.system = make_sys(c, kX3, {kW2f, "x3", "0"}, {"0", "0", "1"});
         e.manifold = {{c("x1 + x2"), c("x3 + alpha2/2*x2")}, {}};
         e.law = synthesize(e.system, combine(e.manifold), c["alpha"]);
         e.reference = c(
             "x1 - x1^2 - x1*x2 - (1 + alpha2/2)*x3 - alpha/2*(x1 + (1 + alpha2/2)*x2 + x3)");
         // (1, 1, 1) and (2, -1, 0.5) escape: x1' = x1 (x1 + x2 - 1) outruns the manifold
         e.initial_conditions = {{0.5, 0.5, 0.5}, {-1, 2, -2}, {-1, -1, 1}};
         e.behavior = Behavior::GasToOrigin;
         box(e, -2, 2);
       }},
      {"w2-offmanifold-coords", {{"alpha", 2.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "academic example closed with Phi = Psi2 + x1 Psi1, Psi = (x1 + x2, x2 + x3)";
         e.system = make_sys(c, kX3, {kW2f, "x3", "0"}, {"0", "0", "1"});
         e.manifold = {{c("x2 + x3 + x1*(x1 + x2)")}, {}};
         e.law = synthesize(e.system, e.manifold.components[0], c["alpha"]);
         // Psi-coordinate form: Psi1' = -Psi1 + x1 Psi1 + Psi2, Psi2' = Psi2 - Psi1 + x1 + u
         const char* p1 = "(x1 + x2)";
         const char* p2 = "(x2 + x3)";
         auto sub = [&](std::string s) {
           for (auto [k, v] : {std::pair{"P1", p1}, std::pair{"P2", p2}}) {
             std::size_t i = 0;
             while ((i = s.find(k)) != std::string::npos) s.replace(i, 2, v);
           }
           return s;
         };
         e.reference = c(sub("-(P2 - P1 + x1 - 2*x1*P1 + 2*x1^2*P1 + x1*x2*P1 + x1*P2"
                             " + alpha/2*(P2 + x1*P1))"));
         e.variants.push_back(
             {"as-printed",
              c(sub("-(P2 - P1 - 2*x1*P1 + 2*x1^2*P1 + x1*x2*P1 + x1*P2 + alpha/2*(P2 + x1*P1))")),
              "drops the x1 term of Psi2'"});
         e.variants.push_back(
             {"comparison-law",
              c("5/2*x1^3 - 3*x1^2*x2 - x1*x2^2/2 + x1^2 - x1*x3 - x1 - 2*x2 - 2*x3"),
              "virtual-contraction design"});
         e.initial_conditions = {{0.5, 0.5, 0.5}, {-1, 1, 0}, {0.3, -0.6, 0.4}};
         e.behavior = Behavior::GasToOrigin;
         box(e, -1.5, 1.5);
       }},
      {"w3", {{"alpha", 2.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "unstructured system, Phi = x1 + x2 + x3";
         e.system = make_sys(c, kX3, {"-x1 + x1^2 + x1*x2 + x1*x3", "x3", "-x3"}, {"0", "0", "1"});
         e.manifold = {{c("x1"), c("x2 + x3")}, {}};
         e.law = synthesize(e.system, combine(e.manifold), c["alpha"]);
         // the contraction-based comparison law, stated for alpha = 2 only
         if (c["alpha"] == 2.0) e.reference = c("-x2 - x1*x2 - x1*x3 - x3 - x1^2");
         e.variants.push_back({"as-printed",
                               c("x3 - alpha/2*(x1 + x3 + x2) + x1 - x1^2 - x1*x2 - x1*x3"),
                               "carries an extra +x3 relative to the synthesized law"});
         e.initial_conditions = {{1, 1, 1}, {-1, 0.5, -0.5}, {0.5, -1, 2}};
         e.behavior = Behavior::GasToOrigin;
         e.target = TargetDynamics{{"eta"}, {c("-eta")}, {c("0"), c("eta"), c("-eta")}};
         box(e, -2, 2);
       }},
      {"integrator-chain", {{"alpha1", 12.0}, {"alpha2", 12.0}, {"alpha3", 4.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "x1' = -x1^3 + x2 followed by two integrators";
         PsfSystem p{kX3, c({"-x1^3", "0", "0"}), c({"1", "1"}), c("1"), {}};
         from_psf(e, std::move(p), {c["alpha1"], c["alpha2"], c["alpha3"]});
         e.reference = c(
             "-(alpha3/2*(x3 + (alpha1/2 - 3*x1^2)*(-x1^3 + x2) + alpha2/2*(x2 - x1^3 + alpha1/2*x1))"
             " + (alpha1/2 - 3*x1^2)*(-3*x1^2*(-x1^3 + x2) + x3)"
             " + (-x1^3 + x2)*(-6*x1*(-x1^3 + x2))"
             " + alpha2/2*(x3 + (alpha1/2 - 3*x1^2)*(-x1^3 + x2)))");
         e.initial_conditions = {{1, 1, 1}, {-1, 2, -2}, {0.5, -1, 3}};
         e.equilibrium = {0, 0, 0};
         box(e, -2, 2);
       }},
      {"maglev", {{"alpha1", 2.0}, {"alpha2", 2.0}, {"alpha3", 2.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "magnetic levitation: position, momentum, squared flux linkage";
         PsfSystem p{kX3,
                     c({"0", "-m_b*g0", "-2*R_c/c_c*(1 - x1)*x3"}),
                     c({"1/m_b", "1/(2*c_c)"}),
                     c("2*sqrt(x3)"),
                     {{"m_b", 3.0}, {"g0", 9.81}, {"R_c", 10.0}, {"c_c", 2.0}}};
         from_psf(e, std::move(p), {c["alpha1"], c["alpha2"], c["alpha3"]});
         e.reference = c(
             "-1/(2*sqrt(x3))*(-2*R_c/c_c*(1 - x1)*x3 + 2*c_c*x2 + 4*c_c*(x3/(2*c_c) - m_b*g0)"
             " + (x3 - 2*c_c*m_b*g0 + 2*c_c*x2 + 2*c_c*(x2 + m_b*x1)))");
         e.initial_conditions = {{0.5, 0, 100}, {-0.3, 0.2, 150}, {0.2, -0.3, 117.72}};
         e.equilibrium = {0, 0, 117.72};
         e.ranges = {{"x1", {-2, 2}}, {"x2", {-2, 2}}, {"x3", {0.1, 200}}};
       }},
      {"dc-motor", {{"alpha1", 4.0}, {"alpha2", 4.0}, {"alpha3", 4.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "DC motor driving a manipulator arm with load";
         PsfSystem p{kX3,
                     c({"0", "-th_a*sin(x1) - th_b*x2", "-th_c*x2 - th_d*x3"}),
                     c({"1", "1"}),
                     c("1"),
                     {{"th_a", 35.5391}, {"th_b", 0.2821}, {"th_c", 2.3112}, {"th_d", 3.11e3}}};
         from_psf(e, std::move(p), {c["alpha1"], c["alpha2"], c["alpha3"]});
         e.reference = c(
             "-(-th_c*x2 - th_d*x3"
             " + alpha3/2*(x3 - th_a*sin(x1) - th_b*x2 + alpha1/2*x2 + alpha2/2*(x2 + alpha1/2*x1))"
             " + x2*(-th_a*cos(x1) + alpha1*alpha2/4)"
             " + (x3 - th_a*sin(x1) - th_b*x2)*(-th_b + alpha1/2 + alpha2/2))");
         e.initial_conditions = {{1, 0, 0}, {-1, 1, 10}, {0.5, -0.5, -5}};
         e.equilibrium = {0, 0, 0};
         box(e, -2, 2);
       }},
      {"ccm-3rd-order", {{"alpha1", 2.0}, {"alpha2", 10.0}, {"alpha", 20.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "third-order system that is not feedback linearizable";
         e.system = make_sys(c, kX3, {"-x1 + x3", "x1^2 - x2 - 2*x1*x3 + x3", "-x2"},
                             {"0", "0", "1"});
         e.manifold = {{c("alpha1*x1 + x3"), c("x2 - alpha2*x3")}, {}};
         e.law = synthesize(e.system, combine(e.manifold), c["alpha"]);
         e.reference = c(
             "-1/(1 - alpha2)*(alpha1*(-x1 + x3) + (x1^2 - x2 - 2*x1*x3 + x3) - (1 - alpha2)*x2"
             " + alpha/2*(alpha1*x1 + x2 + (1 - alpha2)*x3))");
         e.variants.push_back(
             {"as-printed",
              c("-1/(1 - alpha2)*(alpha1*(-x1 + x3) + (x1^2 - x2 - 2*x1*x3 + x3) - x2"
                " + alpha/2*(alpha1*x1 + x2 + (1 - alpha2)*x3))"),
              "bare -x2 where the x3 row contributes (1 - alpha2)(-x2)"});
         e.initial_conditions = {{0.5, 0.5, 0.5}, {9, 9, 9}};
         e.behavior = Behavior::GasToOrigin;
         box(e, -10, 10);
       }},
      {"slotine-reg", {{"alpha1", 10.0}, {"alpha2", 0.1}, {"alpha", 20.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "contracting system with tanh, regulation";
         e.system = make_sys(c, kX3,
                             {"x3 - th_a*x1", "-th_b*x1^2 - x2", "tanh(x2) - th_c*x3 - th_d*x1^2"},
                             {"0", "0", "1"}, kSlotine);
         e.manifold = {{c("alpha1*x1 + x3"), c("x1^2 - alpha2*x2")}, {}};
         e.law = synthesize(e.system, combine(e.manifold), c["alpha"]);
         e.reference = c(
             "-(tanh(x2) - th_c*x3 - th_d*x1^2 + (alpha1 + 2*x1)*(x3 - th_a*x1)"
             " - alpha2*(-th_b*x1^2 - x2) + alpha/2*(alpha1*x1 + x3 + x1^2 - alpha2*x2))");
         e.initial_conditions = {{0.5, -0.5, -0.2}, {-1, 0.5, 1}};
         e.behavior = Behavior::GasToOrigin;
         e.controller_variants = kSlotineController;
         box(e, -2, 2);
       }},
      {"slotine-track",
       {{"alpha1", 200.0}, {"alpha2", 0.1}, {"alpha", 2.0}, {"xd_amp", 0.5}, {"xd_freq", 0.5}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "contracting system with tanh, tracking x1d = xd_amp sin(xd_freq t)";
         e.system = make_sys(c, kX3,
                             {"x3 - th_a*x1", "-th_b*x1^2 - x2", "tanh(x2) - th_c*x3 - th_d*x1^2"},
                             {"0", "0", "1"}, kSlotine, "t");
         const char* xd = "xd_amp*sin(xd_freq*t)";
         const char* xd1 = "xd_amp*xd_freq*cos(xd_freq*t)";
         const char* xd2 = "(-xd_amp*xd_freq^2*sin(xd_freq*t))";
         const std::string a = std::string("x3 - th_a*") + xd + " - " + xd1 + " + alpha1*(x1 - " + xd + ")";
         e.manifold = {{c(a), c("x1^2 - alpha2*x2")}, {}};
         e.law = synthesize(e.system, combine(e.manifold), c["alpha"]);
         e.reference = c(
             std::string("-(tanh(x2) - th_c*x3 - th_d*x1^2 + (alpha1 + 2*x1)*(x3 - th_a*x1)"
                         " - alpha2*(-th_b*x1^2 - x2) - (th_a + alpha1)*") +
             xd1 + " - " + xd2 + " + alpha/2*(" + a + " + x1^2 - alpha2*x2))");
         e.variants.push_back(
             {"as-printed",
              c("-(tanh(x2) - th_c*x3 - th_d)*x1^2 + (alpha1 + 2*x1)*(x3 - th_a*x1)"
                " - alpha2*(-th_b*x1^2 - x2) + alpha/2*(alpha1*x1 + x3 + x1^2 - alpha2*x2)"),
              "regulation law with shifted parentheses; no reference terms"});
         e.tracking_error = c(std::string("x1 - ") + xd);
         e.initial_conditions = {{0.5, -0.5, -0.2}};
         e.behavior = Behavior::Tracking;
         e.controller_variants = kSlotineController;
         box(e, -2, 2);
         e.ranges["t"] = {0, 20};
       }},
      {"ff-simple", {{"alpha", 1.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "feedforward x1' = x2^3, x2' = -x2^3 + (1 + x2^2) u; mu = -x2";
         e.system = make_sys(c, kX2, {"x2^3", "-x2^3"}, {"0", "1 + x2^2"});
         e.manifold = {{c("x1 + x2")}, {}};
         e.law = synthesize_feedforward(e.system, c("-x2"), c["alpha"]);
         e.reference = c("-1/(1 + x2^2)*(alpha*(x1 + x2))");
         e.initial_conditions = {{1, -0.5}, {-1, 1}};
         e.behavior = Behavior::GasToOrigin;
         e.slow_zero_dynamics = true;  // x2' = -x2^3 on the manifold
         box(e, -2, 2);
       }},
      {"ff-sepulchre", {{"alpha", 1.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "strict feedforward x1' = x2 - x2^2 u, x2' = u; manifold x1 + x2 + x2^3/3";
         e.system = make_sys(c, kX2, {"x2", "0"}, {"-x2^2", "1"});
         e.manifold = {{c("x1 + x2 + x2^3/3")}, {}};
         e.law = synthesize_feedforward(e.system, c("-x2 - x2^3/3"), c["alpha"], c("-x2"));
         e.reference = c("-x2 - alpha*(x1 + x2 + x2^3/3)");
         e.variants.push_back({"as-printed", c("-x2 - x2 - (x1 + x2 + x2^3/3)"),
                               "Lyapunov redesign with an extra -x2"});
         e.variants.push_back({"uncorrected-manifold", c("-x2 - alpha*(x1 + x2 + x2^3)"),
                               "same structure on x1 + x2 + x2^3"});
         e.initial_conditions = {{1, 1}, {-2, 0.5}};
         e.behavior = Behavior::GasToOrigin;
         box(e, -2, 2);
       }},
      {"interlaced", {{"alpha", 2.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "third-order interlaced system, composite forwarding/backstepping manifold";
         e.system = make_sys(c, kX3, {"x2 + x2*x3", "x3 + x2^2", "x1*x2*x3"}, {"0", "0", "1"});
         const Expr w = c("x1 + x2 - x2^2/2 - x2^3/3");
         e.manifold = {{c("x3 + x2 + x2^2 + (1 - x2^2)*(x1 + x2 - x2^2/2 - x2^3/3)")}, {}};
         e.law = synthesize(e.system, e.manifold.components[0], c["alpha"]);
         // printed composite law with x1', x2' written out and the alpha/2 bracket closed
         const std::string d1 = "(x2 + x2*x3)";
         const std::string d2 = "(x3 + x2^2)";
         const std::string W = "(x1 + x2 - x2^2/2 - x2^3/3)";
         e.reference = c("-x1*x2*x3 - (" + d2 + " + 2*x2*" + d2 + " + (" + d1 + " + " + d2 +
                         " - x2*" + d2 + " - x2^2*" + d2 + ")*(1 - x2^2) + " + W + "*(-2*x2*" +
                         d2 + ") + alpha/2*(x3 + x2 + x2^2 + (1 - x2^2)*" + W + "))");
         e.zeta = {w};
         e.initial_conditions = {{0.2, 0.2, 0.2}, {-0.3, 0.1, 0.2}};
         e.behavior = Behavior::GasToOrigin;
         box(e, -1.5, 1.5);
       }},
      {"iwp-orbital", {{"k", 0.5}, {"b", 1.0}, {"th_m", 9.81}, {"alpha", 10.0}},
       [](CatalogEntry& e, const Ctx& c) {
         e.summary = "inertia wheel pendulum, oscillation induced on x2 = k x1";
         e.system = make_sys(c, kX4, {"x3", "x4", "th_m*sin(x1)", "0"}, {"0", "0", "-b", "1"},
                             {{"b", c["b"]}, {"th_m", c["th_m"]}});
         e.manifold = {{c("x2 - k*x1"), c("x4 - k*x3")}, {}};
         e.law = synthesize(e.system, combine(e.manifold), c["alpha"]);
         e.reference =
             c("-1/(1 + k*b)*(x4 - k*x3 - k*th_m*sin(x1) + alpha/2*(x2 - k*x1 + x4 - k*x3))");
         // on the manifold x1'' = th_m sin(x1) / (1 + k b): a pendulum about x1 = pi
         e.design["a"] = -c["th_m"] / (1.0 + c["k"] * c["b"]);
         Ctx tc{{{"a", e.design["a"]}, {"k", c["k"]}}};
         e.target = TargetDynamics{{"xi1", "xi2"},
                                   {tc("xi2"), tc("-a*sin(xi1)")},
                                   {tc("xi1"), tc("k*xi1"), tc("xi2"), tc("k*xi2")}};
         e.initial_conditions = {{std::numbers::pi + 0.3, 0, 0, 0}};
         e.behavior = Behavior::PeriodicOrbit;
         e.t_end = 20.0;
         box(e, -4, 4);
       }},
  };
  return s;
}

}  // namespace

std::vector<std::string> catalog_ids() {
  std::vector<std::string> out;
  for (const auto& s : specs()) out.emplace_back(s.id);
  return out;
}

Point catalog_design(const std::string& id) {
  for (const auto& s : specs())
    if (id == s.id) return s.design;
  throw UnknownId(id);
}

CatalogEntry catalog_get(const std::string& id, const Point& design_overrides) {
  for (const auto& s : specs()) {
    if (id != s.id) continue;
    Ctx c{s.design};
    for (const auto& [k, v] : design_overrides) {
      if (!c.d.count(k)) throw Error("entry '" + id + "' has no design constant '" + k + "'");
      c.d[k] = v;
    }
    CatalogEntry e;
    e.id = s.id;
    e.design = c.d;
    s.build(e, c);
    if (e.equilibrium.empty()) e.equilibrium.assign(e.system.dim(), 0.0);
    return e;
  }
  throw UnknownId(id);
}

ControlAffineSystem upper_triangular_example() {
  return ControlAffineSystem::make(kX3, {parse("x2 + x3^2"), parse("x3"), Expr(0.0)},
                                   {parse("x2"), parse("-x3^2"), Expr(1.0)});
}

std::vector<Point> sample_domain(const CatalogEntry& e, std::size_t n, std::uint64_t seed,
                                 double guard_margin) {
  std::vector<std::string> vars = e.system.states;
  if (!e.system.time.empty()) vars.push_back(e.system.time);
  SampleOptions so;
  so.ranges = e.ranges;
  so.fixed = e.system.params;
  so.guards = {e.law.guard};
  so.must_eval = {e.law.u};
  so.margin = guard_margin;
  return sample_points(vars, n, seed, so);
}

PointwiseDiff compare_law(const CatalogEntry& e, const Expr& u, std::size_t n, std::uint64_t seed) {
  return pointwise_diff(e.law.u, u, sample_domain(e, n, seed));
}

std::vector<double> error_series(const CatalogEntry& e, const Trajectory& tr,
                                 const Point& plant_params) {
  Point params = e.system.params;
  for (const auto& [k, v] : plant_params) params[k] = v;
  auto bound = [&](const Expr& x) { return bind_values(x, params); };
  switch (e.behavior) {
    case Behavior::ZetaDecay: {
      std::vector<Expr> z;
      for (const auto& q : e.zeta) z.push_back(bound(q));
      return map_norm_series(tr, z, e.system.states, e.system.time);
    }
    case Behavior::Tracking:
      return map_norm_series(tr, {bound(e.tracking_error)}, e.system.states, e.system.time);
    default:
      return distance_series(tr, e.equilibrium);
  }
}

}  // namespace pisynth
