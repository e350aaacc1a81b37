#include "pisynth/synth.hpp"

#include <cmath>

#include "pisynth/sampling.hpp"

namespace pisynth {

namespace {

void require_rate(double alpha) {
  if (!(alpha > 0.0)) throw NonpositiveRate("rate must be positive, got " + std::to_string(alpha));
}

std::vector<Point> generic_samples(const ControlAffineSystem& sys, const std::vector<Expr>& must,
                                   std::uint64_t seed) {
  SampleOptions opt;
  opt.fixed = sys.params;
  opt.must_eval = must;
  std::vector<std::string> vars = sys.states;
  if (!sys.time.empty()) {
    vars.push_back(sys.time);
    opt.ranges[sys.time] = {0.0, 20.0};
  }
  return sample_points(vars, 100, seed, opt);
}

}  // namespace

std::pair<Expr, Expr> lie_derivatives(const ControlAffineSystem& sys, const Expr& phi) {
  const auto a = grad(phi, sys.states);
  std::vector<Expr> lf, lg;
  for (std::size_t i = 0; i < sys.dim(); ++i) {
    lf.push_back(a[i] * sys.f[i]);
    lg.push_back(a[i] * sys.g[i]);
  }
  if (!sys.time.empty()) lf.push_back(diff(phi, sys.time));
  return {simplify(sum(std::move(lf))), simplify(sum(std::move(lg)))};
}

PassiveOutput passive_output(const Expr& phi, const std::vector<std::string>& vars,
                             const Point& params) {
  auto ic = integrability_check(phi, vars, params);
  return {ic.output, ic.q, vars.back()};
}

Expr storage(const Expr& y, double alpha) {
  require_rate(alpha);
  return Expr(0.5) * pow(y, 2);
}

ControlLaw synthesize(const ControlAffineSystem& sys, const Expr& phi, double alpha) {
  require_rate(alpha);
  for (const auto& s : free_symbols(phi))
    if (!sys.knows(s)) throw SymbolMismatch(s);
  auto [lf, lg] = lie_derivatives(sys, phi);
  if (lg.is_const(0.0)) throw UnactuatedManifold("L_g phi vanishes identically");
  {
    const auto pts = generic_samples(sys, {lg}, 0x5eed0001ULL);
    if (vanishes_at(lg, pts, 1e-12)) throw UnactuatedManifold("L_g phi vanishes at every sample");
  }
  ControlLaw law;
  const Expr num = lf + Expr(alpha / 2.0) * phi;
  law.u = simplify(lg.is_const(1.0) ? -num : -num / lg);
  law.guard = lg;
  law.provenance = Provenance::GenericPI;
  law.output_rate = alpha / 2.0;
  return law;
}

CrossTerm verify_cross_term(const Expr& f1, const Expr& f2, const Expr& mu, const std::string& var,
                            const Point& fixed) {
  CrossTerm r;
  r.residual = simplify(f1 - diff(mu, var) * f2);
  if (r.residual.is_const(0.0)) {
    r.pass = true;
    return r;
  }
  std::vector<std::string> vars;
  for (const auto& s : free_symbols(r.residual))
    if (!fixed.count(s)) vars.push_back(s);
  SampleOptions opt;
  opt.fixed = fixed;
  opt.must_eval = {r.residual};
  const auto pts = sample_points(vars, 100, 0x5eed0002ULL, opt);
  r.pass = vanishes_at(r.residual, pts, 1e-9, &r.witness);
  return r;
}

ControlLaw synthesize_feedforward(const ControlAffineSystem& sys, const Expr& mu, double alpha,
                                  const Expr& inner) {
  require_rate(alpha);
  if (sys.dim() != 2) throw SynthesisError("feedforward form needs two states");
  const std::string& x1 = sys.states[0];
  const std::string& x2 = sys.states[1];
  if (depends_on(mu, x1)) throw SynthesisError("mu must not depend on " + x1);
  const Expr f1 = simplify(sys.f[0] + sys.g[0] * inner);
  const Expr f2 = simplify(sys.f[1] + sys.g[1] * inner);
  const auto ct = verify_cross_term(f1, f2, mu, x2, sys.params);
  if (!ct.pass) {
    std::string at;
    for (const auto& [k, v] : ct.witness) at += " " + k + "=" + std::to_string(v);
    throw SynthesisError("cross-term condition fails at" + at);
  }
  const Expr dmu = diff(mu, x2);
  const Expr lg = simplify(sys.g[0] - dmu * sys.g[1]);
  if (lg.is_const(0.0)) throw UnactuatedManifold("mu'(x2) g2 - g1 vanishes identically");
  const Expr phi = sym(x1) - mu;
  const Expr v = -(simplify(f1 - dmu * f2) + Expr(alpha) * phi) / lg;
  ControlLaw law;
  law.u = simplify(inner + v);
  law.guard = lg;
  law.provenance = Provenance::Feedforward;
  law.output_rate = alpha;
  return law;
}

VirtualStep backstep(const ControlAffineSystem& sys, const Expr& phi, double alpha,
                     const std::string& input_state) {
  require_rate(alpha);
  if (depends_on(phi, input_state))
    throw SynthesisError("manifold already depends on " + input_state);
  const auto [lf, lg] = lie_derivatives(sys, phi);
  if (!lg.is_const(0.0)) {
    const auto pts = generic_samples(sys, {lg}, 0x5eed0003ULL);
    if (!vanishes_at(lg, pts, 1e-12)) throw SynthesisError("input reaches the manifold before " + input_state);
  }
  const Expr e = simplify(lf + Expr(alpha / 2.0) * phi);
  VirtualStep s;
  s.gain = diff(e, input_state);
  if (depends_on(s.gain, input_state)) throw SynthesisError("stage is not affine in " + input_state);
  s.offset = simplify(substitute(e, {{input_state, Expr(0.0)}}));
  if (s.gain.is_const(0.0)) throw UnactuatedManifold(input_state + " does not reach the manifold");
  s.law = simplify(-s.offset / s.gain);
  s.normalized = simplify(sym(input_state) - s.law);
  s.cleared = simplify(s.gain * sym(input_state) + s.offset);
  return s;
}

ControlLaw synthesize_forwarding(const ControlAffineSystem& sys, std::size_t driven, double alpha) {
  require_rate(alpha);
  const auto row = forwarding_connection(sys, driven);
  std::vector<std::string> rest;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < sys.dim(); ++i)
    if (i != driven) {
      rest.push_back(sys.states[i]);
      idx.push_back(i);
    }
  try {
    check_connection(row, rest, sys.params);
  } catch (const NonIntegrableConnection& e) {
    throw NonIntegrableConnection(idx[e.i], idx[e.j]);
  }
  throw SynthesisError("connection is integrable but has no closed-form primitive here; "
                       "supply mu to synthesize_feedforward");
}

}  // namespace pisynth
