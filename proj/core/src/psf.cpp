#include "pisynth/psf.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pisynth/synth.hpp"

namespace pisynth {

ControlAffineSystem PsfSystem::system() const {
  validate(*this);
  const std::size_t n = states.size();
  std::vector<Expr> f, g;
  for (std::size_t m = 0; m < n; ++m) {
    f.push_back(m + 1 < n ? simplify(gamma[m] + vartheta[m] * sym(states[m + 1])) : gamma[m]);
    g.push_back(m + 1 < n ? Expr(0.0) : lambda);
  }
  return ControlAffineSystem::make(states, f, g, params);
}

void validate(const PsfSystem& p) {
  const std::size_t n = p.states.size();
  if (n < 1) throw InvalidSystem("no states");
  if (p.gamma.size() != n) throw InvalidSystem("one gamma per state required");
  if (p.vartheta.size() + 1 != n) throw InvalidSystem("n-1 gains required");
  std::set<std::string> allowed;
  for (const auto& [k, _] : p.params) allowed.insert(k);
  for (std::size_t m = 0; m < n; ++m) {
    allowed.insert(p.states[m]);
    for (const auto& s : free_symbols(p.gamma[m]))
      if (!allowed.count(s))
        throw InvalidSystem("gamma_" + std::to_string(m + 1) + " depends on '" + s + "'");
  }
  for (std::size_t m = 0; m + 1 < n; ++m)
    for (const auto& s : free_symbols(p.vartheta[m]))
      if (!p.params.count(s)) throw InvalidSystem("gain vartheta_" + std::to_string(m + 1) + " is not constant");
}

PsfSynthesis synthesize_psf(const PsfSystem& p, const std::vector<double>& alphas) {
  validate(p);
  const std::size_t n = p.states.size();
  if (alphas.size() != n) throw SynthesisError("one rate per state required");
  for (double a : alphas)
    if (!(a > 0.0)) throw NonpositiveRate("rates must be positive");
  for (std::size_t m = 0; m + 1 < n; ++m) {
    const double v = eval(p.vartheta[m], p.params);
    if (!(std::abs(v) > 1e-12)) throw ZeroGain(m);
  }
  auto x = [&](std::size_t m) { return sym(p.states[m]); };
  // Omega_j = gamma_j + vartheta_j x_{j+1}, only rows below the current stage are used
  std::vector<Expr> omega;
  for (std::size_t j = 0; j + 1 < n; ++j) omega.push_back(simplify(p.gamma[j] + p.vartheta[j] * x(j + 1)));

  PsfSynthesis s;
  s.alphas = alphas;
  Expr prev = Expr(0.0);  // phi_{m-1}
  for (std::size_t m = 0; m < n; ++m) {
    std::vector<Expr> terms{Expr(alphas[m] / 2.0) * (x(m) - prev)};
    for (std::size_t j = 0; j < m; ++j) terms.push_back(-(diff(prev, p.states[j]) * omega[j]));
    Expr bm = simplify(sum(std::move(terms)));
    if (depends_on(bm, "u")) throw SynthesisError("b_m picked up the input");
    s.b.push_back(bm);
    if (m + 1 < n) {
      prev = simplify(-(p.gamma[m] + bm) / p.vartheta[m]);
      s.phi.push_back(prev);
    }
  }
  s.law.u = simplify(-(p.gamma[n - 1] + s.b[n - 1]) / p.lambda);
  s.law.guard = p.lambda;
  s.law.provenance = Provenance::Psf;
  s.law.output_rate = alphas[n - 1] / 2.0;
  return s;
}

std::vector<Expr> transform(const PsfSystem& p, const PsfSynthesis& s) {
  std::vector<Expr> z{sym(p.states[0])};
  for (std::size_t m = 1; m < p.states.size(); ++m) z.push_back(simplify(sym(p.states[m]) - s.phi[m - 1]));
  return z;
}

double verify_triangular(const PsfSystem& p, const PsfSynthesis& s, std::size_t samples,
                         std::uint64_t seed, const SampleOptions& opt) {
  const std::size_t n = p.states.size();
  const auto sys = p.system();
  const auto field = closed_loop(sys, s.law);
  const auto z = transform(p, s);
  std::vector<std::vector<Expr>> dz;
  for (const auto& zm : z) dz.push_back(grad(zm, p.states));

  SampleOptions o = opt;
  for (const auto& [k, v] : p.params)
    if (!o.fixed.count(k)) o.fixed[k] = v;
  o.must_eval.push_back(s.law.u);
  o.guards.push_back(p.lambda);
  const auto pts = sample_points(p.states, samples, seed, o);

  double worst = 0.0;
  for (const auto& pt : pts) {
    std::vector<double> xdot, zv;
    for (const auto& f : field) xdot.push_back(eval(f, pt));
    for (const auto& zm : z) zv.push_back(eval(zm, pt));
    for (std::size_t m = 0; m < n; ++m) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) lhs += eval(dz[m][j], pt) * xdot[j];
      double rhs = -s.alphas[m] / 2.0 * zv[m];
      if (m + 1 < n) rhs += eval(p.vartheta[m], pt) * zv[m + 1];
      const double r = std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
      worst = std::max(worst, std::isnan(r) ? INFINITY : r);
    }
  }
  return worst;
}

ControlAffineSystem NontriangularSystem::system() const {
  const std::size_t k = z.size();
  if (f.size() != k || g1.size() != k || g2.size() != k)
    throw InvalidSystem("f, g1, g2 need one entry per z");
  std::vector<std::string> states = z;
  states.push_back(x1);
  states.push_back(x2);
  std::vector<Expr> ff, gg;
  for (std::size_t i = 0; i < k; ++i) {
    ff.push_back(simplify(f[i] + g1[i] * sym(x1) + g2[i] * sym(x2)));
    gg.push_back(Expr(0.0));
  }
  ff.push_back(sym(x2));
  gg.push_back(Expr(0.0));
  ff.push_back(Expr(0.0));
  gg.push_back(Expr(1.0));
  return ControlAffineSystem::make(states, ff, gg, params);
}

NontriangularSynthesis synthesize_nontriangular(const NontriangularSystem& ns, const Expr& sigma1,
                                                double alpha1, double alpha2) {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw NonpositiveRate("rates must be positive");
  const auto sys = ns.system();
  for (const auto& s : free_symbols(sigma1))
    if (std::find(ns.z.begin(), ns.z.end(), s) == ns.z.end() && !ns.params.count(s))
      throw SynthesisError("sigma1 may depend on z only");
  const auto ds = grad(sigma1, ns.z);
  std::vector<Expr> lf, lg1, lg2;
  for (std::size_t i = 0; i < ns.z.size(); ++i) {
    lf.push_back(ds[i] * ns.f[i]);
    lg1.push_back(ds[i] * ns.g1[i]);
    lg2.push_back(ds[i] * ns.g2[i]);
  }
  const Expr Lf = simplify(sum(lf));
  const Expr Lg1 = simplify(sum(lg1));
  NontriangularSynthesis out;
  out.denom = simplify(Expr(1.0) - sum(lg2));
  {
    SampleOptions opt;
    opt.fixed = ns.params;
    const auto pts = sample_points(ns.z, 100, 0x5eed0004ULL, opt);
    for (const auto& pt : pts)
      if (!(std::abs(eval(out.denom, pt)) >= 1e-9))
        throw ConnectionSingular("1 - L_g2 sigma1 vanishes");
  }
  const Expr x1 = sym(ns.x1);
  const Expr x2 = sym(ns.x2);
  out.psi1 = simplify(x1 - sigma1);
  out.sigma2 = simplify((Lf + x1 * Lg1 - Expr(alpha1 / 2.0) * out.psi1) / out.denom);
  out.psi2 = simplify((x2 - out.sigma2) / out.denom);
  out.law = synthesize(sys, out.psi2, alpha2);
  out.law.guard = out.denom;
  out.law.provenance = Provenance::Nontriangular;
  return out;
}

}  // namespace pisynth
