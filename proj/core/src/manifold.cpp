#include "pisynth/manifold.hpp"

#include <cmath>

#include "pisynth/sampling.hpp"

namespace pisynth {

Expr combine(const ImplicitManifold& m) {
  if (m.components.empty()) throw Error("manifold has no components");
  if (!m.weights.empty() && m.weights.size() != m.components.size())
    throw Error("one weight per component required");
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < m.components.size(); ++i)
    terms.push_back(m.weights.empty() ? m.components[i] : m.weights[i] * m.components[i]);
  return simplify(sum(std::move(terms)));
}

PRMetric pr_metric(const Expr& phi, const std::vector<std::string>& vars) {
  const auto a = grad(phi, vars);
  PRMetric r;
  r.vars = vars;
  r.m.assign(vars.size(), std::vector<Expr>(vars.size()));
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i; j < vars.size(); ++j) {
      r.m[i][j] = simplify(a[i] * a[j]);
      r.m[j][i] = r.m[i][j];
    }
  return r;
}

std::vector<std::vector<double>> PRMetric::at(const Point& p) const {
  std::vector<std::vector<double>> out(m.size(), std::vector<double>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out[i][j] = eval(m[i][j], p);
  return out;
}

double invariance_residual(const ControlAffineSystem& sys, const ControlLaw& law,
                           const ImplicitManifold& m, const Point& p, double on_tol) {
  for (std::size_t i = 0; i < m.components.size(); ++i) {
    const double v = eval(m.components[i], p);
    if (!(std::abs(v) <= on_tol))
      throw NotOnManifold("component " + std::to_string(i + 1) + " is " + std::to_string(v));
  }
  const auto field = closed_loop(sys, law);
  std::vector<double> xdot;
  for (const auto& f : field) xdot.push_back(eval(f, p));
  double worst = 0.0;
  for (const auto& psi : m.components) {
    double r = 0.0;
    for (std::size_t j = 0; j < sys.dim(); ++j) r += eval(diff(psi, sys.states[j]), p) * xdot[j];
    if (!sys.time.empty()) r += eval(diff(psi, sys.time), p);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

std::optional<Point> project_onto(const Expr& phi, Point p, const std::string& var, double tol,
                                  int max_iter) {
  const Expr d = diff(phi, var);
  for (int k = 0; k < max_iter; ++k) {
    double v, dv;
    try {
      v = eval(phi, p);
      if (std::abs(v) <= tol) return p;
      dv = eval(d, p);
    } catch (const DomainError&) {
      return std::nullopt;
    }
    if (!std::isfinite(v) || !(std::abs(dv) > 1e-14)) return std::nullopt;
    p[var] -= v / dv;
  }
  return std::nullopt;
}

TangentSplit split_tangent(const PRMetric& r, const std::vector<double>& w, const Point& p) {
  const std::size_t n = r.m.size();
  if (w.size() != n) throw Error("tangent vector has wrong length");
  const auto m = r.at(p);
  const double mnn = m[n - 1][n - 1];
  if (!(std::abs(mnn) >= 1e-12)) throw DegenerateMetric("m_nn vanishes at this point");
  double coupling = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) coupling += m[n - 1][j] * w[j];
  TangentSplit s;
  s.horizontal.assign(w.begin(), w.end());
  s.horizontal[n - 1] = -coupling / mnn;
  s.vertical.assign(n, 0.0);
  s.vertical[n - 1] = w[n - 1] + coupling / mnn;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s.inner += s.horizontal[i] * m[i][j] * s.vertical[j];
  return s;
}

void check_connection(const std::vector<Expr>& row, const std::vector<std::string>& vars,
                      const Point& params) {
  if (row.size() != vars.size()) throw Error("connection row and variables differ in length");
  std::vector<std::string> sample_vars = vars;
  std::vector<Expr> defect;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i + 1; j < vars.size(); ++j) {
      Expr dij = simplify(diff(row[i], vars[j]) - diff(row[j], vars[i]));
      if (dij.is_const(0.0)) continue;
      defect.push_back(dij);
      pairs.emplace_back(i, j);
    }
  if (defect.empty()) return;
  // collect every free symbol that is not bound by params
  std::set<std::string> extra;
  for (const auto& e : row)
    for (const auto& s : free_symbols(e))
      if (!params.count(s)) extra.insert(s);
  sample_vars.assign(extra.begin(), extra.end());
  SampleOptions opt;
  opt.fixed = params;
  opt.must_eval = defect;
  const auto pts = sample_points(sample_vars, 100, 0x1ce5eedULL, opt);
  for (std::size_t k = 0; k < defect.size(); ++k)
    if (!vanishes_at(defect[k], pts, 1e-8)) throw NonIntegrableConnection(pairs[k].first, pairs[k].second);
}

Integrability integrability_check(const Expr& phi, const std::vector<std::string>& vars,
                                  const Point& params) {
  const std::size_t n = vars.size();
  if (n == 0) throw Error("no variables");
  const auto a = grad(phi, vars);
  const Expr an = simplify(bind_values(a[n - 1], params));
  if (!an.is_const() || an.value() == 0.0)
    throw OrientationError("d phi / d " + vars[n - 1] + " must be a nonzero constant, got " +
                           to_string(an));
  Integrability out;
  std::vector<std::string> horiz(vars.begin(), vars.end() - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) out.connection.push_back(simplify(a[j] / an));
  check_connection(out.connection, horiz, params);
  out.output = simplify(phi / an);
  out.q = simplify(out.output - sym(vars[n - 1]));
  return out;
}

std::vector<Expr> forwarding_connection(const ControlAffineSystem& sys, std::size_t driven) {
  if (sys.dim() != 3) throw Error("forwarding connection needs exactly two non-driven states");
  if (driven >= sys.dim()) throw Error("driven index out of range");
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < sys.dim(); ++i)
    if (i != driven) rest.push_back(i);
  const Expr& f1 = sys.f[rest[0]];
  const Expr& f2 = sys.f[rest[1]];
  const Expr& g1 = sys.g[rest[0]];
  const Expr& g2 = sys.g[rest[1]];
  const Expr det = simplify(f1 * g2 - f2 * g1);
  if (det.is_const(0.0)) throw DegenerateMetric("drift and input columns are dependent");
  return {simplify((sys.f[driven] * g2 - f2 * sys.g[driven]) / det),
          simplify((f1 * sys.g[driven] - sys.f[driven] * g1) / det)};
}

}  // namespace pisynth
