#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pisynth/expr.hpp"
#include "pisynth/sysmodel.hpp"

namespace pisynth {

// Zero set of the components; synthesis uses the weighted sum.
struct ImplicitManifold {
  std::vector<Expr> components;
  std::vector<double> weights;  // empty means all ones
};

Expr combine(const ImplicitManifold& m);

// Newton iteration on one coordinate until |phi| <= tol; empty when it stalls.
std::optional<Point> project_onto(const Expr& phi, Point p, const std::string& var,
                                  double tol = 1e-13, int max_iter = 100);

// R = grad(phi) grad(phi)^T, symmetric and of rank one.
struct PRMetric {
  std::vector<std::string> vars;
  std::vector<std::vector<Expr>> m;
  std::vector<std::vector<double>> at(const Point& p) const;
};

PRMetric pr_metric(const Expr& phi, const std::vector<std::string>& vars);

// max_i |grad(psi_i) . x'| under the closed loop at a point of the manifold.
// Throws NotOnManifold when some |psi_i(p)| exceeds on_tol.
double invariance_residual(const ControlAffineSystem& sys, const ControlLaw& law,
                           const ImplicitManifold& m, const Point& p, double on_tol = 1e-9);

// Split w = (x', lambda') of T(X x Lambda) into horizontal and vertical parts
// of the metric connection; the last coordinate is the vertical one.
struct TangentSplit {
  std::vector<double> horizontal;
  std::vector<double> vertical;
  double inner = 0.0;  // H^T R V
};

TangentSplit split_tangent(const PRMetric& r, const std::vector<double>& w, const Point& p);

struct Integrability {
  std::vector<Expr> connection;  // m_nn^{-1} m_{n,j}, j < n
  Expr q;                        // phi / d_n phi - x_n
  Expr output;                   // phi / d_n phi
};

// Requires d phi / d x_n to be a nonzero constant (OrientationError).
// Throws NonIntegrableConnection(i, j) when cross partials disagree.
Integrability integrability_check(const Expr& phi, const std::vector<std::string>& vars,
                                  const Point& params = {});

// Cross-partial test for a row c_j over vars; symbolic first, then 100 samples
// to 1e-8.
void check_connection(const std::vector<Expr>& row, const std::vector<std::string>& vars,
                      const Point& params = {});

// Row c over the two non-driven states with c . x'_rest = x'_driven for every
// u (drift and input columns matched).
std::vector<Expr> forwarding_connection(const ControlAffineSystem& sys, std::size_t driven);

}  // namespace pisynth
