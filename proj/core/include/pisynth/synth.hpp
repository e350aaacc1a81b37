#pragma once

#include <string>
#include <vector>

#include "pisynth/expr.hpp"
#include "pisynth/manifold.hpp"
#include "pisynth/sysmodel.hpp"

namespace pisynth {

struct PassiveOutput {
  Expr y;               // passive output, equal to phi when d phi / d x_n = 1
  Expr q;               // y - x_n
  std::string vertical; // x_n
};

PassiveOutput passive_output(const Expr& phi, const std::vector<std::string>& vars,
                             const Point& params = {});

// S = y^2 / 2; alpha is the design rate for S' = -alpha S.
Expr storage(const Expr& y, double alpha);

// u = -(L_f phi + (alpha/2) phi) / L_g phi, so that phi' = -(alpha/2) phi.
// A time symbol in sys contributes d phi / dt to L_f phi.
ControlLaw synthesize(const ControlAffineSystem& sys, const Expr& phi, double alpha);

struct CrossTerm {
  bool pass = false;
  Expr residual;   // f1 - mu'(x2) f2
  Point witness;   // where it fails
};

CrossTerm verify_cross_term(const Expr& f1, const Expr& f2, const Expr& mu, const std::string& var,
                            const Point& fixed = {});

// Two-state system (x1 driven, x2 actuated), manifold x1 - mu(x2), optional
// inner loop u = inner + v. Here alpha is the decay rate of x1 - mu itself:
// v = -(f1 - mu' f2 + alpha (x1 - mu)) / (g1 - mu' g2).
ControlLaw synthesize_feedforward(const ControlAffineSystem& sys, const Expr& mu, double alpha,
                                  const Expr& inner = Expr(0.0));

// One backstepping stage: phi over the leading states, input_state treated as
// the input of that subsystem. phi' + (alpha/2) phi = gain * input + offset.
struct VirtualStep {
  Expr law;         // -offset / gain
  Expr gain;
  Expr offset;
  Expr normalized;  // input - law
  Expr cleared;     // gain * input + offset
};

VirtualStep backstep(const ControlAffineSystem& sys, const Expr& phi, double alpha,
                     const std::string& input_state);

// Upper-triangular systems with u in every row: builds the connection of
// forwarding_connection and checks it. Throws NonIntegrableConnection (state
// indices) or SynthesisError when no primitive is available.
ControlLaw synthesize_forwarding(const ControlAffineSystem& sys, std::size_t driven, double alpha);

// L_f phi (with the time derivative if any) and L_g phi, simplified.
std::pair<Expr, Expr> lie_derivatives(const ControlAffineSystem& sys, const Expr& phi);

}  // namespace pisynth
