#pragma once

#include <string>
#include <vector>

#include "pisynth/expr.hpp"
#include "pisynth/sampling.hpp"
#include "pisynth/sysmodel.hpp"

namespace pisynth {

// x_m' = gamma_m(x_1..x_m) + vartheta_m x_{m+1},  m < n
// x_n' = gamma_n(x)         + lambda(x) u
struct PsfSystem {
  std::vector<std::string> states;
  std::vector<Expr> gamma;     // n entries
  std::vector<Expr> vartheta;  // n-1 nonzero gains, constant up to parameters
  Expr lambda;
  Point params;

  ControlAffineSystem system() const;
};

void validate(const PsfSystem& p);

struct PsfSynthesis {
  std::vector<double> alphas;
  std::vector<Expr> b;    // b_1..b_n
  std::vector<Expr> phi;  // phi_1..phi_{n-1}
  ControlLaw law;
};

// Throws ZeroGain for a vanishing vartheta. The law's guard is lambda.
PsfSynthesis synthesize_psf(const PsfSystem& p, const std::vector<double>& alphas);

// zeta_1 = x_1, zeta_m = x_m - phi_{m-1}
std::vector<Expr> transform(const PsfSystem& p, const PsfSynthesis& s);

// Largest scaled residual |zeta_m' - target_m| / max(1, |zeta_m'|, |target_m|)
// over sampled points, with target_m = -(alpha_m/2) zeta_m + vartheta_m zeta_{m+1}.
double verify_triangular(const PsfSystem& p, const PsfSynthesis& s, std::size_t samples = 200,
                         std::uint64_t seed = 0x7a1aULL, const SampleOptions& opt = {});

// z' = f(z) + g1(z) x1 + g2(z) x2,  x1' = x2,  x2' = u
struct NontriangularSystem {
  std::vector<std::string> z;
  std::string x1 = "x1";
  std::string x2 = "x2";
  std::vector<Expr> f, g1, g2;
  Point params;

  ControlAffineSystem system() const;
};

struct NontriangularSynthesis {
  Expr psi1;    // x1 - sigma1
  Expr denom;   // 1 - L_g2 sigma1
  Expr sigma2;
  Expr psi2;    // M (x2 - sigma2), M = 1 / denom
  ControlLaw law;
};

// Throws ConnectionSingular when 1 - L_g2 sigma1 vanishes on the samples.
NontriangularSynthesis synthesize_nontriangular(const NontriangularSystem& sys, const Expr& sigma1,
                                                double alpha1, double alpha2);

}  // namespace pisynth
