#pragma once

#include <string>
#include <vector>

#include "pisynth/expr.hpp"

namespace pisynth {

// x' = f(x) + g(x) u, single input.
struct ControlAffineSystem {
  std::vector<std::string> states;
  std::vector<Expr> f;
  std::vector<Expr> g;
  Point params;        // symbolic parameters with nominal values
  std::string time;    // name of the time symbol, empty when autonomous

  static ControlAffineSystem make(std::vector<std::string> states, std::vector<Expr> f,
                                  std::vector<Expr> g, Point params = {},
                                  std::string time = {});

  std::size_t dim() const { return states.size(); }
  // states, then parameter names, then the time symbol if any
  std::vector<std::string> symbols() const;
  bool knows(const std::string& name) const;
  std::size_t index_of(const std::string& state) const;
};

// Throws InvalidSystem on length mismatch, empty state, duplicate names or
// free symbols outside states/params/time.
void validate(const ControlAffineSystem& sys);

// Replaces parameter symbols by constants (missing entries fall back to the
// nominal values); the result carries no parameters.
ControlAffineSystem bind_params(const ControlAffineSystem& sys, const Point& values = {});
Expr substitute_params(const Expr& e, const Point& params);

enum class Provenance { GenericPI, Psf, Feedforward, Nontriangular, CatalogReference };
const char* to_string(Provenance p);

struct ControlLaw {
  Expr u;
  Expr guard;                 // u is singular where guard vanishes
  Provenance provenance = Provenance::GenericPI;
  double output_rate = 0.0;   // designed decay: phi(t) = phi(0) exp(-output_rate t)
};

// f + g u; throws SymbolMismatch if u uses symbols unknown to sys.
std::vector<Expr> closed_loop(const ControlAffineSystem& sys, const ControlLaw& law);

// eta' = beta(eta), x = pi(eta), with dim eta < dim x.
struct TargetDynamics {
  std::vector<std::string> eta;
  std::vector<Expr> beta;
  std::vector<Expr> pi;
};

void validate(const TargetDynamics& t, const ControlAffineSystem& sys);

}  // namespace pisynth
