#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pisynth/expr.hpp"

namespace pisynth {

struct Node {
  Kind kind = Kind::Const;
  double value = 0.0;
  std::string name;
  int exponent = 0;
  Fn fn = Fn::Sin;
  std::vector<Expr> ops;
  std::size_t hash = 0;
  std::uint64_t mask = 0;
  std::size_t size = 1;
};

// Raw node factory; no normalisation beyond what the caller already did.
struct Build {
  static Expr make(Node n);
};

}  // namespace pisynth
