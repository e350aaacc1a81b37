#pragma once

#include <span>
#include <string>
#include <vector>

#include "pisynth/expr.hpp"

namespace pisynth {

// Flat postfix program for fast repeated evaluation of an Expr against a
// fixed slot layout (symbol i reads slot i). Domain checks match eval().
class Compiled {
 public:
  Compiled() = default;
  Compiled(const Expr& e, const std::vector<std::string>& slots);

  double operator()(std::span<const double> x) const;

  std::size_t instructions() const { return code_.size(); }

 private:
  enum class Op : unsigned char { Const, Slot, Add, Mul, Pow, Neg, Div, Func };
  struct Ins {
    Op op;
    Fn fn;
    int arg;        // slot index, operand count or exponent
    double value;
  };
  void emit(const Expr& e, const std::vector<std::string>& slots, int depth);

  std::vector<Ins> code_;
  int max_depth_ = 0;
};

// Several expressions sharing one slot layout.
class CompiledVector {
 public:
  CompiledVector() = default;
  CompiledVector(const std::vector<Expr>& es, const std::vector<std::string>& slots);

  void operator()(std::span<const double> x, std::span<double> out) const;
  std::vector<double> operator()(std::span<const double> x) const;
  std::size_t size() const { return items_.size(); }
  const Compiled& operator[](std::size_t i) const { return items_[i]; }

 private:
  std::vector<Compiled> items_;
};

}  // namespace pisynth
