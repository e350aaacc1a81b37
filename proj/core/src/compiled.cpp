#include "pisynth/compiled.hpp"

#include <algorithm>
#include <cmath>

namespace pisynth {

Compiled::Compiled(const Expr& e, const std::vector<std::string>& slots) { emit(e, slots, 1); }

void Compiled::emit(const Expr& e, const std::vector<std::string>& slots, int depth) {
  max_depth_ = std::max(max_depth_, depth);
  switch (e.kind()) {
    case Kind::Const:
      code_.push_back({Op::Const, Fn::Sin, 0, e.value()});
      return;
    case Kind::Symbol: {
      auto it = std::find(slots.begin(), slots.end(), e.name());
      if (it == slots.end()) throw UnboundSymbol(e.name());
      code_.push_back({Op::Slot, Fn::Sin, static_cast<int>(it - slots.begin()), 0.0});
      return;
    }
    case Kind::Sum:
    case Kind::Product: {
      int d = depth;
      for (const auto& op : e.operands()) emit(op, slots, d++);
      code_.push_back({e.kind() == Kind::Sum ? Op::Add : Op::Mul, Fn::Sin,
                       static_cast<int>(e.operands().size()), 0.0});
      return;
    }
    case Kind::Power:
      emit(e.operand(0), slots, depth);
      code_.push_back({Op::Pow, Fn::Sin, e.exponent(), 0.0});
      return;
    case Kind::Neg:
      emit(e.operand(0), slots, depth);
      code_.push_back({Op::Neg, Fn::Sin, 0, 0.0});
      return;
    case Kind::Quotient:
      emit(e.operand(0), slots, depth);
      emit(e.operand(1), slots, depth + 1);
      code_.push_back({Op::Div, Fn::Sin, 0, 0.0});
      return;
    case Kind::Func:
      emit(e.operand(0), slots, depth);
      code_.push_back({Op::Func, e.fn(), 0, 0.0});
      return;
  }
}

double Compiled::operator()(std::span<const double> x) const {
  thread_local std::vector<double> stack;
  if (stack.size() < static_cast<std::size_t>(max_depth_) + 1) stack.resize(max_depth_ + 1);
  double* sp = stack.data();  // points one past the top
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Const: *sp++ = in.value; break;
      case Op::Slot: *sp++ = x[in.arg]; break;
      case Op::Add: {
        double s = 0.0;
        for (int i = in.arg; i > 0; --i) s += sp[-i];
        sp -= in.arg;
        *sp++ = s;
        break;
      }
      case Op::Mul: {
        double p = 1.0;
        for (int i = in.arg; i > 0; --i) p *= sp[-i];
        sp -= in.arg;
        *sp++ = p;
        break;
      }
      case Op::Pow:
        if (sp[-1] == 0.0 && in.arg < 0) throw DomainError("negative power of zero");
        sp[-1] = std::pow(sp[-1], in.arg);
        break;
      case Op::Neg: sp[-1] = -sp[-1]; break;
      case Op::Div:
        if (sp[-1] == 0.0) throw DomainError("division by zero");
        sp[-2] /= sp[-1];
        --sp;
        break;
      case Op::Func: {
        double& v = sp[-1];
        switch (in.fn) {
          case Fn::Sin: v = std::sin(v); break;
          case Fn::Cos: v = std::cos(v); break;
          case Fn::Tan: v = std::tan(v); break;
          case Fn::Tanh: v = std::tanh(v); break;
          case Fn::Exp: v = std::exp(v); break;
          case Fn::Ln:
            if (!(v > 0.0)) throw DomainError("ln of nonpositive value");
            v = std::log(v);
            break;
          case Fn::Sqrt:
            if (v < 0.0) throw DomainError("sqrt of negative value");
            v = std::sqrt(v);
            break;
        }
        break;
      }
    }
  }
  return sp[-1];
}

CompiledVector::CompiledVector(const std::vector<Expr>& es, const std::vector<std::string>& slots) {
  items_.reserve(es.size());
  for (const auto& e : es) items_.emplace_back(e, slots);
}

void CompiledVector::operator()(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < items_.size(); ++i) out[i] = items_[i](x);
}

std::vector<double> CompiledVector::operator()(std::span<const double> x) const {
  std::vector<double> out(items_.size());
  (*this)(x, out);
  return out;
}

}  // namespace pisynth
