#include <charconv>
#include <string>

#include "pisynth/expr.hpp"

namespace pisynth {

namespace {

std::string number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int prec(const Expr& e) {
  switch (e.kind()) {
    case Kind::Sum: return 1;
    case Kind::Product:
    case Kind::Quotient: return 2;
    case Kind::Neg: return 3;
    case Kind::Power: return 4;
    case Kind::Const: return e.value() < 0.0 ? 3 : 5;
    default: return 5;
  }
}

bool negative_term(const Expr& e) {
  switch (e.kind()) {
    case Kind::Neg: return true;
    case Kind::Const: return e.value() < 0.0;
    case Kind::Product: return e.operand(0).is_const() && e.operand(0).value() < 0.0;
    case Kind::Quotient: return negative_term(e.operand(0));
    default: return false;
  }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Kind::Const: out += number(e.value()); return;
    case Kind::Symbol: out += e.name(); return;
    case Kind::Func:
      out += fn_name(e.fn());
      out += '(';
      print(e.operand(0), out);
      out += ')';
      return;
    case Kind::Neg:
      out += '-';
      print_wrapped(e.operand(0), prec(e.operand(0)) < 4, out);
      return;
    case Kind::Power:
      print_wrapped(e.operand(0), prec(e.operand(0)) < 5, out);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    case Kind::Quotient:
      print_wrapped(e.operand(0), prec(e.operand(0)) < 2, out);
      out += '/';
      print_wrapped(e.operand(1), prec(e.operand(1)) <= 3, out);
      return;
    case Kind::Product: {
      bool first = true;
      for (const auto& f : e.operands()) {
        if (!first) out += '*';
        const int p = prec(f);
        const bool wrap = p < 2 || f.kind() == Kind::Quotient || (!first && p < 4);
        print_wrapped(f, wrap, out);
        first = false;
      }
      return;
    }
    case Kind::Sum: {
      bool first = true;
      for (const auto& t : e.operands()) {
        if (first) {
          print_wrapped(t, prec(t) < 2, out);
        } else if (negative_term(t)) {
          out += " - ";
          const Expr n = t.kind() == Kind::Quotient ? (-t.operand(0)) / t.operand(1) : -t;
          print_wrapped(n, prec(n) < 2, out);
        } else {
          out += " + ";
          print_wrapped(t, prec(t) < 2, out);
        }
        first = false;
      }
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

}  // namespace pisynth
