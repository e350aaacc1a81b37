#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pisynth/errors.hpp"

namespace pisynth {

enum class Kind { Const, Symbol, Func, Power, Quotient, Product, Sum, Neg };
enum class Fn { Sin, Cos, Tan, Tanh, Exp, Ln, Sqrt };

const char* fn_name(Fn f);

struct Node;

// Immutable, shared expression tree. Copies are cheap.
// Constructors flatten nested sums/products, fold constants and drop
// identities; simplify() additionally collects like terms and orders operands.
class Expr {
 public:
  Expr();                 // the constant 0
  Expr(double c);         // NOLINT implicit on purpose: 2*x, x+1
  Expr(int c) : Expr(static_cast<double>(c)) {}  // NOLINT

  static Expr symbol(std::string name);
  static Expr constant(double c) { return Expr(c); }

  Kind kind() const;
  double value() const;              // Const only
  const std::string& name() const;   // Symbol only
  int exponent() const;              // Power only
  Fn fn() const;                     // Func only
  const std::vector<Expr>& operands() const;
  const Expr& operand(std::size_t i) const { return operands()[i]; }

  bool is_const() const { return kind() == Kind::Const; }
  bool is_const(double v) const { return is_const() && value() == v; }
  bool is_symbol() const { return kind() == Kind::Symbol; }

  std::size_t hash() const;
  std::uint64_t symbol_mask() const;
  std::size_t size() const;  // node count

  const Node* raw() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
  friend struct Build;
};

using Point = std::map<std::string, double>;
using Substitution = std::map<std::string, Expr>;

Expr sym(std::string name);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr pow(const Expr& base, int k);
Expr func(Fn f, const Expr& arg);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);
Expr tanh(const Expr& a);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sqrt(const Expr& a);

// Structural total order and equality (same tree up to construction).
int compare(const Expr& a, const Expr& b);
bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

double eval(const Expr& e, const Point& at);
Expr diff(const Expr& e, std::string_view var);
std::vector<Expr> grad(const Expr& e, const std::vector<std::string>& vars);
Expr simplify(const Expr& e);
Expr substitute(const Expr& e, const Substitution& s);
Expr bind_values(const Expr& e, const Point& values);  // symbols -> constants

std::set<std::string> free_symbols(const Expr& e);
bool depends_on(const Expr& e, std::string_view var);

std::string to_string(const Expr& e);
Expr parse(std::string_view text);

}  // namespace pisynth
