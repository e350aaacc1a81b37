#include "pisynth/expr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "detail/node.hpp"

namespace pisynth {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::uint64_t symbol_bit(const std::string& name) {
  return std::uint64_t{1} << (std::hash<std::string>{}(name) % 64);
}

const Expr& zero() {
  static const Expr z(0.0);
  return z;
}

}  // namespace

Expr Build::make(Node n) {
  std::size_t h = std::hash<int>{}(static_cast<int>(n.kind));
  switch (n.kind) {
    case Kind::Const:
      h = mix(h, std::hash<double>{}(n.value == 0.0 ? 0.0 : n.value));
      break;
    case Kind::Symbol:
      h = mix(h, std::hash<std::string>{}(n.name));
      n.mask = symbol_bit(n.name);
      break;
    case Kind::Power:
      h = mix(h, std::hash<int>{}(n.exponent));
      break;
    case Kind::Func:
      h = mix(h, std::hash<int>{}(static_cast<int>(n.fn)));
      break;
    default:
      break;
  }
  for (const auto& op : n.ops) {
    h = mix(h, op.hash());
    n.mask |= op.symbol_mask();
    n.size += op.size();
  }
  n.hash = h;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double c) {
  Node n;
  n.kind = Kind::Const;
  n.value = c;
  *this = Build::make(std::move(n));
}

Expr Expr::symbol(std::string name) {
  Node n;
  n.kind = Kind::Symbol;
  n.name = std::move(name);
  return Build::make(std::move(n));
}

Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
int Expr::exponent() const { return node_->exponent; }
Fn Expr::fn() const { return node_->fn; }
const std::vector<Expr>& Expr::operands() const { return node_->ops; }
std::size_t Expr::hash() const { return node_->hash; }
std::uint64_t Expr::symbol_mask() const { return node_->mask; }
std::size_t Expr::size() const { return node_->size; }

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Tan: return "tan";
    case Fn::Tanh: return "tanh";
    case Fn::Exp: return "exp";
    case Fn::Ln: return "ln";
    case Fn::Sqrt: return "sqrt";
  }
  return "?";
}

Expr sym(std::string name) { return Expr::symbol(std::move(name)); }

// ---------------------------------------------------------------------------
// light constructors

namespace {

Expr make_neg(const Expr& a) {
  Node n;
  n.kind = Kind::Neg;
  n.ops = {a};
  return Build::make(std::move(n));
}

bool func_foldable(Fn f, double v) {
  switch (f) {
    case Fn::Ln: return v > 0.0;
    case Fn::Sqrt: return v >= 0.0;
    case Fn::Tan: return std::abs(std::cos(v)) > 0.0;
    default: return true;
  }
}

double apply_fn(Fn f, double v) {
  switch (f) {
    case Fn::Sin: return std::sin(v);
    case Fn::Cos: return std::cos(v);
    case Fn::Tan: return std::tan(v);
    case Fn::Tanh: return std::tanh(v);
    case Fn::Exp: return std::exp(v);
    case Fn::Ln: return std::log(v);
    case Fn::Sqrt: return std::sqrt(v);
  }
  return 0.0;
}

}  // namespace

Expr operator-(const Expr& a) {
  switch (a.kind()) {
    case Kind::Const: return Expr(-a.value());
    case Kind::Neg: return a.operand(0);
    case Kind::Product:
      if (a.operand(0).is_const()) {
        auto ops = a.operands();
        ops[0] = Expr(-ops[0].value());
        return product(std::move(ops));
      }
      break;
    default: break;
  }
  return make_neg(a);
}

Expr sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  double c = 0.0;
  for (auto& t : terms) {
    if (t.kind() == Kind::Sum) {
      for (const auto& s : t.operands()) {
        if (s.is_const()) c += s.value();
        else flat.push_back(s);
      }
    } else if (t.is_const()) {
      c += t.value();
    } else {
      flat.push_back(std::move(t));
    }
  }
  if (c != 0.0) flat.emplace_back(c);
  if (flat.empty()) return zero();
  if (flat.size() == 1) return flat.front();
  Node n;
  n.kind = Kind::Sum;
  n.ops = std::move(flat);
  return Build::make(std::move(n));
}

Expr product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  flat.reserve(factors.size());
  double c = 1.0;
  auto absorb = [&](const Expr& f, auto& self) -> void {
    switch (f.kind()) {
      case Kind::Const: c *= f.value(); break;
      case Kind::Neg: c = -c; self(f.operand(0), self); break;
      case Kind::Product:
        for (const auto& g : f.operands()) self(g, self);
        break;
      default: flat.push_back(f);
    }
  };
  for (const auto& f : factors) absorb(f, absorb);
  if (c == 0.0) return zero();
  if (flat.empty()) return Expr(c);
  if (flat.size() == 1) {
    if (c == 1.0) return flat.front();
    if (c == -1.0) return make_neg(flat.front());
  }
  if (c == -1.0) {
    Node n;
    n.kind = Kind::Product;
    n.ops = std::move(flat);
    return make_neg(Build::make(std::move(n)));
  }
  if (c != 1.0) flat.insert(flat.begin(), Expr(c));
  Node n;
  n.kind = Kind::Product;
  n.ops = std::move(flat);
  return Build::make(std::move(n));
}

Expr pow(const Expr& base, int k) {
  if (k == 0) return Expr(1.0);
  if (k == 1) return base;
  if (base.is_const()) {
    const double b = base.value();
    if (!(b == 0.0 && k < 0)) return Expr(std::pow(b, k));
  }
  if (base.kind() == Kind::Power) return pow(base.operand(0), base.exponent() * k);
  if (base.kind() == Kind::Neg) {
    Expr inner = pow(base.operand(0), k);
    return (k % 2 == 0) ? inner : -inner;
  }
  Node n;
  n.kind = Kind::Power;
  n.exponent = k;
  n.ops = {base};
  return Build::make(std::move(n));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_const()) {
    if (b.value() == 0.0) throw DomainError("division by the constant zero");
    if (b.value() == 1.0) return a;
    if (a.is_const()) return Expr(a.value() / b.value());
    return product({Expr(1.0 / b.value()), a});
  }
  if (a.is_const(0.0)) return zero();
  if (a.kind() == Kind::Neg) return -(a.operand(0) / b);
  if (b.kind() == Kind::Neg) return -(a / b.operand(0));
  Node n;
  n.kind = Kind::Quotient;
  n.ops = {a, b};
  return Build::make(std::move(n));
}

Expr func(Fn f, const Expr& arg) {
  if (arg.is_const() && func_foldable(f, arg.value())) return Expr(apply_fn(f, arg.value()));
  Node n;
  n.kind = Kind::Func;
  n.fn = f;
  n.ops = {arg};
  return Build::make(std::move(n));
}

Expr sin(const Expr& a) { return func(Fn::Sin, a); }
Expr cos(const Expr& a) { return func(Fn::Cos, a); }
Expr tan(const Expr& a) { return func(Fn::Tan, a); }
Expr tanh(const Expr& a) { return func(Fn::Tanh, a); }
Expr exp(const Expr& a) { return func(Fn::Exp, a); }
Expr ln(const Expr& a) { return func(Fn::Ln, a); }
Expr sqrt(const Expr& a) { return func(Fn::Sqrt, a); }

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

// ---------------------------------------------------------------------------
// ordering

int compare(const Expr& a, const Expr& b) {
  if (a.raw() == b.raw()) return 0;
  if (a.kind() != b.kind()) return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case Kind::Const:
      if (a.value() == b.value()) return 0;
      return a.value() < b.value() ? -1 : 1;
    case Kind::Symbol: {
      const int c = a.name().compare(b.name());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Func:
      if (a.fn() != b.fn()) return static_cast<int>(a.fn()) < static_cast<int>(b.fn()) ? -1 : 1;
      break;
    case Kind::Power: {
      const int c = compare(a.operand(0), b.operand(0));
      if (c != 0) return c;
      if (a.exponent() == b.exponent()) return 0;
      return a.exponent() < b.exponent() ? -1 : 1;
    }
    default:
      break;
  }
  const auto& x = a.operands();
  const auto& y = b.operands();
  const std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int c = compare(x[i], y[i]);
    if (c != 0) return c;
  }
  if (x.size() == y.size()) return 0;
  return x.size() < y.size() ? -1 : 1;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.raw() == b.raw()) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

// ---------------------------------------------------------------------------
// evaluation

double eval(const Expr& e, const Point& at) {
  switch (e.kind()) {
    case Kind::Const: return e.value();
    case Kind::Symbol: {
      auto it = at.find(e.name());
      if (it == at.end()) throw UnboundSymbol(e.name());
      return it->second;
    }
    case Kind::Sum: {
      double s = 0.0;
      for (const auto& t : e.operands()) s += eval(t, at);
      return s;
    }
    case Kind::Product: {
      double p = 1.0;
      for (const auto& f : e.operands()) p *= eval(f, at);
      return p;
    }
    case Kind::Power: {
      const double b = eval(e.operand(0), at);
      if (b == 0.0 && e.exponent() < 0) throw DomainError("negative power of zero");
      return std::pow(b, e.exponent());
    }
    case Kind::Neg: return -eval(e.operand(0), at);
    case Kind::Quotient: {
      const double num = eval(e.operand(0), at);
      const double den = eval(e.operand(1), at);
      if (den == 0.0) throw DomainError("division by zero");
      return num / den;
    }
    case Kind::Func: {
      const double v = eval(e.operand(0), at);
      if (e.fn() == Fn::Ln && !(v > 0.0)) throw DomainError("ln of nonpositive value");
      if (e.fn() == Fn::Sqrt && v < 0.0) throw DomainError("sqrt of negative value");
      return apply_fn(e.fn(), v);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// symbols

namespace {

void collect_symbols(const Expr& e, std::set<std::string>& out) {
  if (e.is_symbol()) {
    out.insert(e.name());
    return;
  }
  for (const auto& op : e.operands()) collect_symbols(op, out);
}

bool depends(const Expr& e, std::string_view var, std::uint64_t bit) {
  if ((e.symbol_mask() & bit) == 0) return false;
  if (e.is_symbol()) return e.name() == var;
  for (const auto& op : e.operands())
    if (depends(op, var, bit)) return true;
  return false;
}

}  // namespace

std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> out;
  collect_symbols(e, out);
  return out;
}

bool depends_on(const Expr& e, std::string_view var) {
  return depends(e, var, symbol_bit(std::string(var)));
}

// ---------------------------------------------------------------------------
// differentiation

namespace {

Expr d(const Expr& e, std::string_view var, std::uint64_t bit) {
  if ((e.symbol_mask() & bit) == 0) return zero();
  switch (e.kind()) {
    case Kind::Const: return zero();
    case Kind::Symbol: return e.name() == var ? Expr(1.0) : zero();
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const auto& t : e.operands()) terms.push_back(d(t, var, bit));
      return sum(std::move(terms));
    }
    case Kind::Product: {
      const auto& f = e.operands();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < f.size(); ++i) {
        Expr di = d(f[i], var, bit);
        if (di.is_const(0.0)) continue;
        std::vector<Expr> fs;
        fs.reserve(f.size());
        for (std::size_t j = 0; j < f.size(); ++j) fs.push_back(j == i ? di : f[j]);
        terms.push_back(product(std::move(fs)));
      }
      return sum(std::move(terms));
    }
    case Kind::Power: {
      const Expr& b = e.operand(0);
      const int k = e.exponent();
      return product({Expr(static_cast<double>(k)), pow(b, k - 1), d(b, var, bit)});
    }
    case Kind::Neg: return -d(e.operand(0), var, bit);
    case Kind::Quotient: {
      const Expr& a = e.operand(0);
      const Expr& b = e.operand(1);
      return (d(a, var, bit) * b - a * d(b, var, bit)) / pow(b, 2);
    }
    case Kind::Func: {
      const Expr& a = e.operand(0);
      const Expr da = d(a, var, bit);
      switch (e.fn()) {
        case Fn::Sin: return cos(a) * da;
        case Fn::Cos: return -(sin(a) * da);
        case Fn::Tan: return (Expr(1.0) + pow(tan(a), 2)) * da;
        case Fn::Tanh: return (Expr(1.0) - pow(tanh(a), 2)) * da;
        case Fn::Exp: return e * da;
        case Fn::Ln: return da / a;
        case Fn::Sqrt: return da / (Expr(2.0) * e);
      }
    }
  }
  return zero();
}

}  // namespace

Expr diff(const Expr& e, std::string_view var) {
  return simplify(d(e, var, symbol_bit(std::string(var))));
}

std::vector<Expr> grad(const Expr& e, const std::vector<std::string>& vars) {
  std::set<std::string> seen;
  for (const auto& v : vars)
    if (!seen.insert(v).second) throw DuplicateVariable(v);
  std::vector<Expr> out;
  out.reserve(vars.size());
  for (const auto& v : vars) out.push_back(diff(e, v));
  return out;
}

// ---------------------------------------------------------------------------
// simplification

namespace {

// term = coef * rest
std::pair<double, Expr> split_coef(const Expr& t) {
  switch (t.kind()) {
    case Kind::Const: return {t.value(), Expr(1.0)};
    case Kind::Neg: {
      auto [c, r] = split_coef(t.operand(0));
      return {-c, r};
    }
    case Kind::Product:
      if (t.operand(0).is_const()) {
        std::vector<Expr> rest(t.operands().begin() + 1, t.operands().end());
        return {t.operand(0).value(), product(std::move(rest))};
      }
      return {1.0, t};
    default: return {1.0, t};
  }
}

Expr collect_sum(const std::vector<Expr>& terms) {
  std::vector<std::pair<Expr, double>> parts;
  double c = 0.0;
  auto add = [&](const Expr& t, auto& self) -> void {
    if (t.kind() == Kind::Sum) {
      for (const auto& s : t.operands()) self(s, self);
      return;
    }
    if (t.kind() == Kind::Neg && t.operand(0).kind() == Kind::Sum) {
      for (const auto& s : t.operand(0).operands()) self(-s, self);
      return;
    }
    auto [k, r] = split_coef(t);
    if (r.is_const()) c += k * r.value();
    else parts.emplace_back(r, k);
  };
  for (const auto& t : terms) add(t, add);
  std::stable_sort(parts.begin(), parts.end(),
                   [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
  std::vector<Expr> out;
  for (std::size_t i = 0; i < parts.size();) {
    std::size_t j = i;
    double k = 0.0;
    while (j < parts.size() && parts[j].first == parts[i].first) k += parts[j++].second;
    if (k != 0.0) out.push_back(product({Expr(k), parts[i].first}));
    i = j;
  }
  if (c != 0.0) out.emplace_back(c);
  return sum(std::move(out));
}

Expr collect_product(const std::vector<Expr>& factors) {
  double c = 1.0;
  std::vector<std::pair<Expr, int>> bases;
  std::vector<Expr> nums, dens;
  bool has_quot = false;
  auto add = [&](const Expr& f, auto& self) -> void {
    switch (f.kind()) {
      case Kind::Const: c *= f.value(); break;
      case Kind::Neg: c = -c; self(f.operand(0), self); break;
      case Kind::Product:
        for (const auto& g : f.operands()) self(g, self);
        break;
      case Kind::Power: bases.emplace_back(f.operand(0), f.exponent()); break;
      case Kind::Quotient:
        has_quot = true;
        nums.push_back(f.operand(0));
        dens.push_back(f.operand(1));
        break;
      default: bases.emplace_back(f, 1);
    }
  };
  for (const auto& f : factors) add(f, add);
  if (c == 0.0) return zero();
  if (has_quot) {
    std::vector<Expr> top;
    top.emplace_back(c);
    for (const auto& [b, k] : bases) top.push_back(pow(b, k));
    for (auto& n : nums) top.push_back(n);
    return collect_product(top) / collect_product(dens);
  }
  std::stable_sort(bases.begin(), bases.end(),
                   [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
  std::vector<Expr> out;
  out.emplace_back(c);
  for (std::size_t i = 0; i < bases.size();) {
    std::size_t j = i;
    int k = 0;
    while (j < bases.size() && bases[j].first == bases[i].first) k += bases[j++].second;
    if (k != 0) out.push_back(pow(bases[i].first, k));
    i = j;
  }
  return product(std::move(out));
}

Expr simp(const Expr& e) {
  switch (e.kind()) {
    case Kind::Const:
    case Kind::Symbol: return e;
    case Kind::Func: return func(e.fn(), simp(e.operand(0)));
    case Kind::Neg: {
      Expr a = simp(e.operand(0));
      if (a.kind() == Kind::Sum) return collect_sum({-a});
      return -a;
    }
    case Kind::Power: {
      Expr b = simp(e.operand(0));
      const int k = e.exponent();
      if (b.kind() == Kind::Product) {
        std::vector<Expr> fs;
        for (const auto& f : b.operands()) fs.push_back(pow(f, k));
        return collect_product(fs);
      }
      if (b.kind() == Kind::Quotient) {
        return pow(b.operand(0), k) / pow(b.operand(1), k);
      }
      return pow(b, k);
    }
    case Kind::Quotient: {
      Expr a = simp(e.operand(0));
      Expr b = simp(e.operand(1));
      if (a.kind() == Kind::Quotient && b.kind() == Kind::Quotient)
        return collect_product({a.operand(0), b.operand(1)}) /
               collect_product({a.operand(1), b.operand(0)});
      if (a.kind() == Kind::Quotient) return a.operand(0) / collect_product({a.operand(1), b});
      if (b.kind() == Kind::Quotient) return collect_product({a, b.operand(1)}) / b.operand(0);
      if (a == b) return Expr(1.0);
      // pull numeric factors of the denominator into the numerator
      auto [kb, rb] = split_coef(b);
      if (kb != 1.0 && kb != 0.0) return collect_product({Expr(1.0 / kb), a}) / rb;
      return a / b;
    }
    case Kind::Product: {
      std::vector<Expr> fs;
      for (const auto& f : e.operands()) fs.push_back(simp(f));
      return collect_product(fs);
    }
    case Kind::Sum: {
      std::vector<Expr> ts;
      for (const auto& t : e.operands()) ts.push_back(simp(t));
      return collect_sum(ts);
    }
  }
  return e;
}

}  // namespace

Expr simplify(const Expr& e) { return simp(e); }

// ---------------------------------------------------------------------------
// substitution

namespace {

Expr subst(const Expr& e, const Substitution& s, std::uint64_t mask) {
  if ((e.symbol_mask() & mask) == 0) return e;
  switch (e.kind()) {
    case Kind::Const: return e;
    case Kind::Symbol: {
      auto it = s.find(e.name());
      return it == s.end() ? e : it->second;
    }
    case Kind::Sum: {
      std::vector<Expr> ts;
      for (const auto& t : e.operands()) ts.push_back(subst(t, s, mask));
      return sum(std::move(ts));
    }
    case Kind::Product: {
      std::vector<Expr> fs;
      for (const auto& f : e.operands()) fs.push_back(subst(f, s, mask));
      return product(std::move(fs));
    }
    case Kind::Power: return pow(subst(e.operand(0), s, mask), e.exponent());
    case Kind::Neg: return -subst(e.operand(0), s, mask);
    case Kind::Quotient: return subst(e.operand(0), s, mask) / subst(e.operand(1), s, mask);
    case Kind::Func: return func(e.fn(), subst(e.operand(0), s, mask));
  }
  return e;
}

}  // namespace

Expr substitute(const Expr& e, const Substitution& s) {
  if (s.empty()) return e;
  std::uint64_t mask = 0;
  for (const auto& [name, _] : s) mask |= symbol_bit(name);
  return subst(e, s, mask);
}

Expr bind_values(const Expr& e, const Point& values) {
  Substitution s;
  for (const auto& [name, v] : values) s.emplace(name, Expr(v));
  return substitute(e, s);
}

}  // namespace pisynth
