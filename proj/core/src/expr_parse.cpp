#include <cctype>
#include <charconv>
#include <string>

#include "pisynth/expr.hpp"

namespace pisynth {

namespace {

// expr    := term (('+' | '-') term)*
// term    := unary (('*' | '/') unary)*
// unary   := '-' unary | '+' unary | power
// power   := primary ('^' int | '^' '(' int ')')?
// primary := number | ident | ident '(' expr ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr run() {
    skip();
    if (pos_ == s_.size()) throw SyntaxError("empty expression", pos_);
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) throw SyntaxError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) lhs = lhs + term();
      else if (accept('-')) lhs = lhs - term();
      else return lhs;
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * unary();
      } else if (peek('/')) {
        const std::size_t at = pos_++;
        Expr rhs = unary();
        if (rhs.is_const(0.0)) throw SyntaxError("division by the constant zero", at);
        lhs = lhs / rhs;
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!accept('^')) return base;
    const bool paren = accept('(');
    skip();
    const std::size_t start = pos_;
    int sign = 1;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      sign = s_[pos_] == '-' ? -1 : 1;
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == digits) throw SyntaxError("integer exponent expected", start);
    if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
      throw SyntaxError("integer exponent expected", start);
    int k = 0;
    auto res = std::from_chars(s_.data() + digits, s_.data() + pos_, k);
    if (res.ec != std::errc()) throw SyntaxError("exponent out of range", start);
    if (paren && !accept(')')) throw SyntaxError("')' expected", pos_);
    return pow(base, sign * k);
  }

  Expr primary() {
    skip();
    if (pos_ == s_.size()) throw SyntaxError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) throw SyntaxError("')' expected", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (peek('(')) {
        Fn f;
        if (!lookup(name, f)) throw SyntaxError("unknown function '" + name + "'", start);
        ++pos_;
        Expr arg = expr();
        if (!accept(')')) throw SyntaxError("')' expected", pos_);
        return func(f, arg);
      }
      return sym(std::move(name));
    }
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        pos_ = q;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != s_.data() + pos_)
      throw SyntaxError("malformed number", start);
    return Expr(v);
  }

  static bool lookup(const std::string& name, Fn& f) {
    static const std::pair<const char*, Fn> table[] = {
        {"sin", Fn::Sin}, {"cos", Fn::Cos}, {"tan", Fn::Tan}, {"tanh", Fn::Tanh},
        {"exp", Fn::Exp}, {"ln", Fn::Ln},   {"sqrt", Fn::Sqrt}};
    for (const auto& [n, fn] : table)
      if (name == n) {
        f = fn;
        return true;
      }
    return false;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

}  // namespace pisynth
