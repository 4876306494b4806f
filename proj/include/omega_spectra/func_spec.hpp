#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace omega_spectra {

enum class Builtin { EulerPhi, DivisorCount, DoubleHalf, InvolutionG, Identity, Constant };

inline const char* builtin_name(Builtin b) {
  switch (b) {
    case Builtin::EulerPhi: return "euler-phi";
    case Builtin::DivisorCount: return "divisor-count";
    case Builtin::DoubleHalf: return "double-half";
    case Builtin::InvolutionG: return "involution-g";
    case Builtin::Identity: return "identity";
    case Builtin::Constant: return "constant";
  }
  return "?";
}

namespace detail {

constexpr Nat kSaturate = std::numeric_limits<Nat>::max();

inline Nat sat_add(Nat a, Nat b) { return a > kSaturate - b ? kSaturate : a + b; }
inline Nat sat_mul(Nat a, Nat b) {
  if (a == 0 || b == 0) return 0;
  return a > kSaturate / b ? kSaturate : a * b;
}

inline Nat isqrt(Nat n) {
  Nat r = static_cast<Nat>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Expression tree for the arithmetic DSL. Every operation is total on naturals:
// subtraction is truncated at 0, division/mod by 0 give 0, sqrt is floored.
struct Expr {
  enum class Op { Const, Var, Add, Sub, Mul, Div, Mod, Sqrt } op = Op::Const;
  Nat value = 0;
  std::shared_ptr<const Expr> lhs, rhs;

  Nat eval(Nat n) const {
    switch (op) {
      case Op::Const: return value;
      case Op::Var: return n;
      case Op::Add: return sat_add(lhs->eval(n), rhs->eval(n));
      case Op::Sub: {
        Nat a = lhs->eval(n), b = rhs->eval(n);
        return a > b ? a - b : 0;
      }
      case Op::Mul: return sat_mul(lhs->eval(n), rhs->eval(n));
      case Op::Div: {
        Nat b = rhs->eval(n);
        return b == 0 ? 0 : lhs->eval(n) / b;
      }
      case Op::Mod: {
        Nat b = rhs->eval(n);
        return b == 0 ? 0 : lhs->eval(n) % b;
      }
      case Op::Sqrt: return isqrt(lhs->eval(n));
    }
    return 0;
  }
};

using ExprPtr = std::shared_ptr<const Expr>;

class ExprParser {
 public:
  explicit ExprParser(std::string text) : s_(std::move(text)) {}

  ExprPtr parse() {
    auto e = parse_sum();
    skip_ws();
    if (i_ != s_.size()) error("unexpected '" + std::string(1, s_[i_]) + "'");
    return e;
  }

 private:
  std::string s_;
  std::size_t i_ = 0;

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::InputError, "expression \"" + s_ + "\" at offset " + std::to_string(i_) + ": " + msg);
  }

  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  bool accept(char c) {
    skip_ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  static ExprPtr node(Expr::Op op, ExprPtr a, ExprPtr b = nullptr) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
  }

  ExprPtr parse_sum() {
    auto lhs = parse_product();
    for (;;) {
      if (accept('+')) lhs = node(Expr::Op::Add, lhs, parse_product());
      else if (accept('-')) lhs = node(Expr::Op::Sub, lhs, parse_product());
      else return lhs;
    }
  }

  ExprPtr parse_product() {
    auto lhs = parse_atom();
    for (;;) {
      if (accept('*')) lhs = node(Expr::Op::Mul, lhs, parse_atom());
      else if (accept('/')) lhs = node(Expr::Op::Div, lhs, parse_atom());
      else if (accept('%')) lhs = node(Expr::Op::Mod, lhs, parse_atom());
      else return lhs;
    }
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (i_ >= s_.size()) error("unexpected end of input");
    if (accept('(')) {
      auto e = parse_sum();
      if (!accept(')')) error("expected ')'");
      return e;
    }
    char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Nat v = 0;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
        Nat d = static_cast<Nat>(s_[i_] - '0');
        if (v > (kSaturate - d) / 10) error("constant too large");
        v = v * 10 + d;
        ++i_;
      }
      auto e = std::make_shared<Expr>();
      e->value = v;
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = i_;
      while (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_]))) ++i_;
      std::string word = s_.substr(start, i_ - start);
      if (word == "n") {
        auto e = std::make_shared<Expr>();
        e->op = Expr::Op::Var;
        return e;
      }
      if (word == "sqrt") {
        if (!accept('(')) error("expected '(' after sqrt");
        auto arg = parse_sum();
        if (!accept(')')) error("expected ')'");
        return node(Expr::Op::Sqrt, arg);
      }
      i_ = start;
      error("unknown identifier '" + word + "'");
    }
    error("unexpected '" + std::string(1, c) + "'");
  }
};

// Start of the involution block J_k when the blocks J_0 + J_1 + ... tile ω from 0.
inline Nat involution_block_start(Nat k) { return k * k + 5 * k; }

inline Nat involution_g(Nat n) {
  Nat k = isqrt(n);  // k^2 + 5k <= n implies k <= sqrt(n)
  while (k > 0 && involution_block_start(k) > n) --k;
  while (involution_block_start(k + 1) <= n) ++k;
  const Nat start = involution_block_start(k);
  const Nat len = 6 + 2 * k;
  const Nat j = n - start + 1;  // 1-based local label
  Nat image;
  if (j == 2 || j == len - 1) image = j;
  else if (j % 2 == 1) image = j + 3;
  else image = j - 3;
  return start + image - 1;
}

}  // namespace detail

/// A total unary function on ω, evaluable on [0, eval_bound].
class FuncSpec {
 public:
  enum class Kind { TablePrefix, Builtin, Expression };

  static FuncSpec table(std::vector<Nat> values, std::string label = "table") {
    if (values.empty()) fail(ErrorKind::InputError, "empty function table");
    FuncSpec f;
    f.kind_ = Kind::TablePrefix;
    f.table_ = std::make_shared<const std::vector<Nat>>(std::move(values));
    f.eval_bound_ = f.table_->size() - 1;
    f.label_ = std::move(label);
    return f;
  }

  static FuncSpec builtin(Builtin b, Nat constant = 0, Nat eval_bound = kDefaultBound) {
    FuncSpec f;
    f.kind_ = Kind::Builtin;
    f.builtin_ = b;
    f.constant_ = constant;
    f.eval_bound_ = eval_bound;
    f.label_ = builtin_name(b);
    if (b == Builtin::Constant) f.label_ += " " + std::to_string(constant);
    return f;
  }

  static FuncSpec builtin(const std::string& name, Nat eval_bound = kDefaultBound) {
    if (name == "euler-phi") return builtin(Builtin::EulerPhi, 0, eval_bound);
    if (name == "divisor-count") return builtin(Builtin::DivisorCount, 0, eval_bound);
    if (name == "double-half") return builtin(Builtin::DoubleHalf, 0, eval_bound);
    if (name == "involution-g") return builtin(Builtin::InvolutionG, 0, eval_bound);
    if (name == "identity") return builtin(Builtin::Identity, 0, eval_bound);
    if (name.rfind("constant", 0) == 0) {
      std::string rest = name.substr(8);
      while (!rest.empty() && (rest.front() == ' ' || rest.front() == ':' || rest.front() == '-')) rest.erase(0, 1);
      if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        fail(ErrorKind::InputError, "constant builtin needs a value, e.g. \"constant 7\"");
      return builtin(Builtin::Constant, std::stoull(rest), eval_bound);
    }
    fail(ErrorKind::InputError, "unknown builtin '" + name + "'");
  }

  static FuncSpec expression(const std::string& text, Nat eval_bound = kDefaultBound) {
    FuncSpec f;
    f.kind_ = Kind::Expression;
    f.expr_ = detail::ExprParser(text).parse();
    f.expr_text_ = text;
    f.eval_bound_ = eval_bound;
    f.label_ = text;
    return f;
  }

  /// Replace finitely many values; the result is still total.
  FuncSpec with_overrides(std::map<Nat, Nat> overrides) const {
    FuncSpec f = *this;
    for (auto& [k, v] : overrides) f.overrides_[k] = v;
    return f;
  }

  FuncSpec with_eval_bound(Nat bound) const {
    if (kind_ == Kind::TablePrefix && bound > eval_bound_)
      fail(ErrorKind::InputError, "table has only " + std::to_string(table_->size()) + " values");
    FuncSpec f = *this;
    f.eval_bound_ = bound;
    return f;
  }

  Kind kind() const { return kind_; }
  Nat eval_bound() const { return eval_bound_; }
  const std::string& label() const { return label_; }
  std::optional<Builtin> builtin_kind() const {
    if (kind_ == Kind::Builtin) return builtin_;
    return std::nullopt;
  }
  Nat constant_value() const { return constant_; }
  const std::string& expression_text() const { return expr_text_; }
  const std::vector<Nat>& table_values() const { return *table_; }
  const std::map<Nat, Nat>& overrides() const { return overrides_; }

  Nat operator()(Nat n) const {
    if (n > eval_bound_)
      fail(ErrorKind::InputError, label_ + " evaluated at " + std::to_string(n) + " beyond bound " + std::to_string(eval_bound_));
    if (auto it = overrides_.find(n); it != overrides_.end()) return it->second;
    switch (kind_) {
      case Kind::TablePrefix: return (*table_)[n];
      case Kind::Expression: return expr_->eval(n);
      case Kind::Builtin: return eval_builtin(n);
    }
    return 0;
  }

  /// Values f(0..n), using sieves for the arithmetic builtins.
  std::vector<Nat> tabulate(Nat n) const {
    if (n > eval_bound_)
      fail(ErrorKind::InputError, label_ + " tabulated to " + std::to_string(n) + " beyond bound " + std::to_string(eval_bound_));
    std::vector<Nat> out(n + 1);
    if (kind_ == Kind::Builtin && builtin_ == Builtin::EulerPhi) {
      std::iota(out.begin(), out.end(), Nat{0});
      for (Nat p = 2; p <= n; ++p)
        if (out[p] == p)
          for (Nat m = p; m <= n; m += p) out[m] -= out[m] / p;
      out[0] = 0;
    } else if (kind_ == Kind::Builtin && builtin_ == Builtin::DivisorCount) {
      for (Nat d = 1; d <= n; ++d)
        for (Nat m = d; m <= n; m += d) ++out[m];
    } else {
      for (Nat i = 0; i <= n; ++i) out[i] = (*this)(i);
      return out;
    }
    for (auto& [k, v] : overrides_)
      if (k <= n) out[k] = v;
    return out;
  }

  /// Minorant shipped with a builtin (as a DSL expression), if any.
  std::optional<std::string> declared_minorant() const {
    if (kind_ == Kind::Builtin && builtin_ == Builtin::EulerPhi && overrides_.empty()) return "sqrt(n/2)";
    return std::nullopt;
  }

  static constexpr Nat kDefaultBound = 1'000'000;

 private:
  Kind kind_ = Kind::Builtin;
  Builtin builtin_ = Builtin::Identity;
  Nat constant_ = 0;
  Nat eval_bound_ = 0;
  std::shared_ptr<const std::vector<Nat>> table_;
  detail::ExprPtr expr_;
  std::string expr_text_;
  std::string label_;
  std::map<Nat, Nat> overrides_;

  Nat eval_builtin(Nat n) const {
    switch (builtin_) {
      case Builtin::EulerPhi: {
        if (n == 0) return 0;
        Nat result = n, m = n;
        for (Nat p = 2; p * p <= m; ++p) {
          if (m % p == 0) {
            while (m % p == 0) m /= p;
            result -= result / p;
          }
        }
        if (m > 1) result -= result / m;
        return result;
      }
      case Builtin::DivisorCount: {
        if (n == 0) return 0;
        Nat count = 0;
        for (Nat d = 1; d * d <= n; ++d)
          if (n % d == 0) count += (d * d == n) ? 1 : 2;
        return count;
      }
      case Builtin::DoubleHalf: return 2 * (n / 2);
      case Builtin::InvolutionG: return detail::involution_g(n);
      case Builtin::Identity: return n;
      case Builtin::Constant: return constant_;
    }
    return 0;
  }
};

}  // namespace omega_spectra
