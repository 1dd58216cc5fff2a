// Copyright 2026 The Ladder Engine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ladder/expr.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace ladder {

namespace {

constexpr double kOverflowLimit = 1e300;

struct FuncEntry {
  Func f;
  std::string_view name;
};
constexpr FuncEntry kFuncs[] = {
    {Func::kSin, "sin"},   {Func::kCos, "cos"},   {Func::kTan, "tan"},
    {Func::kAsin, "asin"}, {Func::kAcos, "acos"}, {Func::kAtan, "atan"},
    {Func::kExp, "exp"},   {Func::kLn, "ln"},     {Func::kSqrt, "sqrt"},
    {Func::kAbs, "abs"},
};

}  // namespace

std::string_view func_name(Func f) {
  for (const auto& e : kFuncs) {
    if (e.f == f) return e.name;
  }
  return "?";
}

std::optional<Func> func_from_name(std::string_view name) {
  for (const auto& e : kFuncs) {
    if (e.name == name) return e.f;
  }
  return std::nullopt;
}

Expr::Expr() : Expr(constant(0.0).node_) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kConstant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::x() {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kVariable;
  return Expr(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  if (terms.size() < 2) throw std::invalid_argument("Expr::sum needs >= 2 terms");
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kSum;
  n->children = std::move(terms);
  return Expr(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  if (factors.size() < 2) throw std::invalid_argument("Expr::product needs >= 2 factors");
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kProduct;
  n->children = std::move(factors);
  return Expr(std::move(n));
}

Expr Expr::pow(Expr base, Expr exponent) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kPower;
  n->children = {std::move(base), std::move(exponent)};
  return Expr(std::move(n));
}

Expr Expr::quotient(Expr numerator, Expr denominator) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kQuotient;
  n->children = {std::move(numerator), std::move(denominator)};
  return Expr(std::move(n));
}

Expr Expr::negate(Expr inner) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kNegate;
  n->children = {std::move(inner)};
  return Expr(std::move(n));
}

Expr Expr::call(Func f, Expr argument) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kCall;
  n->func = f;
  n->children = {std::move(argument)};
  return Expr(std::move(n));
}

std::size_t Expr::node_count() const {
  std::size_t total = 1;
  for (const auto& c : children()) total += c.node_count();
  return total;
}

bool Expr::is_constant(double v) const {
  return kind() == ExprKind::kConstant && constant_value() == v;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::kConstant:
      return a.constant_value() == b.constant_value();
    case ExprKind::kVariable:
      return true;
    case ExprKind::kCall:
      if (a.func() != b.func()) return false;
      break;
    default:
      break;
  }
  const auto& ca = a.children();
  const auto& cb = b.children();
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (!(ca[i] == cb[i])) return false;
  }
  return true;
}

Expr operator+(Expr a, Expr b) { return Expr::sum({std::move(a), std::move(b)}); }
Expr operator-(Expr a, Expr b) { return Expr::sum({std::move(a), Expr::negate(std::move(b))}); }
Expr operator*(Expr a, Expr b) { return Expr::product({std::move(a), std::move(b)}); }
Expr operator/(Expr a, Expr b) { return Expr::quotient(std::move(a), std::move(b)); }
Expr operator-(Expr a) { return Expr::negate(std::move(a)); }

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { kNumber, kIdent, kPlus, kMinus, kStar, kSlash, kPow, kLParen, kRParen, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::size_t offset = 0;
  std::size_t length = 0;
  double number = 0.0;
  std::string_view text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token t;
    t.offset = pos_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::kEnd;
      return t;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      return lex_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < src_.size() && std::isalpha(static_cast<unsigned char>(src_[end]))) ++end;
      t.kind = Tok::kIdent;
      t.text = src_.substr(pos_, end - pos_);
      t.length = end - pos_;
      pos_ = end;
      return t;
    }
    switch (c) {
      case '+': t.kind = Tok::kPlus; break;
      case '-': t.kind = Tok::kMinus; break;
      case '*':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
          t.kind = Tok::kPow;
          t.length = 2;
          pos_ += 2;
          return t;
        }
        t.kind = Tok::kStar;
        break;
      case '^': t.kind = Tok::kPow; break;
      case '/': t.kind = Tok::kSlash; break;
      case '(': t.kind = Tok::kLParen; break;
      case ')': t.kind = Tok::kRParen; break;
      default:
        t.kind = Tok::kEnd;  // caller reports "unexpected character"
        t.length = 1;
        t.text = src_.substr(pos_, 1);
        return t;
    }
    t.length = 1;
    ++pos_;
    return t;
  }

 private:
  Token lex_number() {
    Token t;
    t.kind = Tok::kNumber;
    t.offset = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t mark = end + 1;
      if (mark < src_.size() && (src_[mark] == '+' || src_[mark] == '-')) ++mark;
      if (mark < src_.size() && std::isdigit(static_cast<unsigned char>(src_[mark]))) {
        end = mark;
        while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
      }
    }
    t.text = src_.substr(pos_, end - pos_);
    t.length = end - pos_;
    t.number = std::strtod(std::string(t.text).c_str(), nullptr);
    pos_ = end;
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src), lexer_(src) { advance(); }

  ParseResult run() {
    Expr e = expression();
    if (failed_) return error_;
    if (cur_.kind != Tok::kEnd || cur_.length > 0) {
      return fail(cur_.offset, "end of input"), error_;
    }
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  void fail(std::size_t offset, std::string expected) {
    if (failed_) return;
    failed_ = true;
    error_.offset = offset;
    error_.expected = std::move(expected);
    error_.source = std::string(src_);
  }

  bool starts_operand() const {
    return cur_.kind == Tok::kNumber || cur_.kind == Tok::kIdent || cur_.kind == Tok::kLParen;
  }

  Expr expression() {
    std::vector<Expr> terms;
    bool negate_first = false;
    // leading sign is handled by factor(); collect '+'-separated terms here.
    terms.push_back(term());
    if (failed_) return terms[0];
    (void)negate_first;
    while (cur_.kind == Tok::kPlus || cur_.kind == Tok::kMinus) {
      const bool minus = cur_.kind == Tok::kMinus;
      advance();
      Expr t = term();
      if (failed_) return t;
      if (minus && t.kind() == ExprKind::kConstant) {
        terms.push_back(Expr::constant(-t.constant_value()));
      } else {
        terms.push_back(minus ? Expr::negate(std::move(t)) : std::move(t));
      }
    }
    if (terms.size() == 1) return terms[0];
    return Expr::sum(std::move(terms));
  }

  // Multiplication level. A '*' chain is collected into one n-ary product;
  // '/' folds left into binary quotients. Implicit multiplication happens
  // when one factor is directly followed by the start of another.
  Expr term() {
    Expr cur = factor();
    if (failed_) return cur;
    bool cur_is_open_product = false;  // cur was built as a product at this level
    for (;;) {
      bool divide = false;
      if (cur_.kind == Tok::kStar) {
        advance();
      } else if (cur_.kind == Tok::kSlash) {
        divide = true;
        advance();
      } else if (starts_operand()) {
        // implicit multiplication
      } else {
        break;
      }
      Expr rhs = factor();
      if (failed_) return rhs;
      if (divide) {
        cur = Expr::quotient(std::move(cur), std::move(rhs));
        cur_is_open_product = false;
      } else if (cur_is_open_product) {
        std::vector<Expr> kids = cur.children();
        kids.push_back(std::move(rhs));
        cur = Expr::product(std::move(kids));
      } else {
        cur = Expr::product({std::move(cur), std::move(rhs)});
        cur_is_open_product = true;
      }
    }
    return cur;
  }

  Expr factor() {
    if (cur_.kind == Tok::kMinus) {
      advance();
      Expr inner = factor();
      if (failed_) return inner;
      // negative literals fold to constants so round-trips stay structural
      if (inner.kind() == ExprKind::kConstant) {
        return Expr::constant(-inner.constant_value());
      }
      return Expr::negate(std::move(inner));
    }
    if (cur_.kind == Tok::kPlus) {
      advance();
      return factor();
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (failed_) return base;
    if (cur_.kind == Tok::kPow) {
      advance();
      Expr exponent = factor();  // right-associative, sign allowed
      if (failed_) return exponent;
      return Expr::pow(std::move(base), std::move(exponent));
    }
    return base;
  }

  Expr primary() {
    switch (cur_.kind) {
      case Tok::kNumber: {
        Expr e = Expr::constant(cur_.number);
        advance();
        return e;
      }
      case Tok::kIdent: {
        const Token ident = cur_;
        if (ident.text == "x") {
          advance();
          return Expr::x();
        }
        if (auto f = func_from_name(ident.text)) {
          advance();
          if (cur_.kind != Tok::kLParen) {
            fail(cur_.offset, "'(' after function name");
            return Expr();
          }
          advance();
          Expr arg = expression();
          if (failed_) return arg;
          if (cur_.kind != Tok::kRParen) {
            fail(cur_.offset, "')'");
            return Expr();
          }
          advance();
          return Expr::call(*f, std::move(arg));
        }
        fail(ident.offset, "known identifier (x or a supported function)");
        return Expr();
      }
      case Tok::kLParen: {
        advance();
        Expr e = expression();
        if (failed_) return e;
        if (cur_.kind != Tok::kRParen) {
          fail(cur_.offset, "')'");
          return Expr();
        }
        advance();
        return e;
      }
      default:
        fail(cur_.offset, "operand");
        return Expr();
    }
  }

  std::string_view src_;
  Lexer lexer_;
  Token cur_;
  bool failed_ = false;
  ParseError error_;
};

}  // namespace

std::string ParseError::message() const {
  std::ostringstream os;
  os << "parse error at offset " << offset << ": expected " << expected;
  return os.str();
}

ParseResult parse(std::string_view text) { return Parser(text).run(); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

EvalResult eval_fail(const Expr& offender, EvalStatus status) {
  EvalResult r;
  r.status = status;
  r.offender = offender;
  return r;
}

EvalResult check_finite(const Expr& at, double v) {
  if (std::isnan(v)) return eval_fail(at, EvalStatus::kDomainError);
  if (std::isinf(v) || std::fabs(v) > kOverflowLimit) return eval_fail(at, EvalStatus::kOverflow);
  EvalResult r;
  r.value = v;
  return r;
}

}  // namespace

EvalResult evaluate(const Expr& e, double x0) {
  switch (e.kind()) {
    case ExprKind::kConstant:
      return check_finite(e, e.constant_value());
    case ExprKind::kVariable:
      return check_finite(e, x0);
    case ExprKind::kSum: {
      double acc = 0.0;
      for (const auto& c : e.children()) {
        EvalResult r = evaluate(c, x0);
        if (!r.ok()) return r;
        acc += r.value;
      }
      return check_finite(e, acc);
    }
    case ExprKind::kProduct: {
      double acc = 1.0;
      for (const auto& c : e.children()) {
        EvalResult r = evaluate(c, x0);
        if (!r.ok()) return r;
        acc *= r.value;
      }
      return check_finite(e, acc);
    }
    case ExprKind::kPower: {
      EvalResult base = evaluate(e.child(0), x0);
      if (!base.ok()) return base;
      EvalResult exp = evaluate(e.child(1), x0);
      if (!exp.ok()) return exp;
      if (base.value == 0.0 && exp.value < 0.0) return eval_fail(e, EvalStatus::kDomainError);
      if (base.value < 0.0 && exp.value != std::floor(exp.value)) {
        return eval_fail(e, EvalStatus::kDomainError);
      }
      return check_finite(e, std::pow(base.value, exp.value));
    }
    case ExprKind::kQuotient: {
      EvalResult num = evaluate(e.child(0), x0);
      if (!num.ok()) return num;
      EvalResult den = evaluate(e.child(1), x0);
      if (!den.ok()) return den;
      if (den.value == 0.0) return eval_fail(e, EvalStatus::kDomainError);
      return check_finite(e, num.value / den.value);
    }
    case ExprKind::kNegate: {
      EvalResult r = evaluate(e.child(0), x0);
      if (!r.ok()) return r;
      r.value = -r.value;
      return r;
    }
    case ExprKind::kCall: {
      EvalResult arg = evaluate(e.child(0), x0);
      if (!arg.ok()) return arg;
      const double a = arg.value;
      switch (e.func()) {
        case Func::kSin: return check_finite(e, std::sin(a));
        case Func::kCos: return check_finite(e, std::cos(a));
        case Func::kTan: return check_finite(e, std::tan(a));
        case Func::kAsin:
          if (a < -1.0 || a > 1.0) return eval_fail(e, EvalStatus::kDomainError);
          return check_finite(e, std::asin(a));
        case Func::kAcos:
          if (a < -1.0 || a > 1.0) return eval_fail(e, EvalStatus::kDomainError);
          return check_finite(e, std::acos(a));
        case Func::kAtan: return check_finite(e, std::atan(a));
        case Func::kExp: return check_finite(e, std::exp(a));
        case Func::kLn:
          if (a <= 0.0) return eval_fail(e, EvalStatus::kDomainError);
          return check_finite(e, std::log(a));
        case Func::kSqrt:
          if (a < 0.0) return eval_fail(e, EvalStatus::kDomainError);
          return check_finite(e, std::sqrt(a));
        case Func::kAbs: return check_finite(e, std::fabs(a));
      }
      return eval_fail(e, EvalStatus::kDomainError);
    }
  }
  return eval_fail(e, EvalStatus::kDomainError);
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

// Folding constructors so derivative trees stay small.
Expr mk_sum(std::vector<Expr> terms) {
  std::vector<Expr> kept;
  double const_acc = 0.0;
  bool saw_const = false;
  for (auto& t : terms) {
    if (t.kind() == ExprKind::kConstant) {
      const_acc += t.constant_value();
      saw_const = true;
    } else {
      kept.push_back(std::move(t));
    }
  }
  if (saw_const && const_acc != 0.0) kept.push_back(Expr::constant(const_acc));
  if (kept.empty()) return Expr::constant(0.0);
  if (kept.size() == 1) return kept[0];
  return Expr::sum(std::move(kept));
}

Expr mk_product(std::vector<Expr> factors) {
  std::vector<Expr> kept;
  double const_acc = 1.0;
  bool saw_const = false;
  for (auto& f : factors) {
    if (f.kind() == ExprKind::kConstant) {
      const_acc *= f.constant_value();
      saw_const = true;
    } else {
      kept.push_back(std::move(f));
    }
  }
  if (saw_const && const_acc == 0.0) return Expr::constant(0.0);
  if (saw_const && const_acc != 1.0) kept.insert(kept.begin(), Expr::constant(const_acc));
  if (kept.empty()) return Expr::constant(saw_const ? const_acc : 1.0);
  if (kept.size() == 1) return kept[0];
  return Expr::product(std::move(kept));
}

Expr mk_quotient(Expr num, Expr den) {
  if (num.is_constant(0.0)) return Expr::constant(0.0);
  if (den.is_constant(1.0)) return num;
  return Expr::quotient(std::move(num), std::move(den));
}

Expr mk_negate(Expr e) {
  if (e.kind() == ExprKind::kConstant) return Expr::constant(-e.constant_value());
  if (e.kind() == ExprKind::kNegate) return e.child(0);
  return Expr::negate(std::move(e));
}

Expr mk_pow(Expr base, Expr exp) {
  if (exp.is_constant(1.0)) return base;
  if (exp.is_constant(0.0)) return Expr::constant(1.0);
  return Expr::pow(std::move(base), std::move(exp));
}

Expr chain(Expr outer_derivative, const Expr& inner) {
  Expr di = differentiate(inner);
  if (di.is_constant(1.0)) return outer_derivative;
  return mk_product({std::move(outer_derivative), std::move(di)});
}

}  // namespace

Expr differentiate(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::kConstant:
      return Expr::constant(0.0);
    case ExprKind::kVariable:
      return Expr::constant(1.0);
    case ExprKind::kSum: {
      std::vector<Expr> terms;
      terms.reserve(e.children().size());
      for (const auto& c : e.children()) terms.push_back(differentiate(c));
      return mk_sum(std::move(terms));
    }
    case ExprKind::kProduct: {
      // n-ary product rule: sum over i of (d kid_i) * prod_{j != i} kid_j
      const auto& kids = e.children();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        Expr di = differentiate(kids[i]);
        if (di.is_constant(0.0)) continue;
        std::vector<Expr> factors;
        factors.push_back(std::move(di));
        for (std::size_t j = 0; j < kids.size(); ++j) {
          if (j != i) factors.push_back(kids[j]);
        }
        terms.push_back(mk_product(std::move(factors)));
      }
      if (terms.empty()) return Expr::constant(0.0);
      return mk_sum(std::move(terms));
    }
    case ExprKind::kQuotient: {
      const Expr& u = e.child(0);
      const Expr& v = e.child(1);
      Expr du = differentiate(u);
      Expr dv = differentiate(v);
      if (dv.is_constant(0.0)) return mk_quotient(std::move(du), v);
      Expr num = mk_sum({mk_product({std::move(du), v}),
                         mk_negate(mk_product({u, std::move(dv)}))});
      return mk_quotient(std::move(num), mk_pow(v, Expr::constant(2.0)));
    }
    case ExprKind::kNegate:
      return mk_negate(differentiate(e.child(0)));
    case ExprKind::kPower: {
      const Expr& base = e.child(0);
      const Expr& exp = e.child(1);
      if (exp.kind() == ExprKind::kConstant) {
        // n * u^(n-1) * u'
        const double n = exp.constant_value();
        Expr core = mk_product(
            {Expr::constant(n), mk_pow(base, Expr::constant(n - 1.0))});
        return chain(std::move(core), base);
      }
      if (base.kind() == ExprKind::kConstant) {
        // a^v * ln(a) * v'
        Expr core = mk_product({e, Expr::call(Func::kLn, base)});
        return chain(std::move(core), exp);
      }
      // u^v * (v' ln u + v u' / u)
      Expr t1 = mk_product({differentiate(exp), Expr::call(Func::kLn, base)});
      Expr t2 = mk_quotient(mk_product({exp, differentiate(base)}), base);
      return mk_product({e, mk_sum({std::move(t1), std::move(t2)})});
    }
    case ExprKind::kCall: {
      const Expr& u = e.child(0);
      switch (e.func()) {
        case Func::kSin:
          return chain(Expr::call(Func::kCos, u), u);
        case Func::kCos:
          return chain(mk_negate(Expr::call(Func::kSin, u)), u);
        case Func::kTan:
          return chain(mk_quotient(Expr::constant(1.0),
                                   mk_pow(Expr::call(Func::kCos, u), Expr::constant(2.0))),
                       u);
        case Func::kAsin:
          return chain(
              mk_quotient(Expr::constant(1.0),
                          Expr::call(Func::kSqrt,
                                     mk_sum({Expr::constant(1.0),
                                             mk_negate(mk_pow(u, Expr::constant(2.0)))}))),
              u);
        case Func::kAcos:
          return chain(
              mk_negate(mk_quotient(
                  Expr::constant(1.0),
                  Expr::call(Func::kSqrt,
                             mk_sum({Expr::constant(1.0),
                                     mk_negate(mk_pow(u, Expr::constant(2.0)))})))),
              u);
        case Func::kAtan:
          return chain(mk_quotient(Expr::constant(1.0),
                                   mk_sum({Expr::constant(1.0), mk_pow(u, Expr::constant(2.0))})),
                       u);
        case Func::kExp:
          return chain(e, u);
        case Func::kLn:
          return chain(mk_quotient(Expr::constant(1.0), u), u);
        case Func::kSqrt:
          return chain(mk_quotient(Expr::constant(1.0),
                                   mk_product({Expr::constant(2.0), e})),
                       u);
        case Func::kAbs:
          // d|u|/dx = u/|u| * u', valid away from u = 0
          return chain(mk_quotient(u, e), u);
      }
      return Expr::constant(0.0);
    }
  }
  return Expr::constant(0.0);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Precedence levels for parenthesization decisions.
// sum=1, product/quotient=2, negate=2 (prefix), power=3, atoms/calls=4.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::kSum: return 1;
    case ExprKind::kProduct:
    case ExprKind::kQuotient: return 2;
    case ExprKind::kNegate: return 2;
    case ExprKind::kPower: return 3;
    default: return 4;
  }
}

std::string format_constant(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // trim to the shortest representation that round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

void print_node(const Expr& e, std::string& out);

void print_child(const Expr& child, int min_prec, bool strict, std::string& out) {
  const int p = precedence(child);
  const bool parens = strict ? p <= min_prec : p < min_prec;
  if (parens) out += '(';
  print_node(child, out);
  if (parens) out += ')';
}

void print_node(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case ExprKind::kConstant: {
      const double v = e.constant_value();
      if (v < 0.0 || (v == 0.0 && std::signbit(v))) {
        out += '-';
        out += format_constant(-v);
      } else {
        out += format_constant(v);
      }
      return;
    }
    case ExprKind::kVariable:
      out += 'x';
      return;
    case ExprKind::kSum: {
      const auto& kids = e.children();
      for (std::size_t i = 0; i < kids.size(); ++i) {
        const Expr& k = kids[i];
        if (i == 0) {
          // a nested sum must keep its parens so reparsing is structural
          print_child(k, 1, /*strict=*/true, out);
          continue;
        }
        if (k.kind() == ExprKind::kNegate) {
          out += " - ";
          print_child(k.child(0), 2, /*strict=*/false, out);
        } else if (k.kind() == ExprKind::kConstant && k.constant_value() < 0.0) {
          out += " - ";
          out += format_constant(-k.constant_value());
        } else {
          out += " + ";
          print_child(k, 1, /*strict=*/true, out);
        }
      }
      return;
    }
    case ExprKind::kProduct: {
      const auto& kids = e.children();
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i > 0) out += '*';
        // nested products/quotients keep parens; sums and negations too
        print_child(kids[i], 2, /*strict=*/true, out);
      }
      return;
    }
    case ExprKind::kQuotient: {
      // left-associative: numerator that is itself a quotient prints bare
      const Expr& num = e.child(0);
      const Expr& den = e.child(1);
      if (num.kind() == ExprKind::kQuotient) {
        print_node(num, out);
      } else {
        print_child(num, 2, /*strict=*/false, out);
      }
      out += '/';
      print_child(den, 2, /*strict=*/true, out);
      return;
    }
    case ExprKind::kNegate: {
      out += '-';
      const Expr& inner = e.child(0);
      // - binds looser than * and /: parenthesize anything but powers/atoms
      const bool parens = precedence(inner) <= 2;
      if (parens) out += '(';
      print_node(inner, out);
      if (parens) out += ')';
      return;
    }
    case ExprKind::kPower: {
      const Expr& base = e.child(0);
      if (base.kind() == ExprKind::kConstant && base.constant_value() < 0.0) {
        out += '(';
        print_node(base, out);
        out += ')';
      } else {
        print_child(base, 3, /*strict=*/true, out);
      }
      out += "**";
      const Expr& exp = e.child(1);
      // exponent parses as a signed factor: -2 and nested powers stay bare
      const bool parens = precedence(exp) <= 2 &&
                          !(exp.kind() == ExprKind::kNegate && precedence(exp.child(0)) >= 3) &&
                          !(exp.kind() == ExprKind::kConstant);
      if (parens) out += '(';
      print_node(exp, out);
      if (parens) out += ')';
      return;
    }
    case ExprKind::kCall: {
      out += func_name(e.func());
      out += '(';
      print_node(e.child(0), out);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string to_text(const Expr& e) {
  std::string out;
  print_node(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Canonical ordering

int compare(const Expr& a, const Expr& b) {
  auto rank = [](ExprKind k) {
    switch (k) {
      case ExprKind::kConstant: return 0;
      case ExprKind::kVariable: return 1;
      case ExprKind::kCall: return 2;
      case ExprKind::kPower: return 3;
      case ExprKind::kProduct: return 4;
      case ExprKind::kQuotient: return 5;
      case ExprKind::kNegate: return 6;
      case ExprKind::kSum: return 7;
    }
    return 8;
  };
  const int ra = rank(a.kind());
  const int rb = rank(b.kind());
  if (ra != rb) return ra < rb ? -1 : 1;
  if (a.kind() == ExprKind::kConstant) {
    if (a.constant_value() < b.constant_value()) return -1;
    if (a.constant_value() > b.constant_value()) return 1;
    return 0;
  }
  if (a.kind() == ExprKind::kVariable) return 0;
  if (a.kind() == ExprKind::kCall && a.func() != b.func()) {
    return static_cast<int>(a.func()) < static_cast<int>(b.func()) ? -1 : 1;
  }
  const auto& ca = a.children();
  const auto& cb = b.children();
  if (ca.size() != cb.size()) return ca.size() < cb.size() ? -1 : 1;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const int c = compare(ca[i], cb[i]);
    if (c != 0) return c;
  }
  return 0;
}

Expr canonicalize(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::kConstant:
    case ExprKind::kVariable:
      return e;
    case ExprKind::kSum:
    case ExprKind::kProduct: {
      std::vector<Expr> kids;
      kids.reserve(e.children().size());
      for (const auto& c : e.children()) kids.push_back(canonicalize(c));
      std::stable_sort(kids.begin(), kids.end(),
                       [](const Expr& x, const Expr& y) { return compare(x, y) < 0; });
      return e.kind() == ExprKind::kSum ? Expr::sum(std::move(kids))
                                        : Expr::product(std::move(kids));
    }
    case ExprKind::kPower:
      return Expr::pow(canonicalize(e.child(0)), canonicalize(e.child(1)));
    case ExprKind::kQuotient:
      return Expr::quotient(canonicalize(e.child(0)), canonicalize(e.child(1)));
    case ExprKind::kNegate: {
      Expr inner = canonicalize(e.child(0));
      if (inner.kind() == ExprKind::kConstant) {
        return Expr::constant(-inner.constant_value());
      }
      return Expr::negate(std::move(inner));
    }
    case ExprKind::kCall:
      return Expr::call(e.func(), canonicalize(e.child(0)));
  }
  return e;
}

std::string canonical_text(const Expr& e) { return to_text(canonicalize(e)); }

}  // namespace ladder
