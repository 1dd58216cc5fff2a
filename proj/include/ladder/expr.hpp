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

#ifndef LADDER_EXPR_HPP_
#define LADDER_EXPR_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ladder {

// Single-variable algebraic expressions. Values are immutable: every Expr is
// a cheap handle onto a shared, never-mutated node, so expressions can be
// copied, stored and evaluated from any number of threads without
// coordination.

enum class ExprKind {
  kConstant,
  kVariable,  // the single free variable `x`
  kSum,       // n-ary, >= 2 children
  kProduct,   // n-ary, >= 2 children
  kPower,     // children: base, exponent
  kQuotient,  // children: numerator, denominator
  kNegate,    // 1 child
  kCall,      // 1 child, function from the fixed whitelist
};

enum class Func { kSin, kCos, kTan, kAsin, kAcos, kAtan, kExp, kLn, kSqrt, kAbs };

std::string_view func_name(Func f);
std::optional<Func> func_from_name(std::string_view name);

class Expr {
 public:
  // Default-constructed expression is the constant 0.
  Expr();

  static Expr constant(double value);
  static Expr x();
  static Expr sum(std::vector<Expr> terms);        // requires >= 2 terms
  static Expr product(std::vector<Expr> factors);  // requires >= 2 factors
  static Expr pow(Expr base, Expr exponent);
  static Expr quotient(Expr numerator, Expr denominator);
  static Expr negate(Expr inner);
  static Expr call(Func f, Expr argument);

  ExprKind kind() const { return node_->kind; }
  double constant_value() const { return node_->value; }  // kind() == kConstant
  Func func() const { return node_->func; }               // kind() == kCall
  const std::vector<Expr>& children() const { return node_->children; }
  const Expr& child(std::size_t i) const { return node_->children[i]; }

  std::size_t node_count() const;
  bool is_constant(double v) const;

  friend bool operator==(const Expr& a, const Expr& b);  // structural equality
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  struct Node {
    ExprKind kind = ExprKind::kConstant;
    double value = 0.0;
    Func func = Func::kSin;
    std::vector<Expr> children;
  };
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Construction sugar, mostly for tests and rewrite rules.
Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);

// ---------------------------------------------------------------------------
// Parsing

struct ParseError {
  std::size_t offset = 0;      // byte offset into `source`, <= source.size()
  std::string expected;        // what the parser was looking for
  std::string source;
  std::string message() const;
};

using ParseResult = std::variant<Expr, ParseError>;

// Accepts `+ - * / ** ^ ( )`, decimal literals, `x`, the whitelisted
// functions, and implicit multiplication (`2x`, `3(x+1)`, `2sin(x)`).
// `**` binds tightest and is right-associative; `^` is an input alias.
ParseResult parse(std::string_view text);

inline bool parse_ok(const ParseResult& r) { return std::holds_alternative<Expr>(r); }

// ---------------------------------------------------------------------------
// Evaluation

enum class EvalStatus { kOk, kDomainError, kOverflow };

struct EvalResult {
  double value = 0.0;
  EvalStatus status = EvalStatus::kOk;
  // The subexpression whose evaluation failed; meaningful when !ok().
  std::optional<Expr> offender;
  bool ok() const { return status == EvalStatus::kOk; }
};

// Evaluates e at x0. Never yields NaN or infinity through `value`: any
// non-finite outcome (log of a non-positive number, division by zero,
// fractional power of a negative base, overflow, ...) is reported through
// `status` with the offending subexpression attached.
EvalResult evaluate(const Expr& e, double x0);

// ---------------------------------------------------------------------------
// Differentiation

// d/dx by the standard rules. Total over the supported node kinds; applies
// only constant folding (0 + u -> u, 1 * u -> u, ...) so the result stays a
// reasonable size, no other simplification.
Expr differentiate(const Expr& e);

// ---------------------------------------------------------------------------
// Printing and canonicalization

// Plain rendering: emits `**` for powers, parenthesizes exactly enough that
// parse(to_text(e)) reproduces e structurally.
std::string to_text(const Expr& e);

// Children of sums and products sorted under a fixed total order
// (constants first), applied bottom-up. Purely syntactic.
Expr canonicalize(const Expr& e);

// to_text(canonicalize(e)); equal structures yield equal text.
std::string canonical_text(const Expr& e);

// Total order used by canonicalize; exposed for deterministic containers.
int compare(const Expr& a, const Expr& b);

}  // namespace ladder

#endif  // LADDER_EXPR_HPP_
