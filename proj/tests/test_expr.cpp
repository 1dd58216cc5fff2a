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

#include <cmath>
#include <random>

#include <doctest.h>

#include "ladder/expr.hpp"
#include "testutil.hpp"

using namespace ladder;

namespace {

Expr must_parse(std::string_view text) {
  ParseResult r = parse(text);
  REQUIRE_MESSAGE(parse_ok(r), "failed to parse: " << text);
  return std::get<Expr>(r);
}

double eval_or_nan(const Expr& e, double x) {
  const EvalResult r = evaluate(e, x);
  return r.ok() ? r.value : std::nan("");
}

}  // namespace

TEST_SUITE_BEGIN("expr");

TEST_CASE("parse builds the expected structures") {
  const Expr e = must_parse("x**2 + 1");
  REQUIRE(e.kind() == ExprKind::kSum);
  REQUIRE(e.children().size() == 2);
  CHECK(e.child(0).kind() == ExprKind::kPower);
  CHECK(e.child(1).is_constant(1.0));

  const Expr q = must_parse("(x**2 + 1)/(x**4 + 2*x**2 + 1)");
  REQUIRE(q.kind() == ExprKind::kQuotient);
  CHECK(q.child(0).kind() == ExprKind::kSum);
  CHECK(q.child(1).children().size() == 3);
}

TEST_CASE("parse reports dangling operators with offsets") {
  ParseResult r = parse("x + ");
  REQUIRE_FALSE(parse_ok(r));
  const auto& err = std::get<ParseError>(r);
  CHECK(err.offset == 4);
  CHECK(err.offset <= err.source.size());
}

TEST_CASE("parse rejects unknown identifiers and unbalanced parens") {
  CHECK_FALSE(parse_ok(parse("y + 1")));
  CHECK_FALSE(parse_ok(parse("sinh(x)")));
  CHECK_FALSE(parse_ok(parse("(x + 1")));
  CHECK_FALSE(parse_ok(parse("x + 2)")));
  CHECK_FALSE(parse_ok(parse("sin x")));
  CHECK_FALSE(parse_ok(parse("")));
}

TEST_CASE("power binds tightest and is right-associative") {
  CHECK(eval_or_nan(must_parse("2*x**2"), 3.0) == doctest::Approx(18.0));
  CHECK(eval_or_nan(must_parse("-x**2"), 2.0) == doctest::Approx(-4.0));
  // 2**3**2 = 2**(3**2) = 512
  CHECK(eval_or_nan(must_parse("2**3**2"), 0.0) == doctest::Approx(512.0));
  CHECK(eval_or_nan(must_parse("x^3"), 2.0) == doctest::Approx(8.0));
  CHECK(eval_or_nan(must_parse("x**-2"), 2.0) == doctest::Approx(0.25));
}

TEST_CASE("implicit multiplication") {
  CHECK(eval_or_nan(must_parse("2x"), 5.0) == doctest::Approx(10.0));
  CHECK(eval_or_nan(must_parse("3(x+1)"), 2.0) == doctest::Approx(9.0));
  CHECK(eval_or_nan(must_parse("2sin(x)"), 1.0) == doctest::Approx(2.0 * std::sin(1.0)));
  CHECK(eval_or_nan(must_parse("x(x+1)"), 2.0) == doctest::Approx(6.0));
}

TEST_CASE("evaluate basics and domain errors") {
  CHECK(eval_or_nan(must_parse("x**2"), 2.0) == doctest::Approx(4.0));
  CHECK(eval_or_nan(must_parse("1/(x**2+1)"), 0.0) == doctest::Approx(1.0));

  const EvalResult ln_neg = evaluate(must_parse("ln(x)"), -1.0);
  REQUIRE_FALSE(ln_neg.ok());
  CHECK(ln_neg.status == EvalStatus::kDomainError);
  REQUIRE(ln_neg.offender.has_value());
  CHECK(ln_neg.offender->kind() == ExprKind::kCall);

  CHECK_FALSE(evaluate(must_parse("1/x"), 0.0).ok());
  CHECK_FALSE(evaluate(must_parse("sqrt(x)"), -4.0).ok());
  CHECK_FALSE(evaluate(must_parse("asin(x)"), 2.0).ok());
  CHECK_FALSE(evaluate(must_parse("x**0.5"), -1.0).ok());
  CHECK(evaluate(must_parse("exp(x)"), 1000.0).status == EvalStatus::kOverflow);
}

TEST_CASE("evaluate never returns a non-finite value") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> xs(-10.0, 10.0);
  for (int i = 0; i < 300; ++i) {
    const Expr e = testutil::random_expr(rng, 4);
    const EvalResult r = evaluate(e, xs(rng));
    if (r.ok()) {
      CHECK(std::isfinite(r.value));
    } else {
      CHECK(r.offender.has_value());
    }
  }
}

TEST_CASE("differentiate: spec examples") {
  // d/dx x**3/3 == x**2 pointwise
  const Expr d1 = differentiate(must_parse("x**3/3"));
  for (double x : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
    CHECK(eval_or_nan(d1, x) == doctest::Approx(x * x).epsilon(1e-12));
  }
  // d/dx atan(x) == 1/(x**2+1) pointwise
  const Expr d2 = differentiate(must_parse("atan(x)"));
  for (double x : {-3.0, -1.0, 0.0, 0.7, 2.0}) {
    CHECK(eval_or_nan(d2, x) == doctest::Approx(1.0 / (x * x + 1.0)).epsilon(1e-12));
  }
  CHECK(differentiate(must_parse("7")).is_constant(0.0));
}

TEST_CASE("derivative linearity at random points") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> xs(-3.0, 3.0);
  int checked = 0;
  for (int i = 0; i < 60 && checked < 40; ++i) {
    const Expr e1 = testutil::random_expr(rng, 3);
    const Expr e2 = testutil::random_expr(rng, 3);
    const Expr sum_deriv = differentiate(e1 + e2);
    const Expr d1 = differentiate(e1);
    const Expr d2 = differentiate(e2);
    for (int k = 0; k < 5; ++k) {
      const double x = xs(rng);
      const EvalResult ls = evaluate(sum_deriv, x);
      const EvalResult r1 = evaluate(d1, x);
      const EvalResult r2 = evaluate(d2, x);
      if (!ls.ok() || !r1.ok() || !r2.ok()) continue;
      const double want = r1.value + r2.value;
      const double scale = std::max({1.0, std::fabs(want), std::fabs(ls.value)});
      CHECK(std::fabs(ls.value - want) / scale < 1e-10);
      ++checked;
    }
  }
  CHECK(checked >= 40);
}

TEST_CASE("derivative matches central finite differences on smooth terms") {
  // smooth building blocks away from singularities
  const char* exprs[] = {"x**3 + 2*x", "sin(2*x)*x", "exp(0.5*x)", "atan(x) + cos(x)",
                         "ln(x**2 + 2)", "sqrt(x**2 + 1)", "x**2/(x**2 + 3)"};
  const double h = 1e-5;
  for (const char* text : exprs) {
    const Expr e = must_parse(text);
    const Expr de = differentiate(e);
    for (double x : {-2.3, -0.9, 0.4, 1.7, 3.1}) {
      const double fd = (eval_or_nan(e, x + h) - eval_or_nan(e, x - h)) / (2.0 * h);
      const double an = eval_or_nan(de, x);
      const double scale = std::max({1.0, std::fabs(fd), std::fabs(an)});
      CHECK_MESSAGE(std::fabs(fd - an) / scale < 1e-5, text << " at x=" << x);
    }
  }
}

TEST_CASE("canonical_text: ordering examples") {
  CHECK(canonical_text(must_parse("1 + x**2")) == canonical_text(must_parse("x**2 + 1")));
  CHECK(canonical_text(must_parse("sin(x)*2")) == "2*sin(x)");
  // syntactic, not semantic
  CHECK(canonical_text(must_parse("x**2 + 2*x + 1")) !=
        canonical_text(must_parse("(x + 1)**2")));
}

TEST_CASE("round-trip: parse(canonical_text(e)) equals canonicalize(e)") {
  std::mt19937_64 rng(31337);
  for (int i = 0; i < 400; ++i) {
    const Expr e = testutil::random_expr(rng, 4);
    const Expr canon = canonicalize(e);
    const std::string text = to_text(canon);
    ParseResult r = parse(text);
    REQUIRE_MESSAGE(parse_ok(r), "round-trip parse failed: " << text);
    CHECK_MESSAGE(std::get<Expr>(r) == canon, "round-trip mismatch: " << text);
    // canonical text of equal structures is equal
    CHECK(canonical_text(std::get<Expr>(r)) == canonical_text(e));
  }
}

TEST_CASE("plain print round-trips structurally") {
  std::mt19937_64 rng(4242);
  for (int i = 0; i < 400; ++i) {
    Expr e = testutil::random_expr(rng, 4);
    // fold unary minus on literals the way the parser does
    e = canonicalize(e);
    const std::string text = to_text(e);
    ParseResult r = parse(text);
    REQUIRE_MESSAGE(parse_ok(r), "print round-trip failed: " << text);
    CHECK_MESSAGE(std::get<Expr>(r) == e, "structure changed through: " << text);
  }
}

TEST_SUITE_END();
