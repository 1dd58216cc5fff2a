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

#include "ladder/families.hpp"

#include <cmath>

namespace ladder {

std::string_view family_name(Family f) {
  switch (f) {
    case kFamPower: return "power";
    case kFamRecipQuad: return "recip_quad";
    case kFamExponential: return "exponential";
    case kFamSine: return "sine";
    case kFamCosine: return "cosine";
    case kFamInversePower: return "inverse_power";
    default: return "?";
  }
}

namespace {

// a*x + b with constant a, b; handles nested products, sums and negation.
struct Affine {
  double a = 0.0;
  double b = 0.0;
};

std::optional<Affine> match_affine(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::kConstant:
      return Affine{0.0, e.constant_value()};
    case ExprKind::kVariable:
      return Affine{1.0, 0.0};
    case ExprKind::kNegate: {
      auto inner = match_affine(e.child(0));
      if (!inner) return std::nullopt;
      return Affine{-inner->a, -inner->b};
    }
    case ExprKind::kSum: {
      Affine acc;
      for (const auto& c : e.children()) {
        auto part = match_affine(c);
        if (!part) return std::nullopt;
        acc.a += part->a;
        acc.b += part->b;
      }
      return acc;
    }
    case ExprKind::kQuotient: {
      if (e.child(1).kind() != ExprKind::kConstant) return std::nullopt;
      const double d = e.child(1).constant_value();
      if (d == 0.0) return std::nullopt;
      auto inner = match_affine(e.child(0));
      if (!inner) return std::nullopt;
      return Affine{inner->a / d, inner->b / d};
    }
    case ExprKind::kProduct: {
      // constants times exactly one affine factor
      double scale = 1.0;
      std::optional<Affine> core;
      for (const auto& c : e.children()) {
        if (c.kind() == ExprKind::kConstant) {
          scale *= c.constant_value();
          continue;
        }
        auto part = match_affine(c);
        if (!part || core.has_value()) return std::nullopt;
        core = part;
      }
      if (!core) return Affine{0.0, scale};
      return Affine{scale * core->a, scale * core->b};
    }
    default:
      return std::nullopt;
  }
}

std::optional<int> match_int(double v, int lo, int hi) {
  const double r = std::round(v);
  if (std::fabs(v - r) > 1e-12) return std::nullopt;
  const int n = static_cast<int>(r);
  if (n < lo || n > hi) return std::nullopt;
  return n;
}

// Splits a term into (constant multiplier, non-constant core factors).
void peel_constants(const Expr& e, double& scale, std::vector<Expr>& core) {
  switch (e.kind()) {
    case ExprKind::kConstant:
      scale *= e.constant_value();
      return;
    case ExprKind::kNegate:
      scale = -scale;
      peel_constants(e.child(0), scale, core);
      return;
    case ExprKind::kProduct:
      for (const auto& c : e.children()) peel_constants(c, scale, core);
      return;
    default:
      core.push_back(e);
      return;
  }
}

// k2 * x^2 + k0 with k2, k0 > 0 in any syntactic arrangement of a flat sum.
std::optional<std::pair<double, double>> match_quadratic_den(const Expr& e) {
  std::vector<Expr> terms;
  if (e.kind() == ExprKind::kSum) {
    terms = e.children();
  } else {
    terms = {e};
  }
  double k2 = 0.0, k0 = 0.0;
  for (const auto& t : terms) {
    double scale = 1.0;
    std::vector<Expr> core;
    peel_constants(t, scale, core);
    if (core.empty()) {
      k0 += scale;
      continue;
    }
    if (core.size() == 1 && core[0].kind() == ExprKind::kPower &&
        core[0].child(0).kind() == ExprKind::kVariable &&
        core[0].child(1).is_constant(2.0)) {
      k2 += scale;
      continue;
    }
    return std::nullopt;
  }
  if (k2 <= 0.0 || k0 <= 0.0) return std::nullopt;
  return std::make_pair(k2, k0);
}

std::optional<UnitMatch> match_unit(const Expr& term) {
  // quotient forms first: c / (x^2 + a), c / x^m
  if (term.kind() == ExprKind::kQuotient) {
    const Expr& num = term.child(0);
    const Expr& den = term.child(1);
    double num_scale = 1.0;
    std::vector<Expr> num_core;
    peel_constants(num, num_scale, num_core);
    if (!num_core.empty()) return std::nullopt;  // only constant numerators

    double den_scale = 1.0;
    std::vector<Expr> den_core;
    peel_constants(den, den_scale, den_core);
    if (den_core.size() == 1 && den_scale != 0.0) {
      const Expr& d = den_core[0];
      if (d.kind() == ExprKind::kVariable) {
        return UnitMatch{kFamInversePower, num_scale / den_scale, 1.0, 0.0, 1};
      }
      if (d.kind() == ExprKind::kPower && d.child(0).kind() == ExprKind::kVariable &&
          d.child(1).kind() == ExprKind::kConstant) {
        if (auto m = match_int(d.child(1).constant_value(), 1, 12)) {
          return UnitMatch{kFamInversePower, num_scale / den_scale, 1.0, 0.0, *m};
        }
        return std::nullopt;
      }
    }
    if (auto quad = match_quadratic_den(den)) {
      const auto [k2, k0] = *quad;
      return UnitMatch{kFamRecipQuad, num_scale / k2, k0 / k2, 0.0, 0};
    }
    return std::nullopt;
  }

  double scale = 1.0;
  std::vector<Expr> core;
  peel_constants(term, scale, core);
  if (core.empty()) {
    return UnitMatch{kFamPower, scale, 0.0, 0.0, 0};  // constant: c * x^0
  }
  if (core.size() != 1) return std::nullopt;
  const Expr& u = core[0];

  if (u.kind() == ExprKind::kQuotient) {
    // scaled quotient, e.g. 2*(3/(x^2+1))
    auto inner = match_unit(u);
    if (!inner) return std::nullopt;
    inner->c *= scale;
    return inner;
  }

  if (u.kind() == ExprKind::kVariable) {
    return UnitMatch{kFamPower, scale, 0.0, 0.0, 1};
  }
  if (u.kind() == ExprKind::kPower && u.child(0).kind() == ExprKind::kVariable &&
      u.child(1).kind() == ExprKind::kConstant) {
    const double p = u.child(1).constant_value();
    if (auto n = match_int(p, 0, 12)) {
      return UnitMatch{kFamPower, scale, 0.0, 0.0, *n};
    }
    if (auto m = match_int(-p, 1, 12)) {
      return UnitMatch{kFamInversePower, scale, 1.0, 0.0, *m};
    }
    return std::nullopt;
  }
  if (u.kind() == ExprKind::kCall) {
    auto arg = match_affine(u.child(0));
    if (!arg || arg->a == 0.0) return std::nullopt;
    switch (u.func()) {
      case Func::kExp:
        return UnitMatch{kFamExponential, scale, arg->a, arg->b, 0};
      case Func::kSin:
        return UnitMatch{kFamSine, scale, arg->a, arg->b, 0};
      case Func::kCos:
        return UnitMatch{kFamCosine, scale, arg->a, arg->b, 0};
      default:
        return std::nullopt;
    }
  }
  return std::nullopt;
}

void collect_terms(const Expr& e, double sign, std::vector<std::pair<Expr, double>>& out) {
  if (e.kind() == ExprKind::kSum) {
    for (const auto& c : e.children()) collect_terms(c, sign, out);
    return;
  }
  if (e.kind() == ExprKind::kNegate) {
    collect_terms(e.child(0), -sign, out);
    return;
  }
  out.emplace_back(e, sign);
}

Expr scaled(double c, Expr core) {
  if (c == 1.0) return core;
  if (c == -1.0) return Expr::negate(std::move(core));
  return Expr::product({Expr::constant(c), std::move(core)});
}

Expr affine_arg(double a, double b) {
  Expr ax = a == 1.0 ? Expr::x() : Expr::product({Expr::constant(a), Expr::x()});
  if (b == 0.0) return ax;
  return Expr::sum({std::move(ax), Expr::constant(b)});
}

}  // namespace

std::optional<IntegrandMatch> recognize_integrand(const Expr& e) {
  std::vector<std::pair<Expr, double>> terms;
  collect_terms(e, 1.0, terms);
  IntegrandMatch match;
  for (const auto& [term, sign] : terms) {
    auto u = match_unit(term);
    if (!u) return std::nullopt;
    u->c *= sign;
    if (!std::isfinite(u->c) || u->c == 0.0) return std::nullopt;
    match.units.push_back(*u);
  }
  if (match.units.empty()) return std::nullopt;
  return match;
}

Expr unit_integrand(const UnitMatch& u) {
  switch (u.family) {
    case kFamPower:
      if (u.n == 0) return Expr::constant(u.c);
      if (u.n == 1) return scaled(u.c, Expr::x());
      return scaled(u.c, Expr::pow(Expr::x(), Expr::constant(u.n)));
    case kFamRecipQuad:
      return Expr::quotient(Expr::constant(u.c),
                            Expr::sum({Expr::pow(Expr::x(), Expr::constant(2.0)),
                                       Expr::constant(u.a)}));
    case kFamExponential:
      return scaled(u.c, Expr::call(Func::kExp, affine_arg(u.a, u.b)));
    case kFamSine:
      return scaled(u.c, Expr::call(Func::kSin, affine_arg(u.a, u.b)));
    case kFamCosine:
      return scaled(u.c, Expr::call(Func::kCos, affine_arg(u.a, u.b)));
    case kFamInversePower:
      return Expr::quotient(Expr::constant(u.c),
                            u.n == 1 ? Expr::x()
                                     : Expr::pow(Expr::x(), Expr::constant(u.n)));
    default:
      return Expr::constant(0.0);
  }
}

Expr unit_antiderivative(const UnitMatch& u) {
  switch (u.family) {
    case kFamPower:
      // c x^n -> c x^(n+1) / (n+1)
      return scaled(u.c / (u.n + 1.0),
                    u.n == 0 ? Expr::x() : Expr::pow(Expr::x(), Expr::constant(u.n + 1.0)));
    case kFamRecipQuad: {
      // c / (x^2 + a) -> (c / sqrt(a)) atan(x / sqrt(a))
      const double root = std::sqrt(u.a);
      Expr arg = root == 1.0 ? Expr::x() : Expr::quotient(Expr::x(), Expr::constant(root));
      return scaled(u.c / root, Expr::call(Func::kAtan, std::move(arg)));
    }
    case kFamExponential:
      return scaled(u.c / u.a, Expr::call(Func::kExp, affine_arg(u.a, u.b)));
    case kFamSine:
      return scaled(-u.c / u.a, Expr::call(Func::kCos, affine_arg(u.a, u.b)));
    case kFamCosine:
      return scaled(u.c / u.a, Expr::call(Func::kSin, affine_arg(u.a, u.b)));
    case kFamInversePower:
      if (u.n == 1) {
        // c / x -> c ln|x|
        return scaled(u.c, Expr::call(Func::kLn, Expr::call(Func::kAbs, Expr::x())));
      }
      // c / x^m -> -c / ((m-1) x^(m-1))
      return Expr::negate(Expr::quotient(
          Expr::constant(u.c / (u.n - 1.0)),
          u.n == 2 ? Expr::x() : Expr::pow(Expr::x(), Expr::constant(u.n - 1.0))));
    default:
      return Expr::constant(0.0);
  }
}

Expr antiderivative(const IntegrandMatch& m) {
  std::vector<Expr> parts;
  parts.reserve(m.units.size());
  for (const auto& u : m.units) parts.push_back(unit_antiderivative(u));
  if (parts.size() == 1) return parts[0];
  return Expr::sum(std::move(parts));
}

std::optional<Expr> table_solve(const Expr& integrand, const Deadline& deadline) {
  if (deadline.expired()) return std::nullopt;
  auto match = recognize_integrand(integrand);
  if (!match) return std::nullopt;
  Expr candidate = antiderivative(*match);
  // cross-check: d/dx candidate must agree with the integrand pointwise
  const Expr derivative = differentiate(candidate);
  int compared = 0;
  for (double x : {-7.3, -3.1, -0.7, 0.4, 1.9, 4.6, 8.2}) {
    if (deadline.expired()) return std::nullopt;
    const EvalResult want = evaluate(integrand, x);
    const EvalResult got = evaluate(derivative, x);
    if (!want.ok() || !got.ok()) continue;  // shared singularities are fine
    const double scale = std::max({std::fabs(want.value), std::fabs(got.value), 1e-9});
    if (std::fabs(want.value - got.value) / scale > 1e-8) return std::nullopt;
    ++compared;
  }
  if (compared < 3) return std::nullopt;
  return candidate;
}

}  // namespace ladder
