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

#include "ladder/numint.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ladder {

namespace {

// Gauss-Kronrod 7/15 pair on [-1, 1]. Abscissae are symmetric; the
// odd-indexed Kronrod points are the Gauss-7 nodes. Values verified against
// the polynomial-exactness conditions (degree 22 / degree 13) in 40-digit
// arithmetic.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0,
};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
    0.2044329400752989,  0.2094821410847278,
};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694,
};

constexpr int kMaxDepth = 50;
constexpr int kProbePoints = 33;
constexpr double kRapidChangeRatio = 1e6;   // adjacent-sample ratio trigger
constexpr double kRapidChangeScale = 1e2;   // magnitude gate for ratio/sign triggers
constexpr double kGlobalSpreadRatio = 300.0;  // grid max/min spread trigger
constexpr double kOverflowMagnitude = 1e300;
constexpr double kPoleMagnitude = 1e8;  // depth-cap intervals above this count as singular

struct RuleEval {
  double k15 = 0.0;  // Kronrod estimate
  double g7 = 0.0;   // embedded Gauss estimate
  double max_abs = 0.0;
  bool bad = false;  // domain error / overflow inside the interval
  double bad_at = 0.0;
  SingularityTrigger bad_trigger = SingularityTrigger::kDomainError;
};

RuleEval apply_rule(const Expr& f, double a, double b, long& evaluations) {
  RuleEval out;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fv[15];
  int n = 0;
  double xs[15];
  for (int i = 0; i < 7; ++i) {
    xs[n++] = mid - half * kXgk[i];
    xs[n++] = mid + half * kXgk[i];
  }
  xs[n++] = mid;
  for (int i = 0; i < 15; ++i) {
    EvalResult r = evaluate(f, xs[i]);
    ++evaluations;
    if (!r.ok()) {
      out.bad = true;
      out.bad_at = xs[i];
      out.bad_trigger = r.status == EvalStatus::kOverflow ? SingularityTrigger::kOverflow
                                                          : SingularityTrigger::kDomainError;
      return out;
    }
    fv[i] = r.value;
    out.max_abs = std::max(out.max_abs, std::fabs(r.value));
  }
  // fv layout: pairs (mid - h*x_i, mid + h*x_i) for i = 0..6, then the center.
  double k15 = kWgk[7] * fv[14];
  for (int i = 0; i < 7; ++i) {
    k15 += kWgk[i] * (fv[2 * i] + fv[2 * i + 1]);
  }
  double g7 = kWg[3] * fv[14];
  // Gauss nodes sit at Kronrod indices 1, 3, 5.
  g7 += kWg[0] * (fv[2] + fv[3]);    // x = 0.9491...
  g7 += kWg[1] * (fv[6] + fv[7]);    // x = 0.7415...
  g7 += kWg[2] * (fv[10] + fv[11]);  // x = 0.4058...
  out.k15 = k15 * half;
  out.g7 = g7 * half;
  return out;
}

struct Interval {
  double a, b;
  double tol;
  int depth;
};

}  // namespace

QuadratureResult integrate(const Expr& f, double a, double b, double abs_tol,
                           Deadline deadline) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("integrate: requires finite a < b");
  }
  if (!(abs_tol > 0.0)) {
    throw std::invalid_argument("integrate: requires abs_tol > 0");
  }

  QuadratureResult res;
  std::vector<Interval> stack;
  stack.push_back({a, b, abs_tol, 0});
  bool saw_max_depth = false;

  while (!stack.empty()) {
    if (deadline.expired()) {
      // best effort: fold the coarse estimates of everything still pending
      for (const auto& iv : stack) {
        RuleEval r = apply_rule(f, iv.a, iv.b, res.evaluations);
        if (!r.bad) {
          res.value += r.k15;
          res.error_estimate += std::fabs(r.k15 - r.g7);
        }
      }
      res.status = QuadStatus::kDeadlineExceeded;
      return res;
    }
    const Interval iv = stack.back();
    stack.pop_back();
    RuleEval r = apply_rule(f, iv.a, iv.b, res.evaluations);
    if (r.bad) {
      res.status = QuadStatus::kSingular;
      res.flag = SingularityFlag{r.bad_at, r.bad_trigger};
      return res;
    }
    const double err = std::fabs(r.k15 - r.g7);
    if (err <= iv.tol || (iv.b - iv.a) <= 1e-15 * (std::fabs(iv.a) + std::fabs(iv.b))) {
      res.value += r.k15;
      res.error_estimate += err;
      continue;
    }
    if (iv.depth >= kMaxDepth) {
      if (r.max_abs > kPoleMagnitude) {
        res.status = QuadStatus::kSingular;
        res.flag = SingularityFlag{0.5 * (iv.a + iv.b), SingularityTrigger::kRapidChange};
        return res;
      }
      saw_max_depth = true;
      res.value += r.k15;
      res.error_estimate += err;
      continue;
    }
    const double mid = 0.5 * (iv.a + iv.b);
    stack.push_back({mid, iv.b, 0.5 * iv.tol, iv.depth + 1});
    stack.push_back({iv.a, mid, 0.5 * iv.tol, iv.depth + 1});
  }
  res.status = saw_max_depth ? QuadStatus::kMaxDepth : QuadStatus::kConverged;
  return res;
}

QuadratureResult integrate(const Expr& f, double a, double b, double abs_tol,
                           std::chrono::nanoseconds budget) {
  return integrate(f, a, b, abs_tol, Deadline::after(budget));
}

std::optional<SingularityFlag> probe_singularity(const Expr& f, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("probe_singularity: requires a < b");
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double values[kProbePoints];
  double points[kProbePoints];
  for (int j = 0; j < kProbePoints; ++j) {
    // Chebyshev-spaced, descending from b to a; includes both endpoints.
    const double x = mid + half * std::cos(j * M_PI / (kProbePoints - 1));
    points[j] = x;
    EvalResult r = evaluate(f, x);
    if (!r.ok()) {
      return SingularityFlag{x, r.status == EvalStatus::kOverflow
                                    ? SingularityTrigger::kOverflow
                                    : SingularityTrigger::kDomainError};
    }
    if (std::fabs(r.value) > kOverflowMagnitude) {
      return SingularityFlag{x, SingularityTrigger::kOverflow};
    }
    values[j] = r.value;
  }

  double global_max = 0.0;
  double global_min = std::numeric_limits<double>::infinity();
  int global_max_at = 0;
  for (int j = 0; j < kProbePoints; ++j) {
    const double m = std::fabs(values[j]);
    if (m > global_max) {
      global_max = m;
      global_max_at = j;
    }
    global_min = std::min(global_min, m);
  }

  for (int j = 0; j + 1 < kProbePoints; ++j) {
    const double lo = std::fabs(values[j]);
    const double hi = std::fabs(values[j + 1]);
    const double big = std::max(lo, hi);
    const double small = std::max(std::min(lo, hi), 1e-12);
    if (big < kRapidChangeScale) continue;  // zeros of smooth functions are not poles
    const double at = points[big == lo ? j : j + 1];
    if (big / small > kRapidChangeRatio) {
      return SingularityFlag{at, SingularityTrigger::kRapidChange};
    }
    // odd pole: large magnitudes on both sides of a sign flip
    if (std::min(lo, hi) > kRapidChangeScale &&
        std::signbit(values[j]) != std::signbit(values[j + 1])) {
      return SingularityFlag{at, SingularityTrigger::kRapidChange};
    }
  }

  // even pole away from the grid: a sharp spike over an otherwise moderate
  // grid shows up as an extreme max/min spread
  if (global_max > kRapidChangeScale &&
      global_max / std::max(global_min, 1e-12) > kGlobalSpreadRatio) {
    return SingularityFlag{points[global_max_at], SingularityTrigger::kRapidChange};
  }
  return std::nullopt;
}

}  // namespace ladder
