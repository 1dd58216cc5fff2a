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

#ifndef LADDER_NUMINT_HPP_
#define LADDER_NUMINT_HPP_

#include <chrono>
#include <optional>

#include "ladder/expr.hpp"

namespace ladder {

// Adaptive definite integration of expression trees: Gauss-Kronrod 7/15
// embedded pair with interval bisection, singularity detection, and
// cooperative deadline enforcement.

enum class QuadStatus { kConverged, kMaxDepth, kSingular, kDeadlineExceeded };

enum class SingularityTrigger { kRapidChange, kOverflow, kDomainError };

struct SingularityFlag {
  double location = 0.0;  // within the queried interval
  SingularityTrigger trigger = SingularityTrigger::kRapidChange;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // absolute
  long evaluations = 0;
  QuadStatus status = QuadStatus::kConverged;
  std::optional<SingularityFlag> flag;  // set when status == kSingular
  bool converged() const { return status == QuadStatus::kConverged; }
};

// Monotonic-clock deadline checked between interval refinements.
class Deadline {
 public:
  static Deadline never() { return Deadline(); }
  static Deadline after(std::chrono::nanoseconds budget) {
    Deadline d;
    d.unbounded_ = false;
    d.at_ = std::chrono::steady_clock::now() + budget;
    return d;
  }
  bool expired() const {
    return !unbounded_ && std::chrono::steady_clock::now() >= at_;
  }

 private:
  bool unbounded_ = true;
  std::chrono::steady_clock::time_point at_{};
};

// Integrates f over [a, b] to absolute tolerance abs_tol. Refines by
// bisection where the embedded 15/7 error estimate exceeds the interval's
// share of the budget; stops at convergence, recursion depth 50, the
// deadline, or evidence of a singularity.
//
// Requires a < b finite and abs_tol > 0 (throws std::invalid_argument).
QuadratureResult integrate(const Expr& f, double a, double b, double abs_tol,
                           Deadline deadline);
QuadratureResult integrate(const Expr& f, double a, double b, double abs_tol,
                           std::chrono::nanoseconds budget);

// Scans a 33-point Chebyshev-spaced grid over [a, b]. Flags a domain error or
// overflow at any grid point, and "rapid change" patterns consistent with a
// pole. Absence of a flag is evidence, not proof, of smoothness.
std::optional<SingularityFlag> probe_singularity(const Expr& f, double a, double b);

}  // namespace ladder

#endif  // LADDER_NUMINT_HPP_
