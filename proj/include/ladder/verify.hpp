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

#ifndef LADDER_VERIFY_HPP_
#define LADDER_VERIFY_HPP_

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ladder/expr.hpp"
#include "ladder/numint.hpp"

namespace ladder {

// Multi-point numerical verification that a candidate expression is an
// antiderivative of an integrand: at randomly sampled centers, the candidate's
// increment over a short interval must match the numerically integrated
// integrand to a relative tolerance. Additive constants cancel by
// construction, so answers are compared "without integration constants".

struct VerifyConfig {
  double domain_lo = -10.0;
  double domain_hi = 10.0;
  int points = 5;
  double interval_length = 0.1;
  double rel_tol = 1e-2;
  std::chrono::milliseconds attempt_deadline{2000};
  int max_retries = 3;
  std::uint64_t rng_seed = 0;

  // Guards below are implementation constants of the protocol, not knobs the
  // paper-level defaults touch.
  double quadrature_abs_tol = 1e-7;   // two orders below rel_tol discrimination
  double rel_denominator_floor = 1e-8;
  int max_resamples_per_attempt = 20;

  void validate() const;  // throws std::invalid_argument
};

enum class Verdict { kCorrect, kIncorrect, kUnverifiable, kRejectedTrivial };

std::string_view verdict_name(Verdict v);

struct PointCheck {
  double center = 0.0;
  double candidate_delta = 0.0;
  double quadrature_value = 0.0;
  double relative_difference = 0.0;
  bool passed = false;
};

struct VerificationReport {
  Verdict verdict = Verdict::kUnverifiable;
  std::vector<PointCheck> point_checks;
  int resamples = 0;
  int retries_used = 0;
  std::string rejection_reason;  // set for kRejectedTrivial
};

// One uniform draw from the domain shrunk by interval_length/2 per side, so
// the test interval always lies inside the domain.
double draw_point(const VerifyConfig& cfg, std::mt19937_64& rng);

// `cfg.points` draws from the same distribution; reproducible from the rng.
std::vector<double> sample_points(const VerifyConfig& cfg, std::mt19937_64& rng);

// Degenerate-answer filters: echoed integrand, unevaluated integral markers,
// constant candidates, unparseable raw text. Returns the rejection reason.
std::optional<std::string> filter_trivial(const Expr& integrand, const Expr& candidate);
std::optional<std::string> filter_trivial_text(const Expr& integrand, std::string_view raw);

// Runs the full protocol. Points adjacent to singularities are resampled;
// an attempt whose quadrature hits the deadline restarts with fresh points,
// up to cfg.max_retries, after which the verdict is kUnverifiable.
// Never throws on mathematical misbehavior (only on an invalid config).
VerificationReport verify(const Expr& integrand, const Expr& candidate,
                          const VerifyConfig& cfg);

// Same protocol starting from raw answer text; adds the text-level trivial
// filters (integral markers, parse failure).
VerificationReport verify_text(const Expr& integrand, std::string_view raw_candidate,
                               const VerifyConfig& cfg);

}  // namespace ladder

#endif  // LADDER_VERIFY_HPP_
