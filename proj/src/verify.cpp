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

#include "ladder/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ladder {

void VerifyConfig::validate() const {
  if (points < 1) throw std::invalid_argument("VerifyConfig: points must be >= 1");
  if (!(interval_length > 0.0)) {
    throw std::invalid_argument("VerifyConfig: interval_length must be > 0");
  }
  if (!(rel_tol > 0.0)) throw std::invalid_argument("VerifyConfig: rel_tol must be > 0");
  if (!(domain_lo < domain_hi)) {
    throw std::invalid_argument("VerifyConfig: domain must be a nonempty interval");
  }
  if (domain_hi - domain_lo <= interval_length) {
    throw std::invalid_argument("VerifyConfig: domain shorter than the test interval");
  }
  if (max_retries < 0) throw std::invalid_argument("VerifyConfig: max_retries must be >= 0");
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kCorrect: return "correct";
    case Verdict::kIncorrect: return "incorrect";
    case Verdict::kUnverifiable: return "unverifiable";
    case Verdict::kRejectedTrivial: return "rejected-trivial";
  }
  return "?";
}

double draw_point(const VerifyConfig& cfg, std::mt19937_64& rng) {
  const double pad = 0.5 * cfg.interval_length;
  std::uniform_real_distribution<double> dist(cfg.domain_lo + pad, cfg.domain_hi - pad);
  return dist(rng);
}

std::vector<double> sample_points(const VerifyConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  std::vector<double> out(static_cast<std::size_t>(cfg.points));
  for (auto& p : out) p = draw_point(cfg, rng);
  return out;
}

std::optional<std::string> filter_trivial(const Expr& integrand, const Expr& candidate) {
  if (candidate.kind() == ExprKind::kConstant) {
    return "candidate is a constant";
  }
  if (candidate.kind() == ExprKind::kNegate &&
      candidate.child(0).kind() == ExprKind::kConstant) {
    return "candidate is a constant";
  }
  if (canonical_text(candidate) == canonical_text(integrand)) {
    return "candidate echoes the integrand";
  }
  return std::nullopt;
}

std::optional<std::string> filter_trivial_text(const Expr& integrand, std::string_view raw) {
  for (std::string_view marker : {"integrate(", "\xE2\x88\xAB" /* ∫ */, "Integral"}) {
    if (raw.find(marker) != std::string_view::npos) {
      return "answer contains an unevaluated integral marker";
    }
  }
  ParseResult parsed = parse(raw);
  if (!parse_ok(parsed)) {
    return "answer does not parse: " + std::get<ParseError>(parsed).message();
  }
  return filter_trivial(integrand, std::get<Expr>(parsed));
}

namespace {

struct PointOutcome {
  enum Kind { kOk, kResample, kTimeout } kind = kOk;
  PointCheck check;
};

PointOutcome check_point(const Expr& integrand, const Expr& candidate, double center,
                         const VerifyConfig& cfg, const Deadline& deadline) {
  PointOutcome out;
  const double half = 0.5 * cfg.interval_length;
  const double lo = center - half;
  const double hi = center + half;

  // Singularity screening of the integrand over the test interval; a flagged
  // point is discarded and redrawn rather than failed.
  if (probe_singularity(integrand, lo, hi).has_value()) {
    out.kind = PointOutcome::kResample;
    return out;
  }
  const EvalResult c_lo = evaluate(candidate, lo);
  const EvalResult c_hi = evaluate(candidate, hi);
  if (!c_lo.ok() || !c_hi.ok()) {
    out.kind = PointOutcome::kResample;
    return out;
  }

  const QuadratureResult q = integrate(integrand, lo, hi, cfg.quadrature_abs_tol, deadline);
  if (q.status == QuadStatus::kDeadlineExceeded) {
    out.kind = PointOutcome::kTimeout;
    return out;
  }
  if (q.status != QuadStatus::kConverged) {
    // singular or unresolvably rough despite the screen: redraw
    out.kind = PointOutcome::kResample;
    return out;
  }

  const double delta = c_hi.value - c_lo.value;
  const double denom = std::max(std::fabs(q.value), cfg.rel_denominator_floor);
  const double rel = std::fabs(delta - q.value) / denom;
  out.check = PointCheck{center, delta, q.value, rel, rel <= cfg.rel_tol};
  return out;
}

}  // namespace

VerificationReport verify(const Expr& integrand, const Expr& candidate,
                          const VerifyConfig& cfg) {
  cfg.validate();
  VerificationReport report;
  if (auto reason = filter_trivial(integrand, candidate)) {
    report.verdict = Verdict::kRejectedTrivial;
    report.rejection_reason = *reason;
    return report;
  }

  std::mt19937_64 rng(cfg.rng_seed);
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    report.retries_used = attempt;
    const Deadline deadline = Deadline::after(cfg.attempt_deadline);
    std::vector<PointCheck> checks;
    int resamples = 0;
    bool timed_out = false;

    while (static_cast<int>(checks.size()) < cfg.points) {
      if (deadline.expired()) {
        timed_out = true;
        break;
      }
      const double center = draw_point(cfg, rng);
      PointOutcome po = check_point(integrand, candidate, center, cfg, deadline);
      if (po.kind == PointOutcome::kTimeout) {
        timed_out = true;
        break;
      }
      if (po.kind == PointOutcome::kResample) {
        ++report.resamples;
        if (++resamples > cfg.max_resamples_per_attempt) {
          timed_out = true;  // densely singular integrand: treat as a timeout
          break;
        }
        continue;
      }
      checks.push_back(po.check);
    }

    if (!timed_out) {
      report.point_checks = std::move(checks);
      const bool all_passed =
          std::all_of(report.point_checks.begin(), report.point_checks.end(),
                      [](const PointCheck& c) { return c.passed; });
      report.verdict = all_passed ? Verdict::kCorrect : Verdict::kIncorrect;
      return report;
    }
    // timeout: fresh points on the next attempt
  }
  report.verdict = Verdict::kUnverifiable;
  report.retries_used = cfg.max_retries;
  return report;
}

VerificationReport verify_text(const Expr& integrand, std::string_view raw_candidate,
                               const VerifyConfig& cfg) {
  cfg.validate();
  if (auto reason = filter_trivial_text(integrand, raw_candidate)) {
    VerificationReport report;
    report.verdict = Verdict::kRejectedTrivial;
    report.rejection_reason = *reason;
    return report;
  }
  return verify(integrand, std::get<Expr>(parse(raw_candidate)), cfg);
}

}  // namespace ladder
