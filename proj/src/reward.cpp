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

#include "ladder/reward.hpp"

#include <stdexcept>

namespace ladder {

namespace {
constexpr std::string_view kOpenTag = "<ANSWER>";
constexpr std::string_view kCloseTag = "</ANSWER>";
}  // namespace

std::optional<std::string> extract_answer(std::string_view raw) {
  // Last well-formed pair wins: models often revise, the final answer is the
  // intended one.
  const std::size_t close = raw.rfind(kCloseTag);
  if (close == std::string_view::npos) return std::nullopt;
  const std::size_t open = raw.rfind(kOpenTag, close);
  if (open == std::string_view::npos) return std::nullopt;
  const std::size_t begin = open + kOpenTag.size();
  return std::string(raw.substr(begin, close - begin));
}

Completion parse_completion(std::string_view raw) {
  Completion c;
  c.raw_text = std::string(raw);
  c.extracted_answer = extract_answer(raw);
  if (c.extracted_answer) {
    ParseResult r = parse(*c.extracted_answer);
    if (parse_ok(r)) c.answer_expression = std::get<Expr>(r);
  }
  return c;
}

RewardBreakdown score(std::string_view completion_raw, const Expr& integrand,
                      const VerifyConfig& cfg, const RewardWeights& weights) {
  if (weights.accuracy < 0.0 || weights.format < 0.0) {
    throw std::invalid_argument("score: reward weights must be nonnegative");
  }
  RewardBreakdown out;
  const std::optional<std::string> answer = extract_answer(completion_raw);
  if (answer) {
    out.format = 1;
    VerificationReport report = verify_text(integrand, *answer, cfg);
    out.accuracy = report.verdict == Verdict::kCorrect ? 1 : 0;
    out.verification = std::move(report);
  }
  out.total = weights.accuracy * out.accuracy + weights.format * out.format;
  return out;
}

}  // namespace ladder
