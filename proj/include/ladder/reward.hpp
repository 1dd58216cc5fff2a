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

#ifndef LADDER_REWARD_HPP_
#define LADDER_REWARD_HPP_

#include <optional>
#include <string>
#include <string_view>

#include "ladder/expr.hpp"
#include "ladder/verify.hpp"

namespace ladder {

// Rule-based scalar reward for a raw model completion: a format component
// for answering inside <ANSWER></ANSWER> tags and an accuracy component
// gated on the numerical verifier.

struct Completion {
  std::string raw_text;
  std::optional<std::string> extracted_answer;
  std::optional<Expr> answer_expression;  // present only if the answer parses
};

// Contents of the last well-formed <ANSWER>...</ANSWER> pair, if any.
std::optional<std::string> extract_answer(std::string_view raw);

Completion parse_completion(std::string_view raw);

struct RewardWeights {
  double accuracy = 1.0;
  double format = 0.1;
};

struct RewardBreakdown {
  int accuracy = 0;  // 1 iff format passed, trivial filters passed, verifier says correct
  int format = 0;    // 1 iff a well-formed answer tag pair exists
  double total = 0.0;
  std::optional<VerificationReport> verification;
};

// All failure paths map to zero components; never throws on bad input text.
RewardBreakdown score(std::string_view completion_raw, const Expr& integrand,
                      const VerifyConfig& cfg, const RewardWeights& weights);

}  // namespace ladder

#endif  // LADDER_REWARD_HPP_
