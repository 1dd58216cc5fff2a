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

#ifndef LADDER_SYNTHETIC_HPP_
#define LADDER_SYNTHETIC_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ladder/expr.hpp"
#include "ladder/families.hpp"
#include "ladder/grpo.hpp"
#include "ladder/variants.hpp"

namespace ladder {

// Desk-scale family task for the toy policy. Every problem is a real
// integrand with a finite candidate-answer set built from the family answer
// templates: one exact antiderivative, the other families' template answers,
// and coefficient-corrupted copies. Rewards flow through the full
// verification pipeline.
//
// Difficulty is carried by the problem features. Levels 0-1 (deep variants)
// have clean one-hot family features; level 2 adds a hardness flag whose
// initial parameters boost corrupted answers; levels 3-4 (roots / held-out
// questions) mix family features and add further boosted flags. The base
// policy therefore solves nothing hard until training on easy variants has
// built up the family structure - reward transfers through the shared
// features.

struct SyntheticSpec {
  int train_roots = 10;
  int test_questions = 24;
  int ttrl_questions = 3;
  double mix_primary_l3 = 0.62;  // weight of the true family in level-3 features
  double mix_primary_l4 = 0.5;
  double boost_l2 = 6.0;  // initial corrupted-answer logit boosts per hardness flag
  double boost_l3 = 4.0;
  double boost_l4 = 6.0;
  double corrupt_multipliers[3] = {1.3, 0.75, 1.6};
  std::uint64_t seed = 7;
};

class SyntheticTask {
 public:
  static constexpr int kPhiDim = kFamilyCount + 3;  // family mix + 3 hardness flags
  static constexpr int kPsiDim = kFamilyCount + 1;  // answer family + corrupt flag
  static constexpr int kFeatureDim = kPhiDim * kPsiDim;
  static constexpr int kMaxLevel = 4;

  struct Question {
    std::string id;
    Expr integrand;
    Family family = kFamPower;
    int level = 3;
    int problem = -1;  // bank index
  };

  explicit SyntheticTask(const SyntheticSpec& spec);

  const SyntheticSpec& spec() const { return spec_; }
  ProblemBank& bank() { return bank_; }
  const ProblemBank& bank() const { return bank_; }

  const std::vector<Question>& train_roots() const { return train_roots_; }
  const std::vector<Question>& test_questions() const { return test_questions_; }
  const std::vector<Question>& ttrl_targets() const { return ttrl_targets_; }

  // Initial parameters: zero family structure, corrupted answers boosted on
  // the hardness rows.
  PolicyParams base_params() const;

  // Registers a generated variant at level root_level - depth (equivalent
  // intent keeps the parent's level), clamped to [0, 4]. Returns the bank
  // problem index, or -1 when the integrand falls outside the family table.
  int register_variant(const Expr& integrand, int depth, IntendedDifficulty intended,
                       int root_level);

  const Expr& integrand_of(int problem) const { return integrands_.at(static_cast<std::size_t>(problem)); }
  const std::string& answer_text(int problem, int candidate) const;
  int exact_candidate(int /*problem*/) const { return 0; }  // exact answer is slot 0
  int level_of(int problem) const { return levels_.at(static_cast<std::size_t>(problem)); }

 private:
  int make_problem(const IntegrandMatch& match, const Expr& integrand, int level);
  std::vector<double> phi(Family family, int level, std::uint64_t mix_salt) const;

  SyntheticSpec spec_;
  ProblemBank bank_;
  std::vector<Expr> integrands_;                    // per bank problem
  std::vector<int> levels_;                         // per bank problem
  std::vector<std::vector<std::string>> answers_;   // plain algebra per candidate
  std::map<std::string, int> by_canonical_;         // integrand text -> problem
  std::vector<Question> train_roots_;
  std::vector<Question> test_questions_;
  std::vector<Question> ttrl_targets_;
};

}  // namespace ladder

#endif  // LADDER_SYNTHETIC_HPP_
