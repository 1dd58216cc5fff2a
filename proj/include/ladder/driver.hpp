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

#ifndef LADDER_DRIVER_HPP_
#define LADDER_DRIVER_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ladder/backend.hpp"
#include "ladder/grpo.hpp"
#include "ladder/reward.hpp"
#include "ladder/synthetic.hpp"
#include "ladder/variants.hpp"
#include "ladder/verify.hpp"

namespace ladder {

// Orchestration of the two training loops: LADDER (build per-root variant
// trees, train with GRPO over solvable variants, answer the test set) and
// TTRL (per test question: variant tree, short training run from a base
// checkpoint, answer, roll back).

struct ExperimentConfig {
  SyntheticSpec task;
  GenConfig gen;          // LADDER tree generation (depth cap 3 regime)
  GrpoConfig grpo;
  VerifyConfig verify;
  RewardWeights weights{1.0, 0.0};  // toy completions are always well tagged
  int batch_groups = 8;   // rollout groups per training step
  int curve_every = 10;
  bool use_variants = true;  // false: train on the hard roots only
  bool plateau_stop = true;
  int plateau_min_steps = 120;
  std::chrono::milliseconds solve_budget{5000};  // unsolvable-variant threshold
  int ttrl_steps = 100;
  int ttrl_variants = 800;
  int ttrl_batch_groups = 8;
  int ttrl_depth_cap = 2;
  std::uint64_t seed = 1;
  bool parallel = true;  // OpenMP batch scoring / tree building

  void validate() const;  // throws std::invalid_argument
};

struct TrainingCurvePoint {
  int step = 0;
  double train_reward_mean = 0.0;
  double test_score = 0.0;  // percent
  double wall_time_s = 0.0;
};

struct AnswerRecord {
  std::string question_id;
  std::string answer_text;
  Verdict verdict = Verdict::kIncorrect;
};

struct GenSummary {
  TreeCounters counters;  // aggregated over all roots
  int trees = 0;
  int holdout_removed = 0;
  int registered = 0;  // solvable variants that entered the training set
};

// Deterministic memoized reward scorer over the task's candidate sets; the
// cache makes repeated sampling of the same (problem, candidate) pair free
// and misses are verified in parallel.
class RewardCache {
 public:
  RewardCache(SyntheticTask& task, const VerifyConfig& verify_cfg,
              const RewardWeights& weights, bool parallel);

  const RewardBreakdown& breakdown(int problem, int candidate);
  double reward(int problem, int candidate) { return breakdown(problem, candidate).total; }
  void prefetch(std::span<const std::pair<int, int>> pairs);
  std::size_t size() const { return cache_.size(); }

 private:
  RewardBreakdown compute(int problem, int candidate) const;

  SyntheticTask& task_;
  VerifyConfig verify_cfg_;
  RewardWeights weights_;
  bool parallel_;
  std::unordered_map<std::uint64_t, RewardBreakdown> cache_;
};

struct LadderResult {
  PolicyParams policy;
  PolicyCheckpoint base_checkpoint;
  PolicyCheckpoint final_checkpoint;
  std::vector<AnswerRecord> answers;
  std::vector<TrainingCurvePoint> curve;
  GenSummary generation;
  double final_test_score = 0.0;  // percent on the held-out questions
  int steps_run = 0;
  bool aborted = false;
  std::string abort_reason;
};

struct TtrlQuestionReport {
  std::string question_id;
  bool solved = false;
  int solved_at_step = -1;
  int steps_run = 0;
  std::string answer_text;
  Verdict verdict = Verdict::kIncorrect;
  TreeCounters gen_counters;
  bool rollback_verified = false;  // live params bitwise equal the base afterwards
};

struct TtrlResult {
  std::vector<TtrlQuestionReport> reports;
  std::vector<AnswerRecord> answers;
  int solved_count = 0;
};

// Algorithm: build variant trees for every training root (unless
// use_variants is off), train GRPO over the solvable variants for cfg
// steps or until the reward plateaus, then answer each held-out question
// greedily. `resume` continues step numbering from a prior checkpoint.
LadderResult run_ladder(const ExperimentConfig& cfg, Backend& backend, SyntheticTask& task,
                        const PolicyCheckpoint* resume = nullptr);

// Per-question loop: fresh tree, at most cfg.ttrl_steps from the base
// checkpoint, greedy answer scored after every step ("solved at any point"),
// rollback before the next question. Per-question failures never abort the
// sweep.
TtrlResult run_ttrl(const ExperimentConfig& cfg, Backend& backend, SyntheticTask& task,
                    const PolicyCheckpoint& base);

// One greedy (temperature-0) answer per question; percent verified correct.
// Throws std::invalid_argument on an empty question list.
double score_test_set(const ProblemBank& bank, const PolicyParams& params,
                      const std::vector<SyntheticTask::Question>& questions,
                      RewardCache& cache);

// run_ladder per N (fresh task and seeds per run), averaged over `seeds`.
// Returns (N, mean score). Requires >= 2 values of N.
std::vector<std::pair<int, double>> variant_scaling_sweep(const ExperimentConfig& cfg,
                                                          const std::vector<int>& n_values,
                                                          int seeds);

}  // namespace ladder

#endif  // LADDER_DRIVER_HPP_
