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

#ifndef LADDER_GRPO_HPP_
#define LADDER_GRPO_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace ladder {

// Group Relative Policy Optimization: group-normalized advantages, the
// ratio - log ratio - 1 KL estimator against a frozen reference policy, and
// the clipped surrogate objective, together with a small differentiable
// policy (linear-softmax over per-problem candidate answers) whose analytic
// gradients make the whole pipeline checkable by finite differences.

struct GrpoConfig {
  int group_size = 8;          // G
  double clip_epsilon = 0.2;   // epsilon
  double kl_coefficient = 0.001;  // beta
  double learning_rate = 0.05;
  int steps = 500;

  void validate() const;  // throws std::invalid_argument
};

// G sampled outputs for one problem: candidate indices, rewards,
// log-probabilities under the current / behavior / reference policies, and
// group-normalized advantages.
struct RolloutGroup {
  int problem = -1;  // index into the ProblemBank
  std::vector<int> outputs;
  std::vector<double> rewards;
  std::vector<double> logp_current;
  std::vector<double> logp_old;
  std::vector<double> logp_ref;
  std::vector<double> advantages;
};

// A_i = (r_i - mean) / population std; all zeros when the rewards are
// constant. Requires >= 2 entries.
std::vector<double> compute_advantages(std::span<const double> rewards);

// rho - log(rho) - 1 with rho = exp(logp_ref - logp_current). Nonnegative,
// zero iff the ratio is one.
double kl_term(double logp_current, double logp_ref);

// (1/G) sum_i [ min(rho_i A_i, clip(rho_i, 1-eps, 1+eps) A_i) - beta * kl_i ]
// with rho_i = exp(logp_current_i - logp_old_i), evaluated on stored values.
double surrogate_objective(const RolloutGroup& group, const GrpoConfig& cfg);

// ---------------------------------------------------------------------------
// Toy policy

// Per-problem candidate answers with their joint problem x answer features;
// logit(q, a) = theta . feature(q, a).
struct CandidateSet {
  std::vector<std::string> answers;            // raw completion texts
  std::vector<std::vector<double>> features;   // one row per answer, length D
};

struct ProblemBank {
  int feature_dim = 0;
  std::vector<CandidateSet> problems;

  int add(CandidateSet set);  // returns the problem index; checks dimensions
};

struct PolicyParams {
  std::vector<double> theta;
};

std::vector<double> policy_logits(const ProblemBank& bank, const PolicyParams& params,
                                  int problem);
std::vector<double> log_softmax(std::span<const double> logits);

// Draws G candidates i.i.d. from softmax(logits); records logp_old at
// sampling time and logp_ref under the frozen reference parameters.
// Rewards and advantages are filled in by the caller.
RolloutGroup policy_sample(const ProblemBank& bank, const PolicyParams& params,
                           const PolicyParams& reference, int problem, int group_size,
                           std::mt19937_64& rng);

int greedy_answer(const ProblemBank& bank, const PolicyParams& params, int problem);

struct StepOutcome {
  bool ok = false;
  PolicyParams params;       // updated parameters when ok
  std::string error;         // diagnostic when !ok
  int offending_group = -1;  // group whose gradient went non-finite
};

// One ascent step on the mean surrogate objective over the groups, with
// logp_current recomputed from `params`. The input params are untouched.
StepOutcome policy_step(const PolicyParams& params, const ProblemBank& bank,
                        std::span<const RolloutGroup> groups, const GrpoConfig& cfg);

// Mean surrogate objective as a function of theta (logp_current recomputed),
// and its analytic gradient. Shared by policy_step and gradient_check.
double objective_at(const PolicyParams& params, const ProblemBank& bank,
                    std::span<const RolloutGroup> groups, const GrpoConfig& cfg,
                    std::vector<double>* gradient_out);

// Max coordinate-wise relative error between the analytic gradient and a
// central finite difference (h = 1e-6). Callers should avoid instances at a
// clip kink.
double gradient_check(const PolicyParams& params, const ProblemBank& bank,
                      std::span<const RolloutGroup> groups, const GrpoConfig& cfg,
                      double h = 1e-6);

// ---------------------------------------------------------------------------
// Checkpoints

struct PolicyCheckpoint {
  std::vector<std::uint64_t> theta_bits;  // bit patterns for exact restore
  int step = 0;
  std::uint64_t config_hash = 0;
};

std::uint64_t policy_config_hash(int feature_dim, const GrpoConfig& cfg);

PolicyCheckpoint make_checkpoint(const PolicyParams& params, int step,
                                 std::uint64_t config_hash);

// Bitwise-exact restore; throws std::runtime_error on config-hash mismatch.
PolicyParams restore_checkpoint(const PolicyCheckpoint& ckpt, std::uint64_t config_hash);

}  // namespace ladder

#endif  // LADDER_GRPO_HPP_
