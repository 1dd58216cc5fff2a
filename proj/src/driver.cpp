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

#include "ladder/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "ladder/parallel.hpp"

namespace ladder {

namespace {

std::uint64_t fnv1a_str(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// 30-step moving average improving by < 0.5% over 50 steps counts as plateau.
bool reward_plateaued(const std::vector<double>& rewards, int min_steps) {
  const int window = 30;
  const int lag = 50;
  const int need = std::max(min_steps, window + lag);
  const int n = static_cast<int>(rewards.size());
  if (n < need) return false;
  const double now = mean_of(std::span<const double>(rewards).subspan(
      static_cast<std::size_t>(n - window), window));
  const double then = mean_of(std::span<const double>(rewards).subspan(
      static_cast<std::size_t>(n - window - lag), window));
  return now - then < 0.005;
}

}  // namespace

void ExperimentConfig::validate() const {
  gen.validate();
  grpo.validate();
  verify.validate();
  if (batch_groups < 1) throw std::invalid_argument("ExperimentConfig: batch_groups >= 1");
  if (curve_every < 1) throw std::invalid_argument("ExperimentConfig: curve_every >= 1");
  if (ttrl_steps < 1 || ttrl_variants < 1 || ttrl_batch_groups < 1 || ttrl_depth_cap < 1) {
    throw std::invalid_argument("ExperimentConfig: TTRL budgets must be positive");
  }
}

// ---------------------------------------------------------------------------
// RewardCache

RewardCache::RewardCache(SyntheticTask& task, const VerifyConfig& verify_cfg,
                         const RewardWeights& weights, bool parallel)
    : task_(task), verify_cfg_(verify_cfg), weights_(weights), parallel_(parallel) {}

RewardBreakdown RewardCache::compute(int problem, int candidate) const {
  const Expr& integrand = task_.integrand_of(problem);
  const std::string& completion =
      task_.bank().problems[static_cast<std::size_t>(problem)]
          .answers[static_cast<std::size_t>(candidate)];
  VerifyConfig cfg = verify_cfg_;
  // deterministic per-pair stream; identical (integrand, candidate) pairs
  // always see identical sample points
  cfg.rng_seed = verify_cfg_.rng_seed ^ fnv1a_str(canonical_text(integrand)) ^
                 fnv1a_str(completion);
  return score(completion, integrand, cfg, weights_);
}

const RewardBreakdown& RewardCache::breakdown(int problem, int candidate) {
  const std::uint64_t key =
      (static_cast<std::uint64_t>(problem) << 16) | static_cast<std::uint64_t>(candidate);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    it = cache_.emplace(key, compute(problem, candidate)).first;
  }
  return it->second;
}

void RewardCache::prefetch(std::span<const std::pair<int, int>> pairs) {
  std::vector<std::pair<int, int>> missing;
  std::vector<std::uint64_t> keys;
  for (const auto& [problem, candidate] : pairs) {
    const std::uint64_t key = (static_cast<std::uint64_t>(problem) << 16) |
                              static_cast<std::uint64_t>(candidate);
    if (!cache_.count(key) &&
        std::find(keys.begin(), keys.end(), key) == keys.end()) {
      missing.emplace_back(problem, candidate);
      keys.push_back(key);
    }
  }
  if (missing.empty()) return;
  std::vector<RewardBreakdown> results(missing.size());
  parallel_for(missing.size(), parallel_, [&](std::size_t i) {
    results[i] = compute(missing[i].first, missing[i].second);
  });
  for (std::size_t i = 0; i < missing.size(); ++i) {
    cache_.emplace(keys[i], std::move(results[i]));
  }
}

// ---------------------------------------------------------------------------
// Training internals

namespace {

struct TrainingSet {
  std::vector<int> problems;  // bank indices
  GenSummary generation;
};

TrainingSet build_training_set(const ExperimentConfig& cfg, Backend& backend,
                               SyntheticTask& task) {
  TrainingSet out;
  if (!cfg.use_variants) {
    for (const auto& q : task.train_roots()) out.problems.push_back(q.problem);
    return out;
  }
  std::vector<Expr> holdout;
  for (const auto& q : task.test_questions()) holdout.push_back(q.integrand);
  for (const auto& q : task.ttrl_targets()) holdout.push_back(q.integrand);

  std::set<int> seen;
  for (const auto& root : task.train_roots()) {
    GenConfig gen = cfg.gen;
    gen.rng_seed = cfg.seed ^ fnv1a_str(root.id);
    gen.parallel = cfg.parallel;
    VariantTree tree = build_tree(root.integrand, gen, backend);
    out.generation.holdout_removed += dedup_against(tree, holdout);
    mark_unsolvable(tree, cfg.solve_budget, table_solve);
    out.generation.counters.requested += tree.counters.requested;
    out.generation.counters.produced += tree.counters.produced;
    out.generation.counters.rejected_duplicate += tree.counters.rejected_duplicate;
    out.generation.counters.unsolvable += tree.counters.unsolvable;
    ++out.generation.trees;
    for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
      const VariantNode& node = tree.nodes[i];
      if (node.solvability != Solvability::kSolvable || !node.expression) continue;
      const int problem =
          task.register_variant(*node.expression, node.depth, node.intended, root.level);
      if (problem >= 0 && seen.insert(problem).second) {
        out.problems.push_back(problem);
        ++out.generation.registered;
      }
    }
  }
  return out;
}

class BatchSampler {
 public:
  BatchSampler(std::vector<int> problems, std::uint64_t seed)
      : problems_(std::move(problems)), rng_(seed) {
    refill();
  }

  std::vector<int> next(int count) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      if (deck_.empty()) refill();
      out.push_back(deck_.back());
      deck_.pop_back();
    }
    return out;
  }

 private:
  void refill() {
    deck_ = problems_;
    for (std::size_t i = deck_.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(deck_[i - 1], deck_[pick(rng_)]);
    }
  }

  std::vector<int> problems_;
  std::mt19937_64 rng_;
  std::vector<int> deck_;
};

// Samples a batch of rollout groups, scores them through the cache, and
// normalizes advantages. Returns the mean total reward across completions.
double sample_and_score(const ExperimentConfig& cfg, SyntheticTask& task,
                        const PolicyParams& params, const PolicyParams& reference,
                        const std::vector<int>& batch, std::mt19937_64& rng,
                        RewardCache& cache, std::vector<RolloutGroup>& groups_out) {
  groups_out.clear();
  for (int problem : batch) {
    groups_out.push_back(policy_sample(task.bank(), params, reference, problem,
                                       cfg.grpo.group_size, rng));
  }
  std::vector<std::pair<int, int>> pairs;
  for (const auto& g : groups_out) {
    for (int output : g.outputs) pairs.emplace_back(g.problem, output);
  }
  cache.prefetch(pairs);

  double reward_sum = 0.0;
  std::size_t reward_count = 0;
  for (auto& g : groups_out) {
    for (std::size_t i = 0; i < g.outputs.size(); ++i) {
      g.rewards[i] = cache.reward(g.problem, g.outputs[i]);
      reward_sum += g.rewards[i];
      ++reward_count;
    }
    g.advantages = compute_advantages(g.rewards);
  }
  return reward_count ? reward_sum / static_cast<double>(reward_count) : 0.0;
}

AnswerRecord answer_question(const SyntheticTask::Question& q, const ProblemBank& bank,
                             const PolicyParams& params, SyntheticTask& task,
                             RewardCache& cache) {
  const int pick = greedy_answer(bank, params, q.problem);
  AnswerRecord rec;
  rec.question_id = q.id;
  rec.answer_text = task.answer_text(q.problem, pick);
  const RewardBreakdown& b = cache.breakdown(q.problem, pick);
  rec.verdict = b.verification ? b.verification->verdict : Verdict::kIncorrect;
  return rec;
}

}  // namespace

double score_test_set(const ProblemBank& bank, const PolicyParams& params,
                      const std::vector<SyntheticTask::Question>& questions,
                      RewardCache& cache) {
  if (questions.empty()) {
    throw std::invalid_argument("score_test_set: empty question set");
  }
  int correct = 0;
  for (const auto& q : questions) {
    const int pick = greedy_answer(bank, params, q.problem);
    if (cache.breakdown(q.problem, pick).accuracy == 1) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(questions.size());
}

LadderResult run_ladder(const ExperimentConfig& cfg, Backend& backend, SyntheticTask& task,
                        const PolicyCheckpoint* resume) {
  cfg.validate();
  if (task.train_roots().empty() || task.test_questions().empty()) {
    throw std::invalid_argument("run_ladder: needs nonempty train and test sets");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t config_hash = policy_config_hash(task.bank().feature_dim, cfg.grpo);

  LadderResult result;
  PolicyParams params = task.base_params();
  const PolicyParams reference = params;  // KL anchor stays at the base policy
  int start_step = 0;
  if (resume) {
    params = restore_checkpoint(*resume, config_hash);
    start_step = resume->step;
  }
  result.base_checkpoint = make_checkpoint(task.base_params(), 0, config_hash);

  TrainingSet training = build_training_set(cfg, backend, task);
  result.generation = training.generation;
  if (training.problems.empty()) {
    throw std::invalid_argument("run_ladder: training set is empty");
  }

  RewardCache cache(task, cfg.verify, cfg.weights, cfg.parallel);
  BatchSampler sampler(training.problems, cfg.seed ^ 0x5eedbea7ULL);
  std::mt19937_64 rollout_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  auto wall_s = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  auto emit_curve_point = [&](int step, double reward_mean) {
    result.curve.push_back(TrainingCurvePoint{
        step, reward_mean,
        score_test_set(task.bank(), params, task.test_questions(), cache), wall_s()});
  };

  std::vector<double> reward_history;
  std::vector<RolloutGroup> groups;
  for (int step = start_step + 1; step <= start_step + cfg.grpo.steps; ++step) {
    const std::vector<int> batch = sampler.next(cfg.batch_groups);
    const double reward_mean =
        sample_and_score(cfg, task, params, reference, batch, rollout_rng, cache, groups);
    const StepOutcome outcome = policy_step(params, task.bank(), groups, cfg.grpo);
    if (!outcome.ok) {
      result.aborted = true;
      result.abort_reason = outcome.error + " (group " +
                            std::to_string(outcome.offending_group) + ")";
      result.final_checkpoint = make_checkpoint(params, step - 1, config_hash);
      break;
    }
    params = outcome.params;
    reward_history.push_back(reward_mean);
    result.steps_run = step;
    if ((step - start_step) % cfg.curve_every == 0) emit_curve_point(step, reward_mean);
    if (cfg.plateau_stop && reward_plateaued(reward_history, cfg.plateau_min_steps)) break;
  }

  if (!result.aborted) {
    result.final_checkpoint = make_checkpoint(params, result.steps_run, config_hash);
  }
  result.policy = params;
  for (const auto& q : task.test_questions()) {
    result.answers.push_back(answer_question(q, task.bank(), params, task, cache));
  }
  result.final_test_score = score_test_set(task.bank(), params, task.test_questions(), cache);
  if (result.curve.empty() || result.curve.back().step != result.steps_run) {
    emit_curve_point(result.steps_run,
                     reward_history.empty() ? 0.0 : reward_history.back());
  }
  return result;
}

TtrlResult run_ttrl(const ExperimentConfig& cfg, Backend& backend, SyntheticTask& task,
                    const PolicyCheckpoint& base) {
  cfg.validate();
  const std::uint64_t config_hash = policy_config_hash(task.bank().feature_dim, cfg.grpo);
  TtrlResult result;

  std::vector<Expr> holdout;
  for (const auto& q : task.test_questions()) holdout.push_back(q.integrand);
  for (const auto& q : task.ttrl_targets()) holdout.push_back(q.integrand);

  for (const auto& q : task.ttrl_targets()) {
    TtrlQuestionReport report;
    report.question_id = q.id;

    // fresh policy from the base checkpoint for every question
    PolicyParams params = restore_checkpoint(base, config_hash);
    const PolicyParams reference = params;
    RewardCache cache(task, cfg.verify, cfg.weights, cfg.parallel);

    GenConfig gen = cfg.gen;
    gen.depth_cap = cfg.ttrl_depth_cap;
    gen.target_n = cfg.ttrl_variants;
    gen.rng_seed = cfg.seed ^ fnv1a_str(q.id);
    gen.parallel = cfg.parallel;
    // widen the fanout until a depth-capped tree can hold the variant budget
    // with headroom for duplicate rejections
    while (gen.fanout < cfg.ttrl_variants) {
      long capacity = 0, layer = 1;
      for (int d = 0; d < gen.depth_cap; ++d) {
        layer *= gen.fanout;
        capacity += layer;
      }
      if (capacity >= 2L * cfg.ttrl_variants) break;
      ++gen.fanout;
    }
    VariantTree tree = build_tree(q.integrand, gen, backend);
    dedup_against(tree, holdout);
    mark_unsolvable(tree, cfg.solve_budget, table_solve);
    report.gen_counters = tree.counters;

    std::vector<int> problems;
    std::set<int> seen;
    for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
      const VariantNode& node = tree.nodes[i];
      if (node.solvability != Solvability::kSolvable || !node.expression) continue;
      const int problem =
          task.register_variant(*node.expression, node.depth, node.intended, q.level);
      if (problem >= 0 && seen.insert(problem).second) problems.push_back(problem);
    }

    if (!problems.empty()) {
      BatchSampler sampler(problems, cfg.seed ^ fnv1a_str(q.id) ^ 0x7715ULL);
      std::mt19937_64 rollout_rng(cfg.seed ^ fnv1a_str(q.id) ^ 0x41ULL);
      std::vector<RolloutGroup> groups;
      for (int step = 1; step <= cfg.ttrl_steps; ++step) {
        const std::vector<int> batch = sampler.next(cfg.ttrl_batch_groups);
        sample_and_score(cfg, task, params, reference, batch, rollout_rng, cache, groups);
        const StepOutcome outcome = policy_step(params, task.bank(), groups, cfg.grpo);
        if (!outcome.ok) break;  // recorded as unsolved; the sweep continues
        params = outcome.params;
        report.steps_run = step;
        // "solved at any point": score the greedy answer after every step
        const int pick = greedy_answer(task.bank(), params, q.problem);
        if (cache.breakdown(q.problem, pick).accuracy == 1) {
          report.solved = true;
          report.solved_at_step = step;
          break;
        }
      }
    }

    AnswerRecord answer = answer_question(q, task.bank(), params, task, cache);
    report.answer_text = answer.answer_text;
    report.verdict = answer.verdict;
    result.answers.push_back(std::move(answer));

    // roll back to the base parameters before the next question
    params = restore_checkpoint(base, config_hash);
    report.rollback_verified =
        make_checkpoint(params, 0, config_hash).theta_bits == base.theta_bits;
    if (report.solved) ++result.solved_count;
    result.reports.push_back(std::move(report));
  }
  return result;
}

std::vector<std::pair<int, double>> variant_scaling_sweep(const ExperimentConfig& cfg,
                                                          const std::vector<int>& n_values,
                                                          int seeds) {
  if (n_values.size() < 2) {
    throw std::invalid_argument("variant_scaling_sweep: needs >= 2 values of N");
  }
  if (seeds < 1) throw std::invalid_argument("variant_scaling_sweep: seeds >= 1");
  std::vector<std::pair<int, double>> series;
  for (int n : n_values) {
    double total = 0.0;
    for (int s = 0; s < seeds; ++s) {
      ExperimentConfig run_cfg = cfg;
      run_cfg.gen.target_n = n;
      run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(s) * 1000003ULL;
      SyntheticTask task(cfg.task);
      MockBackend backend(run_cfg.seed, make_variant_responder());
      total += run_ladder(run_cfg, backend, task).final_test_score;
    }
    series.emplace_back(n, total / static_cast<double>(seeds));
  }
  return series;
}

}  // namespace ladder
