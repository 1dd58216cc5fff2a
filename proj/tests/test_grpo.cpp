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

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "ladder/grpo.hpp"

using namespace ladder;

namespace {

// A small random policy instance: bank with one problem, params, and groups
// whose logp_old / logp_ref are perturbed off the current values, keeping the
// likelihood ratios away from the clip kinks.
struct Instance {
  ProblemBank bank;
  PolicyParams params;
  std::vector<RolloutGroup> groups;
};

Instance random_instance(std::mt19937_64& rng, const GrpoConfig& cfg) {
  std::uniform_int_distribution<int> dim_dist(4, 12);
  std::uniform_int_distribution<int> cand_dist(3, 8);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Instance inst;
  const int dim = dim_dist(rng);
  inst.bank.feature_dim = dim;
  const int n_problems = 2;
  for (int q = 0; q < n_problems; ++q) {
    CandidateSet set;
    const int k = cand_dist(rng);
    for (int a = 0; a < k; ++a) {
      set.answers.push_back("a" + std::to_string(a));
      std::vector<double> row(static_cast<std::size_t>(dim));
      for (auto& v : row) v = unit(rng);
      set.features.push_back(std::move(row));
    }
    inst.bank.add(std::move(set));
  }
  inst.params.theta.resize(static_cast<std::size_t>(dim));
  for (auto& v : inst.params.theta) v = 0.5 * unit(rng);

  std::uniform_real_distribution<double> adv(-2.0, 2.0);
  std::uniform_real_distribution<double> delta(-0.3, 0.3);
  for (int g = 0; g < 2; ++g) {
    const int q = g % n_problems;
    const auto logits = policy_logits(inst.bank, inst.params, q);
    const auto logp = log_softmax(logits);
    RolloutGroup group;
    group.problem = q;
    std::uniform_int_distribution<int> pick(0, static_cast<int>(logp.size()) - 1);
    for (int i = 0; i < cfg.group_size; ++i) {
      const int a = pick(rng);
      group.outputs.push_back(a);
      group.logp_current.push_back(logp[static_cast<std::size_t>(a)]);
      double d = delta(rng);
      // keep rho away from the clip boundary so the objective is smooth
      const double rho = std::exp(-d);
      if (std::fabs(rho - (1.0 - cfg.clip_epsilon)) < 2e-2 ||
          std::fabs(rho - (1.0 + cfg.clip_epsilon)) < 2e-2) {
        d = 0.0;
      }
      group.logp_old.push_back(logp[static_cast<std::size_t>(a)] + d);
      group.logp_ref.push_back(logp[static_cast<std::size_t>(a)] + delta(rng));
      group.rewards.push_back(0.0);
      group.advantages.push_back(adv(rng));
    }
    inst.groups.push_back(std::move(group));
  }
  return inst;
}

}  // namespace

TEST_SUITE_BEGIN("grpo");

TEST_CASE("compute_advantages: hand-derived cases") {
  const std::vector<double> a = compute_advantages(std::vector<double>{1, 0, 0, 1});
  REQUIRE(a.size() == 4);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == -1.0);
  CHECK(a[2] == -1.0);
  CHECK(a[3] == 1.0);

  const std::vector<double> zeros = compute_advantages(std::vector<double>{1, 1, 1, 1});
  for (double v : zeros) CHECK(v == 0.0);

  const std::vector<double> two = compute_advantages(std::vector<double>{2, 0});
  CHECK(two[0] == 1.0);
  CHECK(two[1] == -1.0);

  CHECK_THROWS_AS(compute_advantages(std::vector<double>{1}), std::invalid_argument);
}

TEST_CASE("compute_advantages: normalization, translation and scaling invariance") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> r(-3.0, 3.0);
  std::uniform_int_distribution<int> size(2, 16);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> rewards(static_cast<std::size_t>(size(rng)));
    for (auto& v : rewards) v = r(rng);
    const auto adv = compute_advantages(rewards);
    double mean = 0.0, var = 0.0;
    for (double v : adv) mean += v;
    mean /= static_cast<double>(adv.size());
    for (double v : adv) var += (v - mean) * (v - mean);
    var /= static_cast<double>(adv.size());
    CHECK(std::fabs(mean) < 1e-12);
    bool constant = true;
    for (double v : rewards) constant = constant && v == rewards[0];
    if (!constant) {
      CHECK(std::fabs(std::sqrt(var) - 1.0) < 1e-9);
      // translation and positive-scaling invariance
      std::vector<double> shifted = rewards, scaled = rewards;
      for (auto& v : shifted) v += 17.25;
      for (auto& v : scaled) v *= 3.5;
      const auto adv_shift = compute_advantages(shifted);
      const auto adv_scale = compute_advantages(scaled);
      for (std::size_t i = 0; i < adv.size(); ++i) {
        CHECK(std::fabs(adv[i] - adv_shift[i]) < 1e-12);
        CHECK(std::fabs(adv[i] - adv_scale[i]) < 1e-12);
      }
    }
  }
}

TEST_CASE("kl_term: exact values and nonnegativity") {
  CHECK(kl_term(0.0, 0.0) == 0.0);
  // rho = 2 -> 2 - ln 2 - 1
  CHECK(kl_term(0.0, std::log(2.0)) ==
        doctest::Approx(2.0 - std::log(2.0) - 1.0).epsilon(1e-12));
  // rho = 0.5 -> 0.5 - ln 0.5 - 1
  CHECK(kl_term(0.0, std::log(0.5)) ==
        doctest::Approx(0.5 - std::log(0.5) - 1.0).epsilon(1e-12));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> log_rho(std::log(1e-6), std::log(1e6));
  for (int i = 0; i < 20000; ++i) {
    const double lr = log_rho(rng);
    const double v = kl_term(0.0, lr);
    CHECK(v >= 0.0);
    // near rho = 1 the estimator behaves like (rho-1)^2/2
    const double rho = std::exp(lr);
    if (std::fabs(rho - 1.0) <= 0.05) {
      const double quad = 0.5 * (rho - 1.0) * (rho - 1.0);
      if (quad > 0.0) CHECK(std::fabs(v - quad) / quad <= 0.1);
    }
  }
}

TEST_CASE("surrogate_objective: identity and clip arithmetic") {
  GrpoConfig cfg;
  cfg.group_size = 4;

  // ratio-one identity: objective equals mean advantage = 0 for Eq.3 output
  RolloutGroup same;
  same.problem = 0;
  same.outputs = {0, 1, 2, 3};
  same.rewards = {1, 0, 0, 1};
  same.logp_current = {-1.0, -2.0, -0.5, -1.5};
  same.logp_old = same.logp_current;
  same.logp_ref = same.logp_current;
  same.advantages = compute_advantages(same.rewards);
  CHECK(surrogate_objective(same, cfg) == doctest::Approx(0.0).epsilon(1e-15));

  // single output, A=1, rho=1.5, eps=0.2, beta=0 -> min(1.5, 1.2) = 1.2
  GrpoConfig beta0 = cfg;
  beta0.kl_coefficient = 0.0;
  RolloutGroup up;
  up.problem = 0;
  up.outputs = {0};
  up.rewards = {1};
  up.logp_old = {0.0};
  up.logp_current = {std::log(1.5)};
  up.logp_ref = {std::log(1.5)};
  up.advantages = {1.0};
  CHECK(surrogate_objective(up, beta0) == doctest::Approx(1.2).epsilon(1e-12));

  // single output, A=-1, rho=0.5 -> min(-0.5, -0.8) = -0.8
  RolloutGroup down = up;
  down.logp_current = {std::log(0.5)};
  down.logp_ref = {std::log(0.5)};
  down.advantages = {-1.0};
  CHECK(surrogate_objective(down, beta0) == doctest::Approx(-0.8).epsilon(1e-12));
}

TEST_CASE("clip bound holds for random triples") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> adv(-3.0, 3.0);
  std::uniform_real_distribution<double> log_rho(-2.0, 2.0);
  std::uniform_real_distribution<double> eps_dist(0.05, 0.5);
  GrpoConfig cfg;
  cfg.group_size = 2;
  cfg.kl_coefficient = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double eps = eps_dist(rng);
    cfg.clip_epsilon = eps;
    RolloutGroup g;
    g.problem = 0;
    g.outputs = {0};
    g.rewards = {0};
    const double a = adv(rng);
    g.advantages = {a};
    g.logp_old = {0.0};
    g.logp_current = {log_rho(rng)};
    g.logp_ref = {0.0};
    const double term = surrogate_objective(g, cfg);
    if (a > 0) {
      CHECK(term <= (1.0 + eps) * a + 1e-12);
    } else {
      // pessimistic bound: never better than the clipped estimate
      CHECK(term <= (1.0 - eps) * a + 1e-12);
    }
  }
}

TEST_CASE("policy_sample: distributional sanity") {
  ProblemBank bank;
  bank.feature_dim = 4;
  CandidateSet set;
  for (int a = 0; a < 4; ++a) {
    set.answers.push_back("c" + std::to_string(a));
    std::vector<double> row(4, 0.0);
    row[static_cast<std::size_t>(a)] = 1.0;
    set.features.push_back(row);
  }
  bank.add(set);

  PolicyParams uniform;
  uniform.theta.assign(4, 0.0);
  std::mt19937_64 rng(17);
  std::vector<int> counts(4, 0);
  const int draws = 10000;
  GrpoConfig cfg;
  cfg.group_size = 4;
  for (int i = 0; i < draws / 4; ++i) {
    const RolloutGroup g = policy_sample(bank, uniform, uniform, 0, 4, rng);
    for (int o : g.outputs) counts[static_cast<std::size_t>(o)]++;
    for (std::size_t k = 0; k < g.outputs.size(); ++k) {
      CHECK(g.logp_current[k] == g.logp_old[k]);
    }
  }
  // 3 sigma around uniform 0.25
  const double sigma = std::sqrt(0.25 * 0.75 / draws);
  for (int a = 0; a < 4; ++a) {
    const double freq = static_cast<double>(counts[static_cast<std::size_t>(a)]) / draws;
    CHECK(std::fabs(freq - 0.25) <= 3.5 * sigma);
  }

  // a dominant logit takes nearly all samples
  PolicyParams dominant = uniform;
  dominant.theta[2] = 10.0;
  int hits = 0;
  for (int i = 0; i < 1000 / 4; ++i) {
    const RolloutGroup g = policy_sample(bank, dominant, uniform, 0, 4, rng);
    for (int o : g.outputs) hits += o == 2 ? 1 : 0;
  }
  CHECK(static_cast<double>(hits) / 1000.0 > 0.99);

  CHECK_THROWS_AS(policy_sample(bank, uniform, uniform, 0, 1, rng), std::invalid_argument);
}

TEST_CASE("policy_step: sign and invariance") {
  ProblemBank bank;
  bank.feature_dim = 3;
  CandidateSet set;
  for (int a = 0; a < 3; ++a) {
    set.answers.push_back("c" + std::to_string(a));
    std::vector<double> row(3, 0.0);
    row[static_cast<std::size_t>(a)] = 1.0;
    set.features.push_back(row);
  }
  bank.add(set);
  PolicyParams params;
  params.theta.assign(3, 0.0);

  GrpoConfig cfg;
  cfg.group_size = 2;
  cfg.kl_coefficient = 0.0;

  // all-zero advantages: parameters unchanged
  RolloutGroup flat;
  flat.problem = 0;
  flat.outputs = {0, 1};
  flat.rewards = {1, 1};
  flat.logp_current = {std::log(1.0 / 3), std::log(1.0 / 3)};
  flat.logp_old = flat.logp_current;
  flat.logp_ref = flat.logp_current;
  flat.advantages = {0.0, 0.0};
  const StepOutcome same = policy_step(params, bank, std::vector<RolloutGroup>{flat}, cfg);
  REQUIRE(same.ok);
  CHECK(same.params.theta == params.theta);

  // a positive-advantage candidate's logit strictly increases
  RolloutGroup up = flat;
  up.advantages = {1.0, -1.0};
  const StepOutcome moved = policy_step(params, bank, std::vector<RolloutGroup>{up}, cfg);
  REQUIRE(moved.ok);
  CHECK(moved.params.theta[0] > 0.0);
  CHECK(moved.params.theta[1] < 0.0);

  // with zero advantages the KL term dominates and pulls toward the reference
  GrpoConfig kl_cfg = cfg;
  kl_cfg.kl_coefficient = 1.0;
  PolicyParams away;
  away.theta = {2.0, 0.0, 0.0};
  PolicyParams ref;
  ref.theta.assign(3, 0.0);
  const auto away_logp = log_softmax(policy_logits(bank, away, 0));
  const auto ref_logp = log_softmax(policy_logits(bank, ref, 0));
  RolloutGroup klg;
  klg.problem = 0;
  klg.outputs = {0, 1};
  klg.rewards = {0, 0};
  klg.logp_current = {away_logp[0], away_logp[1]};
  klg.logp_old = klg.logp_current;
  klg.logp_ref = {ref_logp[0], ref_logp[1]};
  klg.advantages = {0.0, 0.0};
  double kl_before = 0.0, kl_after = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    kl_before += kl_term(klg.logp_current[i], klg.logp_ref[i]);
  }
  const StepOutcome pulled = policy_step(away, bank, std::vector<RolloutGroup>{klg}, kl_cfg);
  REQUIRE(pulled.ok);
  const auto new_logp = log_softmax(policy_logits(bank, pulled.params, 0));
  for (std::size_t i = 0; i < 2; ++i) {
    kl_after += kl_term(new_logp[static_cast<std::size_t>(klg.outputs[i])], klg.logp_ref[i]);
  }
  CHECK(kl_after < kl_before);

  // non-finite ingredients abort the step with a diagnostic
  RolloutGroup bad = flat;
  bad.advantages = {std::numeric_limits<double>::quiet_NaN(), 0.0};
  const StepOutcome aborted = policy_step(params, bank, std::vector<RolloutGroup>{bad}, cfg);
  CHECK_FALSE(aborted.ok);
  CHECK(aborted.offending_group == 0);
}

TEST_CASE("gradient_check: analytic gradients match finite differences") {
  std::mt19937_64 rng(2718);
  GrpoConfig cfg;
  cfg.group_size = 6;
  double worst = 0.0;
  for (int i = 0; i < 25; ++i) {
    const Instance inst = random_instance(rng, cfg);
    worst = std::max(worst, gradient_check(inst.params, inst.bank, inst.groups, cfg));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("gradient_check: zero advantages and beta 0 give zero gradients") {
  std::mt19937_64 rng(5);
  GrpoConfig cfg;
  cfg.group_size = 4;
  cfg.kl_coefficient = 0.0;
  Instance inst = random_instance(rng, cfg);
  for (auto& g : inst.groups) {
    for (auto& a : g.advantages) a = 0.0;
    g.logp_ref = g.logp_current;
  }
  std::vector<double> grad;
  objective_at(inst.params, inst.bank, inst.groups, cfg, &grad);
  for (double v : grad) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(gradient_check(inst.params, inst.bank, inst.groups, cfg) < 1e-6);
}

TEST_CASE("checkpoints restore bitwise and guard the config hash") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  PolicyParams p;
  for (int i = 0; i < 64; ++i) p.theta.push_back(u(rng));
  GrpoConfig cfg;
  const std::uint64_t hash = policy_config_hash(64, cfg);
  const PolicyCheckpoint ckpt = make_checkpoint(p, 123, hash);
  const PolicyParams restored = restore_checkpoint(ckpt, hash);
  REQUIRE(restored.theta.size() == p.theta.size());
  for (std::size_t i = 0; i < p.theta.size(); ++i) {
    CHECK(std::memcmp(&restored.theta[i], &p.theta[i], sizeof(double)) == 0);
  }
  CHECK(ckpt.step == 123);
  // dimension mismatch changes the hash and is rejected
  CHECK(policy_config_hash(63, cfg) != hash);
  CHECK_THROWS_AS(restore_checkpoint(ckpt, policy_config_hash(63, cfg)), std::runtime_error);
}

TEST_CASE("config invariants") {
  GrpoConfig cfg;
  CHECK(cfg.kl_coefficient == 0.001);  // paper-stated default
  cfg.group_size = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.group_size = 4;
  cfg.clip_epsilon = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.clip_epsilon = 0.2;
  cfg.kl_coefficient = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_SUITE_END();
