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

#include "ladder/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace ladder {

void GrpoConfig::validate() const {
  if (group_size < 2) throw std::invalid_argument("GrpoConfig: group_size must be >= 2");
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
    throw std::invalid_argument("GrpoConfig: clip_epsilon must be in (0, 1)");
  }
  if (kl_coefficient < 0.0) {
    throw std::invalid_argument("GrpoConfig: kl_coefficient must be >= 0");
  }
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("GrpoConfig: learning_rate must be > 0");
  }
}

std::vector<double> compute_advantages(std::span<const double> rewards) {
  const std::size_t g = rewards.size();
  if (g < 2) throw std::invalid_argument("compute_advantages: needs a group of >= 2");
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(g);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(g);  // population variance over the whole group
  const double std_dev = std::sqrt(var);
  std::vector<double> adv(g, 0.0);
  if (std_dev == 0.0) return adv;
  for (std::size_t i = 0; i < g; ++i) adv[i] = (rewards[i] - mean) / std_dev;
  // re-center so the normalized mean is exact up to one rounding
  double adv_mean = 0.0;
  for (double a : adv) adv_mean += a;
  adv_mean /= static_cast<double>(g);
  for (double& a : adv) a -= adv_mean;
  return adv;
}

double kl_term(double logp_current, double logp_ref) {
  const double log_rho = logp_ref - logp_current;
  return std::exp(log_rho) - log_rho - 1.0;
}

double surrogate_objective(const RolloutGroup& group, const GrpoConfig& cfg) {
  cfg.validate();
  const std::size_t g = group.outputs.size();
  if (g == 0 || group.advantages.size() != g || group.logp_current.size() != g ||
      group.logp_old.size() != g || group.logp_ref.size() != g) {
    throw std::invalid_argument("surrogate_objective: inconsistent group");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const double rho = std::exp(group.logp_current[i] - group.logp_old[i]);
    const double a = group.advantages[i];
    const double unclipped = rho * a;
    const double clipped =
        std::clamp(rho, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon) * a;
    total += std::min(unclipped, clipped) -
             cfg.kl_coefficient * kl_term(group.logp_current[i], group.logp_ref[i]);
  }
  return total / static_cast<double>(g);
}

// ---------------------------------------------------------------------------
// Toy policy

int ProblemBank::add(CandidateSet set) {
  if (set.answers.empty() || set.answers.size() != set.features.size()) {
    throw std::invalid_argument("ProblemBank: candidate set is empty or inconsistent");
  }
  for (const auto& row : set.features) {
    if (feature_dim == 0) feature_dim = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != feature_dim) {
      throw std::invalid_argument("ProblemBank: feature dimension mismatch");
    }
  }
  problems.push_back(std::move(set));
  return static_cast<int>(problems.size()) - 1;
}

std::vector<double> policy_logits(const ProblemBank& bank, const PolicyParams& params,
                                  int problem) {
  const CandidateSet& set = bank.problems.at(static_cast<std::size_t>(problem));
  if (static_cast<int>(params.theta.size()) != bank.feature_dim) {
    throw std::invalid_argument("policy_logits: theta dimension mismatch");
  }
  std::vector<double> logits(set.answers.size(), 0.0);
  for (std::size_t a = 0; a < set.answers.size(); ++a) {
    const auto& row = set.features[a];
    double dot = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) dot += params.theta[k] * row[k];
    logits[a] = dot;
  }
  return logits;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  const double hi = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - hi);
  const double lse = hi + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

RolloutGroup policy_sample(const ProblemBank& bank, const PolicyParams& params,
                           const PolicyParams& reference, int problem, int group_size,
                           std::mt19937_64& rng) {
  if (group_size < 2) throw std::invalid_argument("policy_sample: group_size must be >= 2");
  if (bank.problems.at(static_cast<std::size_t>(problem)).answers.empty()) {
    throw std::invalid_argument("policy_sample: empty candidate set");
  }
  const std::vector<double> cur_logp = log_softmax(policy_logits(bank, params, problem));
  const std::vector<double> ref_logp = log_softmax(policy_logits(bank, reference, problem));

  RolloutGroup group;
  group.problem = problem;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < group_size; ++i) {
    const double u = unit(rng);
    double cdf = 0.0;
    int pick = static_cast<int>(cur_logp.size()) - 1;
    for (std::size_t a = 0; a < cur_logp.size(); ++a) {
      cdf += std::exp(cur_logp[a]);
      if (u <= cdf) {
        pick = static_cast<int>(a);
        break;
      }
    }
    group.outputs.push_back(pick);
    group.logp_current.push_back(cur_logp[static_cast<std::size_t>(pick)]);
    group.logp_old.push_back(cur_logp[static_cast<std::size_t>(pick)]);
    group.logp_ref.push_back(ref_logp[static_cast<std::size_t>(pick)]);
  }
  group.rewards.assign(static_cast<std::size_t>(group_size), 0.0);
  return group;
}

int greedy_answer(const ProblemBank& bank, const PolicyParams& params, int problem) {
  const std::vector<double> logits = policy_logits(bank, params, problem);
  return static_cast<int>(
      std::max_element(logits.begin(), logits.end()) - logits.begin());
}

double objective_at(const PolicyParams& params, const ProblemBank& bank,
                    std::span<const RolloutGroup> groups, const GrpoConfig& cfg,
                    std::vector<double>* gradient_out) {
  cfg.validate();
  if (groups.empty()) throw std::invalid_argument("objective_at: no groups");
  const int dim = bank.feature_dim;
  if (gradient_out) gradient_out->assign(static_cast<std::size_t>(dim), 0.0);

  double objective = 0.0;
  std::vector<double> dlogp(static_cast<std::size_t>(dim));
  for (const RolloutGroup& group : groups) {
    const CandidateSet& set = bank.problems.at(static_cast<std::size_t>(group.problem));
    const std::vector<double> logits = policy_logits(bank, params, group.problem);
    const std::vector<double> logp = log_softmax(logits);

    // expected feature vector under the current policy (for d logp / d theta)
    std::vector<double> mean_feature(static_cast<std::size_t>(dim), 0.0);
    if (gradient_out) {
      for (std::size_t a = 0; a < logp.size(); ++a) {
        const double pa = std::exp(logp[a]);
        const auto& row = set.features[a];
        for (int k = 0; k < dim; ++k) mean_feature[static_cast<std::size_t>(k)] += pa * row[static_cast<std::size_t>(k)];
      }
    }

    const double g = static_cast<double>(group.outputs.size());
    double group_obj = 0.0;
    for (std::size_t i = 0; i < group.outputs.size(); ++i) {
      const int a_idx = group.outputs[i];
      const double lp = logp[static_cast<std::size_t>(a_idx)];
      const double adv = group.advantages[i];
      const double rho = std::exp(lp - group.logp_old[i]);
      const double unclipped = rho * adv;
      const double clipped =
          std::clamp(rho, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon) * adv;
      const double log_rho_ref = group.logp_ref[i] - lp;
      const double kl = std::exp(log_rho_ref) - log_rho_ref - 1.0;
      group_obj += std::min(unclipped, clipped) - cfg.kl_coefficient * kl;

      if (gradient_out) {
        // d term / d logp: A * rho on the unclipped branch, 0 when the clip
        // is saturated; the KL term contributes -beta * (1 - exp(log_rho)).
        double dterm_dlogp = 0.0;
        if (unclipped <= clipped) {
          dterm_dlogp = adv * rho;
        }
        dterm_dlogp -= cfg.kl_coefficient * (1.0 - std::exp(log_rho_ref));
        const auto& row = set.features[static_cast<std::size_t>(a_idx)];
        const double scale = dterm_dlogp / (g * static_cast<double>(groups.size()));
        for (int k = 0; k < dim; ++k) {
          (*gradient_out)[static_cast<std::size_t>(k)] +=
              scale * (row[static_cast<std::size_t>(k)] - mean_feature[static_cast<std::size_t>(k)]);
        }
      }
    }
    objective += group_obj / g;
  }
  return objective / static_cast<double>(groups.size());
}

StepOutcome policy_step(const PolicyParams& params, const ProblemBank& bank,
                        std::span<const RolloutGroup> groups, const GrpoConfig& cfg) {
  StepOutcome out;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (const auto* field : {&groups[gi].advantages, &groups[gi].logp_old,
                              &groups[gi].logp_ref}) {
      for (double v : *field) {
        if (!std::isfinite(v)) {
          out.error = "non-finite rollout ingredient";
          out.offending_group = static_cast<int>(gi);
          return out;
        }
      }
    }
  }
  std::vector<double> gradient;
  objective_at(params, bank, groups, cfg, &gradient);
  for (std::size_t k = 0; k < gradient.size(); ++k) {
    if (!std::isfinite(gradient[k])) {
      out.error = "non-finite gradient";
      // attribute the failure to the first group with a non-finite ingredient
      for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        for (double v : groups[gi].advantages) {
          if (!std::isfinite(v)) out.offending_group = static_cast<int>(gi);
        }
        for (double v : groups[gi].logp_old) {
          if (!std::isfinite(v)) out.offending_group = static_cast<int>(gi);
        }
      }
      return out;
    }
  }
  out.ok = true;
  out.params = params;
  for (std::size_t k = 0; k < gradient.size(); ++k) {
    out.params.theta[k] += cfg.learning_rate * gradient[k];
  }
  return out;
}

double gradient_check(const PolicyParams& params, const ProblemBank& bank,
                      std::span<const RolloutGroup> groups, const GrpoConfig& cfg,
                      double h) {
  std::vector<double> analytic;
  objective_at(params, bank, groups, cfg, &analytic);
  double worst = 0.0;
  PolicyParams probe = params;
  for (std::size_t k = 0; k < probe.theta.size(); ++k) {
    const double saved = probe.theta[k];
    probe.theta[k] = saved + h;
    const double up = objective_at(probe, bank, groups, cfg, nullptr);
    probe.theta[k] = saved - h;
    const double down = objective_at(probe, bank, groups, cfg, nullptr);
    probe.theta[k] = saved;
    const double fd = (up - down) / (2.0 * h);
    const double denom = std::max({std::fabs(analytic[k]), std::fabs(fd), 1e-8});
    worst = std::max(worst, std::fabs(analytic[k] - fd) / denom);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}
}  // namespace

std::uint64_t policy_config_hash(int feature_dim, const GrpoConfig& cfg) {
  std::uint64_t h = fnv1a(&feature_dim, sizeof feature_dim);
  const double fields[] = {static_cast<double>(cfg.group_size), cfg.clip_epsilon,
                           cfg.kl_coefficient, cfg.learning_rate};
  h = fnv1a(fields, sizeof fields, h);
  return h;
}

PolicyCheckpoint make_checkpoint(const PolicyParams& params, int step,
                                 std::uint64_t config_hash) {
  PolicyCheckpoint c;
  c.step = step;
  c.config_hash = config_hash;
  c.theta_bits.reserve(params.theta.size());
  for (double v : params.theta) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    c.theta_bits.push_back(bits);
  }
  return c;
}

PolicyParams restore_checkpoint(const PolicyCheckpoint& ckpt, std::uint64_t config_hash) {
  if (ckpt.config_hash != config_hash) {
    throw std::runtime_error("restore_checkpoint: config hash mismatch");
  }
  PolicyParams p;
  p.theta.reserve(ckpt.theta_bits.size());
  for (std::uint64_t bits : ckpt.theta_bits) {
    double v;
    std::memcpy(&v, &bits, sizeof v);
    p.theta.push_back(v);
  }
  return p;
}

}  // namespace ladder
