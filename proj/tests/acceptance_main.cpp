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

// Acceptance suite: runs every release criterion end to end and prints one
// pass/fail line per criterion. Exit status is nonzero when any fail.
//
//   ladder_acceptance [project_root]
//
// project_root must contain data/oracle_pairs.txt and configs/.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ladder/config.hpp"
#include "ladder/corpus.hpp"
#include "ladder/driver.hpp"
#include "ladder/grpo.hpp"
#include "ladder/io.hpp"
#include "ladder/reward.hpp"
#include "ladder/synthetic.hpp"
#include "ladder/variants.hpp"
#include "ladder/verify.hpp"

using namespace ladder;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool passed, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s%s%s\n", passed ? "PASS" : "FAIL", criterion, name,
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!passed) ++g_failures;
}

Expr must_parse(const std::string& text) {
  ParseResult r = parse(text);
  if (!parse_ok(r)) {
    std::fprintf(stderr, "internal: failed to parse %s\n", text.c_str());
    std::exit(2);
  }
  return std::get<Expr>(r);
}

double now_s() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

ExperimentConfig shipped_config(const std::filesystem::path& root, const char* name) {
  return experiment_from_config(KeyValueConfig::from_file((root / "configs" / name).string()));
}

// ---------------------------------------------------------------------------

void criterion_1_verifier_soundness(const std::filesystem::path& root) {
  const double started = now_s();
  std::vector<Expr> corpus;
  try {
    corpus = load_expression_lines(read_file(root / "data" / "oracle_pairs.txt"));
  } catch (const std::exception& e) {
    report(1, "verifier soundness/sensitivity", false, e.what());
    return;
  }
  const VerifyConfig defaults;
  const bool defaults_exact = defaults.points == 5 && defaults.domain_lo == -10.0 &&
                              defaults.domain_hi == 10.0 && defaults.interval_length == 0.1 &&
                              defaults.rel_tol == 1e-2 &&
                              defaults.attempt_deadline == std::chrono::milliseconds(2000) &&
                              defaults.max_retries == 3;

  int accepted = 0, rejected_perturbed = 0;
  for (const Expr& f_anti : corpus) {
    const Expr integrand = differentiate(f_anti);
    const VerifyConfig cfg = corpus_verify_config(f_anti);  // defaults + derived seed
    if (verify(integrand, f_anti, cfg).verdict == Verdict::kCorrect) ++accepted;
    const Expr perturbed = perturb_one_coefficient(f_anti, 1.1);
    if (verify(integrand, perturbed, cfg).verdict != Verdict::kCorrect) ++rejected_perturbed;
  }
  const double elapsed = now_s() - started;
  std::ostringstream detail;
  detail << accepted << "/200 accepted, " << rejected_perturbed
         << "/200 perturbed rejected, " << std::fixed << elapsed << "s single-threaded";
  report(1, "verifier soundness/sensitivity",
         defaults_exact && corpus.size() == 200 && accepted == 200 &&
             rejected_perturbed >= 190 && elapsed < 120.0,
         detail.str());
}

void criterion_2_verifier_robustness() {
  // the 1/x^2 family verifies correct with resampling engaged
  const Expr integrand = must_parse("1/x**2");
  const Expr candidate = must_parse("-1/x");
  bool all_correct = true;
  int resamples_seen = 0;
  for (std::uint64_t seed = 0; seed < 48; ++seed) {
    VerifyConfig cfg;
    cfg.rng_seed = seed;
    const VerificationReport r = verify(integrand, candidate, cfg);
    all_correct = all_correct && r.verdict == Verdict::kCorrect;
    resamples_seen += r.resamples;
  }

  // deterministic under a fixed seed
  VerifyConfig cfg;
  cfg.rng_seed = 7;
  const VerificationReport a = verify(integrand, candidate, cfg);
  const VerificationReport b = verify(integrand, candidate, cfg);
  bool deterministic = a.verdict == b.verdict && a.resamples == b.resamples &&
                       a.point_checks.size() == b.point_checks.size();
  for (std::size_t i = 0; deterministic && i < a.point_checks.size(); ++i) {
    deterministic = a.point_checks[i].center == b.point_checks[i].center &&
                    a.point_checks[i].relative_difference ==
                        b.point_checks[i].relative_difference;
  }

  // exploit fixtures score zero accuracy
  const Expr target = must_parse("x**2");
  int exploit_hits = 0;
  const char* exploits[] = {
      "<ANSWER>x**2</ANSWER>", "<ANSWER>integrate(x**2)</ANSWER>",
      "<ANSWER>\xE2\x88\xAB x**2 dx</ANSWER>", "<ANSWER>Integral(x**2, x)</ANSWER>",
      "<ANSWER>42</ANSWER>", "<ANSWER></ANSWER>"};
  for (const char* text : exploits) {
    VerifyConfig vcfg;
    vcfg.rng_seed = 3;
    if (score(text, target, vcfg, RewardWeights{}).accuracy != 0) ++exploit_hits;
  }

  std::ostringstream detail;
  detail << "48/48 pole-family verdicts correct=" << (all_correct ? "yes" : "no")
         << ", resamples=" << resamples_seen << ", exploit accuracy hits=" << exploit_hits;
  report(2, "verifier robustness on the singular family and exploits",
         all_correct && resamples_seen >= 1 && deterministic && exploit_hits == 0,
         detail.str());
}

void criterion_3_advantages() {
  const std::vector<double> hand = compute_advantages(std::vector<double>{1, 0, 0, 1});
  bool exact = hand == std::vector<double>{1.0, -1.0, -1.0, 1.0};

  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> val(-5.0, 5.0);
  std::uniform_int_distribution<int> size(2, 16);
  double worst_mean = 0.0, worst_std = 0.0, worst_invariance = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> rewards(static_cast<std::size_t>(size(rng)));
    for (auto& r : rewards) r = val(rng);
    const auto adv = compute_advantages(rewards);
    double mean = 0.0, var = 0.0;
    for (double a : adv) mean += a;
    mean /= static_cast<double>(adv.size());
    for (double a : adv) var += (a - mean) * (a - mean);
    var /= static_cast<double>(adv.size());
    worst_mean = std::max(worst_mean, std::fabs(mean));
    worst_std = std::max(worst_std, std::fabs(std::sqrt(var) - 1.0));

    std::vector<double> shifted = rewards, scaled = rewards;
    for (auto& r : shifted) r += 123.5;
    for (auto& r : scaled) r *= 4.25;
    const auto adv_shift = compute_advantages(shifted);
    const auto adv_scale = compute_advantages(scaled);
    for (std::size_t i = 0; i < adv.size(); ++i) {
      worst_invariance = std::max({worst_invariance, std::fabs(adv[i] - adv_shift[i]),
                                   std::fabs(adv[i] - adv_scale[i])});
    }
  }
  std::ostringstream detail;
  detail << "worst |mean| " << worst_mean << ", worst |std-1| " << worst_std
         << ", worst invariance gap " << worst_invariance;
  report(3, "group-normalized advantages", exact && worst_mean < 1e-12 &&
                                                worst_std < 1e-9 && worst_invariance < 1e-12,
         detail.str());
}

void criterion_4_kl_estimator() {
  bool nonnegative = true;
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> log_rho(std::log(1e-6), std::log(1e6));
  for (int i = 0; i < 100000; ++i) {
    if (kl_term(0.0, log_rho(rng)) < 0.0) nonnegative = false;
  }
  const bool at_one = kl_term(0.0, 0.0) == 0.0;
  const double two = kl_term(0.0, std::log(2.0));
  const bool at_two = std::fabs(two - (2.0 - std::log(2.0) - 1.0)) < 1e-12;
  std::ostringstream detail;
  detail << "kl(rho=2) = " << two;
  report(4, "KL estimator", nonnegative && at_one && at_two, detail.str());
}

void criterion_5_clipped_surrogate() {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> adv(-3.0, 3.0);
  std::uniform_real_distribution<double> log_rho(-3.0, 3.0);
  std::uniform_real_distribution<double> eps_dist(0.05, 0.5);
  bool bounds_hold = true;
  for (int i = 0; i < 100000; ++i) {
    GrpoConfig cfg;
    cfg.group_size = 2;
    cfg.kl_coefficient = 0.0;
    cfg.clip_epsilon = eps_dist(rng);
    RolloutGroup g;
    g.problem = 0;
    g.outputs = {0};
    g.rewards = {0};
    g.advantages = {adv(rng)};
    g.logp_old = {0.0};
    g.logp_current = {log_rho(rng)};
    g.logp_ref = {0.0};
    const double term = surrogate_objective(g, cfg);
    const double a = g.advantages[0];
    const double bound = a > 0 ? (1.0 + cfg.clip_epsilon) * a : (1.0 - cfg.clip_epsilon) * a;
    if (term > bound + 1e-12) bounds_hold = false;
  }

  // analytic gradients vs central finite differences on 100 random instances
  std::mt19937_64 grng(2718);
  GrpoConfig cfg;
  cfg.group_size = 6;
  std::uniform_int_distribution<int> dim_dist(4, 12);
  std::uniform_int_distribution<int> cand_dist(3, 8);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> delta(-0.3, 0.3);
  double worst_grad = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    ProblemBank bank;
    bank.feature_dim = dim_dist(grng);
    for (int q = 0; q < 2; ++q) {
      CandidateSet set;
      const int k = cand_dist(grng);
      for (int a = 0; a < k; ++a) {
        set.answers.push_back("a");
        std::vector<double> row(static_cast<std::size_t>(bank.feature_dim ? bank.feature_dim
                                                                          : 4));
        for (auto& v : row) v = unit(grng);
        set.features.push_back(std::move(row));
      }
      bank.add(std::move(set));
    }
    PolicyParams params;
    params.theta.resize(static_cast<std::size_t>(bank.feature_dim));
    for (auto& v : params.theta) v = 0.5 * unit(grng);
    std::vector<RolloutGroup> groups;
    for (int gi = 0; gi < 2; ++gi) {
      const int q = gi % 2;
      const auto logp = log_softmax(policy_logits(bank, params, q));
      RolloutGroup g;
      g.problem = q;
      std::uniform_int_distribution<int> pick(0, static_cast<int>(logp.size()) - 1);
      for (int i = 0; i < cfg.group_size; ++i) {
        const int a = pick(grng);
        double d = delta(grng);
        const double rho = std::exp(-d);
        if (std::fabs(rho - (1.0 - cfg.clip_epsilon)) < 2e-2 ||
            std::fabs(rho - (1.0 + cfg.clip_epsilon)) < 2e-2) {
          d = 0.0;  // keep clear of the clip kink
        }
        g.outputs.push_back(a);
        g.logp_current.push_back(logp[static_cast<std::size_t>(a)]);
        g.logp_old.push_back(logp[static_cast<std::size_t>(a)] + d);
        g.logp_ref.push_back(logp[static_cast<std::size_t>(a)] + delta(grng));
        g.rewards.push_back(0.0);
        g.advantages.push_back(adv(grng));
      }
      groups.push_back(std::move(g));
    }
    worst_grad = std::max(worst_grad, gradient_check(params, bank, groups, cfg));
  }
  std::ostringstream detail;
  detail << "clip bounds over 1e5 triples, max gradient error " << worst_grad;
  report(5, "clipped surrogate objective", bounds_hold && worst_grad < 1e-6, detail.str());
}

void criterion_6_curriculum_contrast(const std::filesystem::path& root) {
  const double started = now_s();
  bool with_ok = true, without_ok = true;
  std::ostringstream detail;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    ExperimentConfig cfg = shipped_config(root, "synthetic_ladder.cfg");
    cfg.seed = seed;
    SyntheticTask task(cfg.task);
    MockBackend backend(cfg.seed, make_variant_responder(13));
    const LadderResult with_variants = run_ladder(cfg, backend, task);
    with_ok = with_ok && with_variants.final_test_score >= 80.0 &&
              with_variants.steps_run <= 500;
    detail << "s" << seed << ":" << with_variants.final_test_score << "% ";

    ExperimentConfig ablation = shipped_config(root, "synthetic_ladder_novariants.cfg");
    ablation.seed = seed;
    SyntheticTask ablation_task(ablation.task);
    MockBackend ablation_backend(ablation.seed, make_variant_responder(13));
    const LadderResult without_variants = run_ladder(ablation, ablation_backend, ablation_task);
    double max_score = 0.0, max_reward = 0.0;
    for (const auto& p : without_variants.curve) {
      max_score = std::max(max_score, p.test_score);
      max_reward = std::max(max_reward, p.train_reward_mean);
    }
    max_score = std::max(max_score, without_variants.final_test_score);
    without_ok = without_ok && max_score <= 5.0 && max_reward < 0.05;
    detail << "(ablation " << max_score << "%/" << max_reward << ") ";
  }
  const double elapsed = now_s() - started;
  detail << std::fixed << elapsed << "s";
  report(6, "curriculum-vs-collapse contrast (3 seeds)",
         with_ok && without_ok && elapsed < 300.0, detail.str());
}

void criterion_7_variant_scaling(const std::filesystem::path& root) {
  ExperimentConfig cfg = shipped_config(root, "synthetic_ladder.cfg");
  cfg.seed = 10;
  // sweep runs train to plateau rather than to a fixed step cap, so larger
  // variant sets are not penalized for spreading the same compute thinner
  cfg.grpo.steps = 800;
  cfg.plateau_min_steps = 500;
  const auto series = variant_scaling_sweep(cfg, {10, 40, 150}, 3);
  bool nondecreasing = true;
  std::ostringstream detail;
  for (std::size_t i = 0; i < series.size(); ++i) {
    detail << "N=" << series[i].first << ":" << series[i].second << "% ";
    if (i > 0 && series[i].second < series[i - 1].second - 5.0) nondecreasing = false;
  }
  report(7, "score scales with the number of variants", series.size() == 3 && nondecreasing,
         detail.str());
}

void criterion_8_ttrl_contract(const std::filesystem::path& root) {
  const ExperimentConfig defaults;
  const bool default_budgets = defaults.ttrl_variants == 800 && defaults.ttrl_steps == 100;

  ExperimentConfig cfg = shipped_config(root, "synthetic_ttrl.cfg");
  cfg.grpo.steps = 500;  // the LADDER phase reuses the shipped training length
  SyntheticTask task(cfg.task);
  MockBackend backend(cfg.seed, make_variant_responder(13));
  const LadderResult ladder = run_ladder(cfg, backend, task);

  // the designated questions must be unsolved by the LADDER policy itself
  RewardCache cache(task, cfg.verify, cfg.weights, cfg.parallel);
  int presolved = 0;
  for (const auto& q : task.ttrl_targets()) {
    const int pick = greedy_answer(task.bank(), ladder.policy, q.problem);
    if (cache.breakdown(q.problem, pick).accuracy == 1) ++presolved;
  }

  const TtrlResult post = run_ttrl(cfg, backend, task, ladder.final_checkpoint);
  bool rollback = !post.reports.empty();
  bool within_budget = true;
  for (const auto& r : post.reports) {
    rollback = rollback && r.rollback_verified;
    within_budget = within_budget && r.steps_run <= 100;
  }

  const std::uint64_t hash = policy_config_hash(task.bank().feature_dim, cfg.grpo);
  const TtrlResult from_base =
      run_ttrl(cfg, backend, task, make_checkpoint(task.base_params(), 0, hash));

  std::ostringstream detail;
  detail << "pre-solved " << presolved << "/3, post-ladder solved " << post.solved_count
         << "/3, from-base solved " << from_base.solved_count << "/3";
  report(8, "TTRL budget, gains, and bitwise rollback",
         default_budgets && presolved == 0 && post.solved_count >= 1 && rollback &&
             within_budget && from_base.solved_count == 0,
         detail.str());
}

void criterion_9_generation_protocol() {
  GenConfig cfg;
  cfg.target_n = 120;
  cfg.depth_cap = 3;
  cfg.rng_seed = 5;
  MockBackend inner(5, make_variant_responder(13));
  TranscriptingBackend backend(inner);
  const Expr root = must_parse("(x**2 + 1)/(x**4 + 2*x**2 + 1)");
  const VariantTree tree = build_tree(root, cfg, backend);
  const auto transcript = backend.transcript();

  bool prompts_ok = !transcript.empty();
  double temp_lo_seen = 10.0, temp_hi_seen = 0.0;
  for (const auto& [request, response] : transcript) {
    prompts_ok = prompts_ok &&
                 request.prompt.find("exactly 10 variant integrands") != std::string::npos &&
                 request.prompt.find("7 easier and 3 equivalent") != std::string::npos;
    int suggestions = 0;
    std::istringstream is(request.prompt);
    std::string line;
    bool persona_found = false;
    while (std::getline(is, line)) {
      if (line.rfind("- ", 0) == 0) ++suggestions;
      if (line.rfind("Persona: ", 0) == 0) {
        for (const auto& p : default_personas()) {
          if (line.find(p) != std::string::npos) persona_found = true;
        }
      }
    }
    prompts_ok = prompts_ok && suggestions >= 3 && suggestions <= 5 && persona_found;
    prompts_ok = prompts_ok && request.temperature >= 0.8 && request.temperature <= 1.4;
    temp_lo_seen = std::min(temp_lo_seen, request.temperature);
    temp_hi_seen = std::max(temp_hi_seen, request.temperature);
  }
  const bool sweeps_range = temp_lo_seen <= 0.8 + 1e-9 && temp_hi_seen >= 1.4 - 1e-9;

  int max_depth = 0;
  for (const auto& node : tree.nodes) max_depth = std::max(max_depth, node.depth);
  const bool depth3_ok = max_depth <= 3 && max_depth >= 2;

  GenConfig shallow = cfg;
  shallow.depth_cap = 2;
  const VariantTree tree2 = build_tree(root, shallow, backend);
  int max_depth2 = 0;
  for (const auto& node : tree2.nodes) max_depth2 = std::max(max_depth2, node.depth);
  const bool depth2_ok = max_depth2 <= 2;

  // byte-identical serialization across two runs with the same seed
  MockBackend inner_b(5, make_variant_responder(13));
  const VariantTree tree_again = build_tree(root, cfg, inner_b);
  const bool reproducible = tree_to_json_text(tree) == tree_to_json_text(tree_again);

  std::ostringstream detail;
  detail << transcript.size() << " prompts, temp range [" << temp_lo_seen << ", "
         << temp_hi_seen << "], max depths " << max_depth << "/" << max_depth2;
  report(9, "generation-protocol conformance",
         prompts_ok && sweeps_range && depth3_ok && depth2_ok && reproducible, detail.str());
}

void criterion_10_quadrature() {
  using namespace std::chrono_literals;
  struct Fixture {
    const char* text;
    double a, b, exact;
  };
  const double pi = 3.14159265358979323846;
  const Fixture fixtures[] = {
      {"x**2", 0, 1, 1.0 / 3.0},
      {"sin(x)", 0, pi, 2.0},
      {"exp(x)", 0, 1, std::exp(1.0) - 1.0},
      {"1/x", 1, 2, std::log(2.0)},
      {"1/(1 + x**2)", 0, 1, pi / 4.0},
      {"x**3 + 2*x", 0, 1, 1.25},
      {"cos(x)", 0, pi / 2.0, 1.0},
      {"sqrt(x**2 + 1)", 0, 1, 0.5 * std::sqrt(2.0) + 0.5 * std::log(1.0 + std::sqrt(2.0))},
      {"x*exp(x)", 0, 1, 1.0},
      {"x*sin(x)", 0, pi, pi},
      {"atan(x)", 0, 1, pi / 4.0 - 0.5 * std::log(2.0)},
      {"ln(1 + x)", 0, 1, 2.0 * std::log(2.0) - 1.0},
      {"1/(x**2 + 1)", -1, 1, pi / 2.0},
      {"x/(x**2 + 1)", 0, 1, 0.5 * std::log(2.0)},
      {"exp(-x)", 0, 2, 1.0 - std::exp(-2.0)},
      {"tan(x)", 0, pi / 4.0, 0.5 * std::log(2.0)},
      {"asin(x)", 0, 1, pi / 2.0 - 1.0},
      {"sqrt(x)", 1, 4, 14.0 / 3.0},
      {"(x**2 + 1)/(x**4 + 2*x**2 + 1)", 0, 1, pi / 4.0},
      {"sin(x)**2", 0, 2.0 * pi, pi},
  };
  bool analytic_ok = true;
  double worst_rel = 0.0;
  for (const auto& f : fixtures) {
    const QuadratureResult r = integrate(must_parse(f.text), f.a, f.b, 1e-9, 2000ms);
    const double rel = std::fabs(r.value - f.exact) / std::fabs(f.exact);
    worst_rel = std::max(worst_rel, rel);
    if (!r.converged() || rel > 1e-6) analytic_ok = false;
  }

  struct Singular {
    const char* text;
    double a, b;
  };
  const Singular singular[] = {
      {"1/x", -0.05, 0.05},
      {"1/x**2", -0.03, 0.07},
      {"ln(x)", -0.1, 0.1},
      {"1/(x - 1)", 0.5, 1.5},
  };
  bool singular_ok = true;
  for (const auto& s : singular) {
    const QuadratureResult r = integrate(must_parse(s.text), s.a, s.b, 1e-9, 2000ms);
    if (r.status != QuadStatus::kSingular) singular_ok = false;
  }
  std::ostringstream detail;
  detail << "20 analytic fixtures, worst rel err " << worst_rel << ", 4 singular fixtures";
  report(10, "quadrature accuracy and singularity reporting", analytic_ok && singular_ok,
         detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path root = argc > 1 ? argv[1] : ".";
  std::printf("acceptance suite (project root: %s)\n", root.string().c_str());

  criterion_1_verifier_soundness(root);
  criterion_2_verifier_robustness();
  criterion_3_advantages();
  criterion_4_kl_estimator();
  criterion_5_clipped_surrogate();
  criterion_6_curriculum_contrast(root);
  criterion_7_variant_scaling(root);
  criterion_8_ttrl_contract(root);
  criterion_9_generation_protocol();
  criterion_10_quadrature();

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return 1;
}
