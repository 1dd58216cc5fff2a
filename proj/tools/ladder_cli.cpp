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

// Command-line surface for the curriculum engine. Exit codes: 0 success,
// 1 negative verdict / failed run, 2 usage or config error, 3 backend failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ladder/config.hpp"
#include "ladder/driver.hpp"
#include "ladder/io.hpp"
#include "ladder/synthetic.hpp"
#include "ladder/variants.hpp"

namespace {

using namespace ladder;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBackend = 3;

struct VerifyArgs {
  std::string integrand;
  std::string candidate;
  double rel_tol = -1.0;
  int points = -1;
  double interval_length = -1.0;
  double domain_lo = -10.0, domain_hi = 10.0;
  int deadline_ms = -1;
  int max_retries = -1;
  std::uint64_t seed = 0;
};

std::optional<Expr> parse_or_report(const std::string& text, const char* what) {
  ParseResult r = parse(text);
  if (!parse_ok(r)) {
    const auto& err = std::get<ParseError>(r);
    std::cerr << what << ": " << err.message() << "\n  " << err.source << "\n  "
              << std::string(err.offset, ' ') << "^\n";
    return std::nullopt;
  }
  return std::get<Expr>(r);
}

int cmd_verify(const VerifyArgs& args) {
  auto integrand = parse_or_report(args.integrand, "integrand");
  auto candidate = parse_or_report(args.candidate, "candidate");
  if (!integrand) return kExitUsage;

  VerifyConfig cfg;
  if (args.rel_tol > 0) cfg.rel_tol = args.rel_tol;
  if (args.points > 0) cfg.points = args.points;
  if (args.interval_length > 0) cfg.interval_length = args.interval_length;
  cfg.domain_lo = args.domain_lo;
  cfg.domain_hi = args.domain_hi;
  if (args.deadline_ms > 0) cfg.attempt_deadline = std::chrono::milliseconds(args.deadline_ms);
  if (args.max_retries >= 0) cfg.max_retries = args.max_retries;
  cfg.rng_seed = args.seed;

  VerificationReport report;
  if (candidate) {
    report = verify(*integrand, *candidate, cfg);
  } else {
    // still run the text path so trivial-answer diagnostics (unevaluated
    // integral markers, parse failures) are reported uniformly
    report = verify_text(*integrand, args.candidate, cfg);
    if (report.verdict == Verdict::kRejectedTrivial &&
        report.rejection_reason.rfind("answer does not parse", 0) == 0) {
      std::cout << verification_report_to_json(report);
      return kExitUsage;
    }
  }
  std::cout << verification_report_to_json(report);
  return report.verdict == Verdict::kCorrect ? kExitOk : kExitNegative;
}

int cmd_parse(const std::string& text) {
  auto expr = parse_or_report(text, "expression");
  if (!expr) return kExitUsage;
  nlohmann::json doc{{"text", to_text(*expr)},
                     {"canonical", canonical_text(*expr)},
                     {"derivative", canonical_text(differentiate(*expr))},
                     {"nodes", expr->node_count()}};
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

int cmd_quad(const std::string& text, double a, double b, double tol, int deadline_ms) {
  auto expr = parse_or_report(text, "expression");
  if (!expr) return kExitUsage;
  if (!(a < b) || !(tol > 0)) {
    std::cerr << "quad: requires a < b and tol > 0\n";
    return kExitUsage;
  }
  const QuadratureResult r =
      integrate(*expr, a, b, tol, std::chrono::milliseconds(deadline_ms));
  const char* status = r.status == QuadStatus::kConverged         ? "converged"
                       : r.status == QuadStatus::kMaxDepth        ? "max-depth"
                       : r.status == QuadStatus::kSingular        ? "singular"
                                                                  : "deadline-exceeded";
  nlohmann::json doc{{"value", r.value},
                     {"error_estimate", r.error_estimate},
                     {"evaluations", r.evaluations},
                     {"status", status}};
  if (r.flag) {
    doc["singularity"] = {{"location", r.flag->location},
                          {"trigger", r.flag->trigger == SingularityTrigger::kRapidChange
                                          ? "rapid-change"
                                          : r.flag->trigger == SingularityTrigger::kOverflow
                                                ? "overflow"
                                                : "domain-error"}};
  }
  std::cout << doc.dump(2) << "\n";
  return r.converged() ? kExitOk : kExitNegative;
}

std::unique_ptr<Backend> make_backend(const BackendSelection& sel, std::uint64_t seed) {
  if (sel.kind == "http") {
    if (sel.http.base_url.empty()) {
      throw std::runtime_error("http backend requires backend.url");
    }
    return std::make_unique<HttpBackend>(sel.http);
  }
  return std::make_unique<MockBackend>(seed, make_variant_responder(sel.noise_period));
}

struct GenArgs {
  std::string problems_file;
  std::string out_file;
  std::uint64_t seed = 1;
  int depth_cap = 3;
  int target_n = 50;
  int fanout = 10;
  int variants_per_prompt = 10;
  int easier_percent = 70;
  int noise_period = 13;
  std::string backend = "mock";
  std::string config_file;
  bool parallel = false;
  bool transcript = false;
};

int cmd_gen(const GenArgs& args) {
  std::ifstream in(args.problems_file);
  if (!in) {
    std::cerr << "gen: cannot open problems file: " << args.problems_file << "\n";
    return kExitUsage;
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.pop_back();
    }
    std::size_t b = 0;
    while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
    if (b < line.size()) lines.push_back(line.substr(b));
  }
  if (lines.empty()) {
    std::cerr << "gen: no problems in " << args.problems_file << "\n";
    return kExitUsage;
  }

  BackendSelection sel;
  sel.kind = args.backend;
  sel.noise_period = args.noise_period;
  if (!args.config_file.empty()) {
    sel = backend_from_config(KeyValueConfig::from_file(args.config_file));
  }
  std::unique_ptr<Backend> backend;
  try {
    backend = make_backend(sel, args.seed);
  } catch (const std::exception& e) {
    std::cerr << "gen: " << e.what() << "\n";
    return kExitUsage;
  }
  TranscriptingBackend transcripting(*backend, args.transcript);

  GenConfig gen;
  gen.depth_cap = args.depth_cap;
  gen.target_n = args.target_n;
  gen.fanout = args.fanout;
  gen.variants_per_prompt = args.variants_per_prompt;
  gen.easier_percent = args.easier_percent;
  gen.parallel = args.parallel;

  nlohmann::json trees = nlohmann::json::array();
  TreeCounters totals;
  int skipped = 0;
  int backend_failures = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    ParseResult parsed = parse(lines[i]);
    if (!parse_ok(parsed)) {
      const auto& err = std::get<ParseError>(parsed);
      std::cerr << "gen: skipping unparseable problem line " << (i + 1) << " ("
                << err.message() << ")\n";
      ++skipped;
      continue;
    }
    gen.rng_seed = args.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1));
    VariantTree tree = build_tree(std::get<Expr>(parsed), gen, transcripting);
    if (tree.counters.produced == 0 && tree.counters.requested > 0) ++backend_failures;
    mark_unsolvable(tree, std::chrono::milliseconds(5000), table_solve);
    totals.requested += tree.counters.requested;
    totals.produced += tree.counters.produced;
    totals.rejected_duplicate += tree.counters.rejected_duplicate;
    totals.unsolvable += tree.counters.unsolvable;
    trees.push_back(nlohmann::json::parse(tree_to_json_text(tree)));
  }
  if (static_cast<int>(lines.size()) == skipped) {
    std::cerr << "gen: every problem line failed to parse\n";
    return kExitUsage;
  }

  atomic_write_file(args.out_file, trees.dump(2) + "\n");
  const double unsolvable_fraction =
      totals.produced > 0 ? static_cast<double>(totals.unsolvable) / totals.produced : 0.0;
  std::cout << "trees: " << trees.size() << "\n"
            << "produced: " << totals.produced << " / requested " << totals.requested << "\n"
            << "rejected_duplicate: " << totals.rejected_duplicate << "\n"
            << "unsolvable: " << totals.unsolvable << " ("
            << static_cast<int>(std::lround(unsolvable_fraction * 100.0)) << "%)\n";
  if (args.transcript) {
    const fs::path transcript_path = fs::path(args.out_file).replace_extension(".transcript.jsonl");
    atomic_write_file(transcript_path, transcript_to_jsonl(transcripting.transcript()));
    std::cout << "transcript: " << transcript_path.string() << "\n";
  }
  return backend_failures == 0 ? kExitOk : kExitBackend;
}

struct TrainArgs {
  std::string config_file;
  std::string out_dir = "run";
  std::vector<std::string> overrides;
  std::string resume_checkpoint;
  std::string base_checkpoint;  // ttrl only
  bool no_variants = false;
};

RunManifest start_manifest(const ExperimentConfig& cfg, const BackendSelection& sel,
                           const std::string& mode) {
  RunManifest m;
  m.config = experiment_to_entries(cfg);
  m.config["backend"] = sel.kind;
  m.config["backend.noise_period"] = std::to_string(sel.noise_period);
  m.seed = cfg.seed;
  m.mode = mode;
  m.started_at = timestamp_utc_now();
  return m;
}

int cmd_train(const TrainArgs& args) {
  KeyValueConfig kv = args.config_file.empty() ? KeyValueConfig()
                                               : KeyValueConfig::from_file(args.config_file);
  for (const auto& o : args.overrides) kv.apply_override(o);
  if (args.no_variants) kv.set("use_variants", "false");
  ExperimentConfig cfg = experiment_from_config(kv);
  cfg.validate();
  const BackendSelection sel = backend_from_config(kv);

  const fs::path out_dir(args.out_dir);
  RunLock lock(out_dir);
  RunManifest manifest = start_manifest(cfg, sel, "train");

  SyntheticTask task(cfg.task);
  std::unique_ptr<Backend> backend = make_backend(sel, cfg.seed);

  std::optional<PolicyCheckpoint> resume;
  if (!args.resume_checkpoint.empty()) {
    resume = checkpoint_from_json_text(read_file(args.resume_checkpoint));
  }

  LadderResult result;
  try {
    result = run_ladder(cfg, *backend, task, resume ? &*resume : nullptr);
  } catch (const std::exception& e) {
    manifest.status = "failed";
    manifest.failure_cause = e.what();
    manifest.finished_at = timestamp_utc_now();
    atomic_write_file(out_dir / "manifest.json", manifest_to_json_text(manifest));
    std::cerr << "train: " << e.what() << "\n";
    return kExitNegative;
  }

  atomic_write_file(out_dir / "curve.csv", curve_to_csv(result.curve));
  atomic_write_file(out_dir / "answers.jsonl", answers_to_jsonl(result.answers));
  atomic_write_file(out_dir / "checkpoint_base.json",
                    checkpoint_to_json_text(result.base_checkpoint));
  atomic_write_file(out_dir / "checkpoint_final.json",
                    checkpoint_to_json_text(result.final_checkpoint));
  manifest.artifacts = {{"curve", "curve.csv"},
                        {"answers", "answers.jsonl"},
                        {"checkpoint_base", "checkpoint_base.json"},
                        {"checkpoint_final", "checkpoint_final.json"}};
  if (result.aborted) {
    manifest.status = "failed";
    manifest.failure_cause = result.abort_reason;
  }
  manifest.config["result.final_test_score"] = std::to_string(result.final_test_score);
  manifest.config["result.steps_run"] = std::to_string(result.steps_run);
  manifest.finished_at = timestamp_utc_now();
  atomic_write_file(out_dir / "manifest.json", manifest_to_json_text(manifest));

  std::cout << "steps: " << result.steps_run << "\n"
            << "final_test_score: " << result.final_test_score << "%\n"
            << "variants: produced " << result.generation.counters.produced
            << ", unsolvable " << result.generation.counters.unsolvable
            << ", holdout matches removed " << result.generation.holdout_removed << "\n"
            << "artifacts: " << (out_dir / "manifest.json").string() << "\n";
  return result.aborted ? kExitNegative : kExitOk;
}

int cmd_ttrl(const TrainArgs& args) {
  KeyValueConfig kv = args.config_file.empty() ? KeyValueConfig()
                                               : KeyValueConfig::from_file(args.config_file);
  for (const auto& o : args.overrides) kv.apply_override(o);
  ExperimentConfig cfg = experiment_from_config(kv);
  cfg.validate();
  const BackendSelection sel = backend_from_config(kv);

  const fs::path out_dir(args.out_dir);
  RunLock lock(out_dir);
  RunManifest manifest = start_manifest(cfg, sel, "ttrl");

  SyntheticTask task(cfg.task);
  std::unique_ptr<Backend> backend = make_backend(sel, cfg.seed);

  PolicyCheckpoint base;
  if (!args.base_checkpoint.empty()) {
    base = checkpoint_from_json_text(read_file(args.base_checkpoint));
  } else {
    base = make_checkpoint(task.base_params(), 0,
                           policy_config_hash(task.bank().feature_dim, cfg.grpo));
  }

  TtrlResult result;
  try {
    result = run_ttrl(cfg, *backend, task, base);
  } catch (const std::exception& e) {
    manifest.status = "failed";
    manifest.failure_cause = e.what();
    manifest.finished_at = timestamp_utc_now();
    atomic_write_file(out_dir / "manifest.json", manifest_to_json_text(manifest));
    std::cerr << "ttrl: " << e.what() << "\n";
    return kExitNegative;
  }

  atomic_write_file(out_dir / "ttrl_reports.jsonl", ttrl_reports_to_jsonl(result.reports));
  atomic_write_file(out_dir / "answers.jsonl", answers_to_jsonl(result.answers));
  manifest.artifacts = {{"reports", "ttrl_reports.jsonl"}, {"answers", "answers.jsonl"}};
  manifest.config["result.solved_count"] = std::to_string(result.solved_count);
  manifest.finished_at = timestamp_utc_now();
  atomic_write_file(out_dir / "manifest.json", manifest_to_json_text(manifest));

  std::cout << "questions: " << result.reports.size() << "\n"
            << "solved: " << result.solved_count << "\n"
            << "artifacts: " << (out_dir / "manifest.json").string() << "\n";
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_csv) {
  struct Row {
    std::string dir, mode, status, score;
    std::uint64_t seed;
  };
  std::vector<Row> rows;
  std::string merged_csv = "run,step,train_reward,test_score,wall_time\n";
  for (const auto& dir : run_dirs) {
    const fs::path manifest_path = fs::path(dir) / "manifest.json";
    if (!fs::exists(manifest_path)) continue;
    RunManifest m = manifest_from_json_text(read_file(manifest_path));
    Row row;
    row.dir = dir;
    row.mode = m.mode;
    row.status = m.status;
    row.seed = m.seed;
    if (auto it = m.config.find("result.final_test_score"); it != m.config.end()) {
      row.score = it->second;
    } else if (auto it2 = m.config.find("result.solved_count"); it2 != m.config.end()) {
      row.score = "solved " + it2->second;
    }
    rows.push_back(std::move(row));
    const fs::path curve_path = fs::path(dir) / "curve.csv";
    if (fs::exists(curve_path)) {
      std::istringstream is(read_file(curve_path));
      std::string line;
      std::getline(is, line);  // header
      while (std::getline(is, line)) {
        if (!line.empty()) merged_csv += dir + "," + line + "\n";
      }
    }
  }
  if (rows.empty()) {
    std::cerr << "report: no manifest.json found under the given run dirs\n";
    return kExitUsage;
  }
  std::cout << "run\tmode\tstatus\tseed\tscore\n";
  for (const auto& r : rows) {
    std::cout << r.dir << "\t" << r.mode << "\t" << r.status << "\t" << r.seed << "\t"
              << r.score << "\n";
  }
  if (!out_csv.empty()) {
    atomic_write_file(out_csv, merged_csv);
    std::cout << "curves: " << out_csv << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curriculum-driven self-improvement engine for verifiable integration tasks"};
  app.require_subcommand(1);

  VerifyArgs verify_args;
  CLI::App* verify_cmd = app.add_subcommand("verify", "verify a candidate antiderivative");
  verify_cmd->add_option("--integrand", verify_args.integrand, "integrand f(x)")->required();
  verify_cmd->add_option("--candidate", verify_args.candidate, "candidate antiderivative")
      ->required();
  verify_cmd->add_option("--rel-tol", verify_args.rel_tol, "relative tolerance (default 1e-2)");
  verify_cmd->add_option("--points", verify_args.points, "sample points (default 5)");
  verify_cmd->add_option("--interval-length", verify_args.interval_length,
                         "test interval length (default 0.1)");
  verify_cmd->add_option("--domain-lo", verify_args.domain_lo, "domain lower bound");
  verify_cmd->add_option("--domain-hi", verify_args.domain_hi, "domain upper bound");
  verify_cmd->add_option("--deadline-ms", verify_args.deadline_ms,
                         "per-attempt deadline (default 2000)");
  verify_cmd->add_option("--max-retries", verify_args.max_retries, "retries (default 3)");
  verify_cmd->add_option("--seed", verify_args.seed, "rng seed");

  std::string parse_expr;
  CLI::App* parse_cmd = app.add_subcommand("parse", "parse and canonicalize an expression");
  parse_cmd->add_option("--expr", parse_expr, "expression text")->required();

  std::string quad_expr;
  double quad_a = 0.0, quad_b = 1.0, quad_tol = 1e-9;
  int quad_deadline_ms = 2000;
  CLI::App* quad_cmd = app.add_subcommand("quad", "adaptive quadrature of an expression");
  quad_cmd->add_option("--expr", quad_expr, "integrand")->required();
  quad_cmd->add_option("--a", quad_a, "lower limit")->required();
  quad_cmd->add_option("--b", quad_b, "upper limit")->required();
  quad_cmd->add_option("--tol", quad_tol, "absolute tolerance");
  quad_cmd->add_option("--deadline-ms", quad_deadline_ms, "deadline");

  GenArgs gen_args;
  CLI::App* gen_cmd = app.add_subcommand("gen", "build variant trees for a problems file");
  gen_cmd->add_option("--problems", gen_args.problems_file, "one integrand per line")
      ->required();
  gen_cmd->add_option("--out", gen_args.out_file, "output tree JSON")->required();
  gen_cmd->add_option("--seed", gen_args.seed, "rng seed");
  gen_cmd->add_option("--depth-cap", gen_args.depth_cap, "tree depth cap (3 or 2 regimes)");
  gen_cmd->add_option("--target-n", gen_args.target_n, "variants per root");
  gen_cmd->add_option("--fanout", gen_args.fanout, "children kept per node");
  gen_cmd->add_option("--batch-size", gen_args.variants_per_prompt, "variants per prompt");
  gen_cmd->add_option("--easier-percent", gen_args.easier_percent, "difficulty mix");
  gen_cmd->add_option("--noise-period", gen_args.noise_period,
                      "mock: every k-th line malformed (0 = off)");
  gen_cmd->add_option("--backend", gen_args.backend, "mock | http");
  gen_cmd->add_option("--config", gen_args.config_file, "config file for backend settings");
  gen_cmd->add_flag("--parallel", gen_args.parallel, "generate frontier batches in parallel");
  gen_cmd->add_flag("--transcript", gen_args.transcript, "record the prompt transcript");

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "run the LADDER loop");
  train_cmd->add_option("--config", train_args.config_file, "experiment config file");
  train_cmd->add_option("--out", train_args.out_dir, "run directory")->required();
  train_cmd->add_option("--set", train_args.overrides, "override key=value")->take_all();
  train_cmd->add_option("--resume", train_args.resume_checkpoint,
                        "continue from a checkpoint");
  train_cmd->add_flag("--no-variants", train_args.no_variants,
                      "train on the hard roots only");

  TrainArgs ttrl_args;
  CLI::App* ttrl_cmd = app.add_subcommand("ttrl", "run the per-question TTRL loop");
  ttrl_cmd->add_option("--config", ttrl_args.config_file, "experiment config file");
  ttrl_cmd->add_option("--out", ttrl_args.out_dir, "run directory")->required();
  ttrl_cmd->add_option("--set", ttrl_args.overrides, "override key=value")->take_all();
  ttrl_cmd->add_option("--base-checkpoint", ttrl_args.base_checkpoint,
                       "policy checkpoint to train from and roll back to");

  std::vector<std::string> report_dirs;
  std::string report_out;
  CLI::App* report_cmd = app.add_subcommand("report", "summarize run directories");
  report_cmd->add_option("--run-dir", report_dirs, "run directory (repeatable)")
      ->required()
      ->take_all();
  report_cmd->add_option("--out", report_out, "merged curve CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" ? kExitOk : kExitUsage;
  }

  try {
    if (verify_cmd->parsed()) return cmd_verify(verify_args);
    if (parse_cmd->parsed()) return cmd_parse(parse_expr);
    if (quad_cmd->parsed()) return cmd_quad(quad_expr, quad_a, quad_b, quad_tol, quad_deadline_ms);
    if (gen_cmd->parsed()) return cmd_gen(gen_args);
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (ttrl_cmd->parsed()) return cmd_ttrl(ttrl_args);
    if (report_cmd->parsed()) return cmd_report(report_dirs, report_out);
  } catch (const BackendError& e) {
    std::cerr << "backend failure: " << e.message << "\n";
    return kExitBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
