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

#include <unistd.h>

#include <algorithm>
#include <filesystem>

#include <doctest.h>

#include "ladder/config.hpp"
#include "ladder/io.hpp"
#include "ladder/variants.hpp"

using namespace ladder;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ladder-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_SUITE_BEGIN("config_io");

TEST_CASE("key-value config parsing, comments, overrides") {
  const auto kv = KeyValueConfig::from_string(
      "# comment line\n"
      "grpo.steps = 250   # trailing comment\n"
      "seed=9\n"
      "gen.personas = alpha | beta\n"
      "use_variants = false\n");
  CHECK(kv.get_int("grpo.steps", 0) == 250);
  CHECK(kv.get_u64("seed", 0) == 9);
  CHECK(kv.get_bool("use_variants", true) == false);
  CHECK(kv.get_list("gen.personas", {}) == std::vector<std::string>{"alpha", "beta"});
  CHECK(kv.get_int("missing", 123) == 123);

  KeyValueConfig mut = kv;
  mut.apply_override("grpo.steps=7");
  CHECK(mut.get_int("grpo.steps", 0) == 7);
  CHECK_THROWS_AS(mut.apply_override("no-equals"), std::invalid_argument);
  CHECK_THROWS(KeyValueConfig::from_string("a line without equals\n"));
  CHECK_THROWS(kv.get_int("gen.personas", 0));
}

TEST_CASE("experiment config wiring and snapshot") {
  const auto kv = KeyValueConfig::from_string(
      "grpo.steps = 50\n"
      "grpo.kl_coef = 0.002\n"
      "verify.rel_tol = 1e-3\n"
      "use_variants = false\n"
      "ttrl.variants = 120\n");
  const ExperimentConfig cfg = experiment_from_config(kv);
  CHECK(cfg.grpo.steps == 50);
  CHECK(cfg.grpo.kl_coefficient == 0.002);
  CHECK(cfg.verify.rel_tol == 1e-3);
  CHECK(cfg.use_variants == false);
  CHECK(cfg.ttrl_variants == 120);

  // defaults pass through to the snapshot; KL default is the paper value
  const ExperimentConfig defaults = experiment_from_config(KeyValueConfig());
  const auto entries = experiment_to_entries(defaults);
  CHECK(entries.at("grpo.kl_coef") == "0.001");
  CHECK(entries.at("verify.rel_tol") == "0.01");
  CHECK(entries.at("verify.points") == "5");
  CHECK(entries.at("ttrl.steps") == "100");
  CHECK(entries.at("ttrl.variants") == "800");

  // snapshot round-trips through the parser to the same config
  std::string text;
  for (const auto& [k, v] : entries) text += k + " = " + v + "\n";
  const ExperimentConfig reparsed = experiment_from_config(KeyValueConfig::from_string(text));
  CHECK(experiment_to_entries(reparsed) == entries);
}

TEST_CASE("atomic writes leave no temp files") {
  TempDir dir;
  const fs::path target = dir.path / "nested" / "file.txt";
  atomic_write_file(target, "payload");
  CHECK(read_file(target) == "payload");
  CHECK_FALSE(fs::exists(target.string() + ".tmp"));
  atomic_write_file(target, "replaced");
  CHECK(read_file(target) == "replaced");
}

TEST_CASE("variant tree serialization round-trips") {
  GenConfig cfg;
  cfg.target_n = 15;
  cfg.rng_seed = 77;
  MockBackend backend(77, make_variant_responder(/*noise_period=*/5));
  ParseResult root = parse("x**4 + 2*x**2");
  REQUIRE(parse_ok(root));
  VariantTree tree = build_tree(std::get<Expr>(root), cfg, backend);
  mark_unsolvable(tree, std::chrono::milliseconds(1000), table_solve);

  const std::string text = tree_to_json_text(tree);
  const VariantTree back = tree_from_json_text(text);
  CHECK(tree_to_json_text(back) == text);
  REQUIRE(back.nodes.size() == tree.nodes.size());
  CHECK(back.counters.produced == tree.counters.produced);
  CHECK(back.counters.unsolvable == tree.counters.unsolvable);
  CHECK_THROWS(tree_from_json_text("{\"schema_version\": 99, \"nodes\": []}"));
}

TEST_CASE("checkpoint serialization restores exact bits") {
  PolicyCheckpoint ckpt;
  ckpt.step = 17;
  ckpt.config_hash = 0xDEADBEEFULL;
  ckpt.theta_bits = {0x3FF0000000000000ULL, 0x4008000000000001ULL, 0x0ULL,
                     0x8000000000000000ULL};
  const std::string text = checkpoint_to_json_text(ckpt);
  const PolicyCheckpoint back = checkpoint_from_json_text(text);
  CHECK(back.step == ckpt.step);
  CHECK(back.config_hash == ckpt.config_hash);
  CHECK(back.theta_bits == ckpt.theta_bits);
}

TEST_CASE("answers, curve and manifest formats") {
  std::vector<AnswerRecord> answers{{"q-1", "x**3/3", Verdict::kCorrect},
                                    {"q-2", "sin(x)", Verdict::kIncorrect}};
  const std::string jsonl = answers_to_jsonl(answers);
  CHECK(jsonl.find("\"question_id\":\"q-1\"") != std::string::npos);
  CHECK(jsonl.find("\"verdict\":\"correct\"") != std::string::npos);
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 2);

  std::vector<TrainingCurvePoint> curve{{10, 0.25, 12.5, 1.75}};
  const std::string csv = curve_to_csv(curve);
  CHECK(csv.rfind("step,train_reward,test_score,wall_time\n", 0) == 0);
  CHECK(csv.find("10,0.250000,12.50,1.750") != std::string::npos);

  RunManifest manifest;
  manifest.mode = "train";
  manifest.seed = 5;
  manifest.config = {{"grpo.steps", "100"}};
  manifest.artifacts = {{"curve", "curve.csv"}};
  manifest.started_at = timestamp_utc_now();
  manifest.finished_at = manifest.started_at;
  const RunManifest back = manifest_from_json_text(manifest_to_json_text(manifest));
  CHECK(back.mode == "train");
  CHECK(back.seed == 5);
  CHECK(back.config.at("grpo.steps") == "100");
  CHECK(back.artifacts.at("curve") == "curve.csv");
  CHECK(back.status == "ok");
}

TEST_CASE("run lock is exclusive and released on destruction") {
  TempDir dir;
  {
    RunLock lock(dir.path);
    CHECK_THROWS_AS(RunLock(dir.path), std::runtime_error);
  }
  RunLock relock(dir.path);  // released by the destructor above
}

TEST_SUITE_END();
