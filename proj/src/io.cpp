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

#include "ladder/io.hpp"

#include <unistd.h>

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ladder {

using nlohmann::json;

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace {

constexpr int kTreeSchemaVersion = 1;
constexpr int kCheckpointSchemaVersion = 1;

std::string_view intended_name(IntendedDifficulty d) {
  return d == IntendedDifficulty::kEasier ? "easier" : "equivalent";
}

std::string_view solvability_name(Solvability s) {
  switch (s) {
    case Solvability::kUnknown: return "unknown";
    case Solvability::kSolvable: return "solvable";
    case Solvability::kUnsolvable: return "unsolvable";
  }
  return "?";
}

Solvability solvability_from(std::string_view s) {
  if (s == "solvable") return Solvability::kSolvable;
  if (s == "unsolvable") return Solvability::kUnsolvable;
  return Solvability::kUnknown;
}

}  // namespace

std::string tree_to_json_text(const VariantTree& tree) {
  json nodes = json::array();
  for (const auto& node : tree.nodes) {
    json j{{"id", node.id},
           {"parent", node.parent},
           {"depth", node.depth},
           {"intended", intended_name(node.intended)},
           {"temperature", node.temperature},
           {"persona", node.persona},
           {"batch", node.batch},
           {"solvability", solvability_name(node.solvability)}};
    if (node.expression) {
      j["expression"] = canonical_text(*node.expression);
    } else {
      j["opaque_text"] = node.opaque_text;
    }
    nodes.push_back(std::move(j));
  }
  json doc{{"schema_version", kTreeSchemaVersion},
           {"counters",
            {{"requested", tree.counters.requested},
             {"produced", tree.counters.produced},
             {"rejected_duplicate", tree.counters.rejected_duplicate},
             {"unsolvable", tree.counters.unsolvable}}},
           {"nodes", std::move(nodes)}};
  return doc.dump(2) + "\n";
}

VariantTree tree_from_json_text(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.at("schema_version").get<int>() != kTreeSchemaVersion) {
    throw std::runtime_error("variant tree: unsupported schema version");
  }
  VariantTree tree;
  const json& counters = doc.at("counters");
  tree.counters.requested = counters.at("requested").get<int>();
  tree.counters.produced = counters.at("produced").get<int>();
  tree.counters.rejected_duplicate = counters.at("rejected_duplicate").get<int>();
  tree.counters.unsolvable = counters.at("unsolvable").get<int>();
  for (const json& j : doc.at("nodes")) {
    VariantNode node;
    node.id = j.at("id").get<int>();
    node.parent = j.at("parent").get<int>();
    node.depth = j.at("depth").get<int>();
    node.intended = j.at("intended").get<std::string>() == "equivalent"
                        ? IntendedDifficulty::kEquivalent
                        : IntendedDifficulty::kEasier;
    node.temperature = j.at("temperature").get<double>();
    node.persona = j.at("persona").get<std::string>();
    node.batch = j.at("batch").get<int>();
    node.solvability = solvability_from(j.at("solvability").get<std::string>());
    if (j.contains("expression")) {
      ParseResult r = parse(j.at("expression").get<std::string>());
      if (!parse_ok(r)) throw std::runtime_error("variant tree: unparseable expression");
      node.expression = std::get<Expr>(r);
    } else {
      node.opaque_text = j.at("opaque_text").get<std::string>();
    }
    tree.nodes.push_back(std::move(node));
  }
  if (tree.nodes.empty()) throw std::runtime_error("variant tree: no nodes");
  return tree;
}

std::string checkpoint_to_json_text(const PolicyCheckpoint& ckpt) {
  json doc{{"schema_version", kCheckpointSchemaVersion},
           {"step", ckpt.step},
           {"config_hash", ckpt.config_hash},
           {"theta_bits", ckpt.theta_bits}};
  return doc.dump(2) + "\n";
}

PolicyCheckpoint checkpoint_from_json_text(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.at("schema_version").get<int>() != kCheckpointSchemaVersion) {
    throw std::runtime_error("checkpoint: unsupported schema version");
  }
  PolicyCheckpoint ckpt;
  ckpt.step = doc.at("step").get<int>();
  ckpt.config_hash = doc.at("config_hash").get<std::uint64_t>();
  ckpt.theta_bits = doc.at("theta_bits").get<std::vector<std::uint64_t>>();
  return ckpt;
}

std::string answers_to_jsonl(const std::vector<AnswerRecord>& answers) {
  std::ostringstream os;
  for (const auto& a : answers) {
    os << json{{"question_id", a.question_id},
               {"answer_text", a.answer_text},
               {"verdict", verdict_name(a.verdict)}}
              .dump()
       << "\n";
  }
  return os.str();
}

std::string curve_to_csv(const std::vector<TrainingCurvePoint>& curve) {
  std::ostringstream os;
  os << "step,train_reward,test_score,wall_time\n";
  for (const auto& p : curve) {
    char line[160];
    std::snprintf(line, sizeof(line), "%d,%.6f,%.2f,%.3f\n", p.step, p.train_reward_mean,
                  p.test_score, p.wall_time_s);
    os << line;
  }
  return os.str();
}

std::string ttrl_reports_to_jsonl(const std::vector<TtrlQuestionReport>& reports) {
  std::ostringstream os;
  for (const auto& r : reports) {
    os << json{{"question_id", r.question_id},
               {"solved", r.solved},
               {"solved_at_step", r.solved_at_step},
               {"steps_run", r.steps_run},
               {"answer_text", r.answer_text},
               {"verdict", verdict_name(r.verdict)},
               {"rollback_verified", r.rollback_verified},
               {"variants_produced", r.gen_counters.produced},
               {"variants_unsolvable", r.gen_counters.unsolvable}}
              .dump()
       << "\n";
  }
  return os.str();
}

std::string transcript_to_jsonl(const std::vector<TranscriptingBackend::Entry>& entries) {
  std::ostringstream os;
  for (const auto& [request, response] : entries) {
    os << json{{"prompt", request.prompt},
               {"temperature", request.temperature},
               {"max_tokens", request.max_tokens},
               {"response", response.text},
               {"backend", response.backend_id}}
              .dump()
       << "\n";
  }
  return os.str();
}

std::string verification_report_to_json(const VerificationReport& report) {
  json points = json::array();
  for (const auto& p : report.point_checks) {
    points.push_back(json{{"center", p.center},
                          {"candidate_delta", p.candidate_delta},
                          {"quadrature_value", p.quadrature_value},
                          {"relative_difference", p.relative_difference},
                          {"passed", p.passed}});
  }
  json doc{{"verdict", verdict_name(report.verdict)},
           {"point_checks", std::move(points)},
           {"resamples", report.resamples},
           {"retries_used", report.retries_used}};
  if (!report.rejection_reason.empty()) doc["rejection_reason"] = report.rejection_reason;
  return doc.dump(2) + "\n";
}

std::string manifest_to_json_text(const RunManifest& manifest) {
  json doc{{"engine_version", manifest.engine_version},
           {"mode", manifest.mode},
           {"seed", manifest.seed},
           {"config", manifest.config},
           {"artifacts", manifest.artifacts},
           {"started_at", manifest.started_at},
           {"finished_at", manifest.finished_at},
           {"status", manifest.status},
           {"failure_cause", manifest.failure_cause}};
  return doc.dump(2) + "\n";
}

RunManifest manifest_from_json_text(const std::string& text) {
  const json doc = json::parse(text);
  RunManifest m;
  m.engine_version = doc.at("engine_version").get<std::string>();
  m.mode = doc.at("mode").get<std::string>();
  m.seed = doc.at("seed").get<std::uint64_t>();
  m.config = doc.at("config").get<std::map<std::string, std::string>>();
  m.artifacts = doc.at("artifacts").get<std::map<std::string, std::string>>();
  m.started_at = doc.at("started_at").get<std::string>();
  m.finished_at = doc.at("finished_at").get<std::string>();
  m.status = doc.at("status").get<std::string>();
  m.failure_cause = doc.value("failure_cause", "");
  return m;
}

std::string timestamp_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

RunLock::RunLock(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  lock_path_ = dir / ".lock";
  if (std::filesystem::exists(lock_path_)) {
    throw std::runtime_error("run directory is locked: " + dir.string());
  }
  std::ofstream out(lock_path_);
  out << "pid " << ::getpid() << "\n";
}

RunLock::~RunLock() {
  std::error_code ec;
  std::filesystem::remove(lock_path_, ec);
}

}  // namespace ladder
