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

#ifndef LADDER_IO_HPP_
#define LADDER_IO_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ladder/backend.hpp"
#include "ladder/driver.hpp"
#include "ladder/grpo.hpp"
#include "ladder/variants.hpp"

namespace ladder {

inline constexpr std::string_view kEngineVersion = "0.1.0";

// All artifact writes go through write-temp-then-rename, so interrupted runs
// never leave truncated files behind.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);  // throws std::runtime_error

// Variant trees: versioned JSON with one record per node.
std::string tree_to_json_text(const VariantTree& tree);
VariantTree tree_from_json_text(const std::string& text);  // throws on schema mismatch

// Policy checkpoints: versioned JSON storing exact bit patterns.
std::string checkpoint_to_json_text(const PolicyCheckpoint& ckpt);
PolicyCheckpoint checkpoint_from_json_text(const std::string& text);

// Answers: JSONL with {question_id, answer_text, verdict}.
std::string answers_to_jsonl(const std::vector<AnswerRecord>& answers);

// Curves: CSV with header step,train_reward,test_score,wall_time.
std::string curve_to_csv(const std::vector<TrainingCurvePoint>& curve);

std::string ttrl_reports_to_jsonl(const std::vector<TtrlQuestionReport>& reports);

std::string transcript_to_jsonl(const std::vector<TranscriptingBackend::Entry>& entries);

std::string verification_report_to_json(const VerificationReport& report);

struct RunManifest {
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> artifacts;  // name -> path relative to the run dir
  std::string engine_version{kEngineVersion};
  std::string mode;  // train | ttrl | gen
  std::string started_at;
  std::string finished_at;
  std::string status = "ok";  // ok | failed
  std::string failure_cause;
};

std::string manifest_to_json_text(const RunManifest& manifest);
RunManifest manifest_from_json_text(const std::string& text);

std::string timestamp_utc_now();

// Exclusive ownership of a run directory via a lock file; throws
// std::runtime_error when the directory is already locked.
class RunLock {
 public:
  explicit RunLock(const std::filesystem::path& dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  std::filesystem::path lock_path_;
};

}  // namespace ladder

#endif  // LADDER_IO_HPP_
