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

#ifndef LADDER_BACKEND_HPP_
#define LADDER_BACKEND_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ladder {

// Uniform text-generation contract used by variant generation: a
// deterministic scripted mock for tests and reproducible runs, and a remote
// chat-completion client for real models.

struct GenerationRequest {
  std::string prompt;
  double temperature = 1.0;
  int max_tokens = 1024;
  std::vector<std::string> stop;
};

struct GenerationResponse {
  std::string text;
  std::string backend_id;
  std::chrono::microseconds latency{0};
  std::optional<int> token_usage;
};

struct BackendError {
  std::string message;
  int attempts = 0;
};

using CompletionResult = std::variant<GenerationResponse, BackendError>;

inline bool completion_ok(const CompletionResult& r) {
  return std::holds_alternative<GenerationResponse>(r);
}

class Backend {
 public:
  virtual ~Backend() = default;
  virtual CompletionResult complete(const GenerationRequest& request) = 0;
  virtual std::string id() const = 0;
};

std::uint64_t hash_request(const GenerationRequest& request, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Deterministic mock

// The mock's reply is produced by a pluggable responder as a pure function of
// the request and an rng derived from (prompt hash, temperature, seed), so
// identical requests always yield identical responses. The variants module
// provides the transformation-rule-driven responder used for generation.
class MockBackend : public Backend {
 public:
  using Responder =
      std::function<std::string(const GenerationRequest&, std::uint64_t derived_seed)>;

  MockBackend(std::uint64_t seed, Responder responder)
      : seed_(seed), responder_(std::move(responder)) {}

  CompletionResult complete(const GenerationRequest& request) override;
  std::string id() const override { return "mock"; }

 private:
  std::uint64_t seed_;
  Responder responder_;
};

// ---------------------------------------------------------------------------
// Remote chat-completion client

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
  std::chrono::milliseconds request_timeout{60000};
};

struct HttpBackendConfig {
  std::string base_url;          // e.g. http://localhost:8000
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env = "LADDER_API_KEY";  // credential comes from the environment
  RetryPolicy retry;
};

// Speaks the de-facto chat-completion JSON convention (model, message list,
// temperature, max_tokens, stop). Transport errors, non-success statuses and
// malformed bodies are retried with exponential backoff up to the configured
// cap, then surfaced as BackendError.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  CompletionResult complete(const GenerationRequest& request) override;
  std::string id() const override { return "http:" + config_.model; }

  // Test hook: replaces the real sleep between retries.
  void set_sleeper(std::function<void(std::chrono::milliseconds)> sleeper) {
    sleeper_ = std::move(sleeper);
  }

 private:
  HttpBackendConfig config_;
  std::function<void(std::chrono::milliseconds)> sleeper_;
};

// ---------------------------------------------------------------------------
// Transcripts

// Decorator recording every request/response pair in issue order. Collection
// is mutex-guarded so concurrent in-flight requests stay race-free.
class TranscriptingBackend : public Backend {
 public:
  using Entry = std::pair<GenerationRequest, GenerationResponse>;

  TranscriptingBackend(Backend& inner, bool enabled = true)
      : inner_(inner), enabled_(enabled) {}

  CompletionResult complete(const GenerationRequest& request) override;
  std::string id() const override { return inner_.id(); }

  std::vector<Entry> transcript() const;
  void set_enabled(bool enabled) { enabled_ = enabled; }

 private:
  Backend& inner_;
  bool enabled_;
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
};

}  // namespace ladder

#endif  // LADDER_BACKEND_HPP_
