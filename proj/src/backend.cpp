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

#include "ladder/backend.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace ladder {

namespace {
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}
}  // namespace

std::uint64_t hash_request(const GenerationRequest& request, std::uint64_t seed) {
  std::uint64_t h = fnv1a(request.prompt.data(), request.prompt.size(),
                          1469598103934665603ULL ^ seed);
  const auto temp_decile = static_cast<std::int64_t>(std::llround(request.temperature * 10.0));
  h = fnv1a(&temp_decile, sizeof temp_decile, h);
  return h;
}

namespace {
std::optional<BackendError> validate_request(const GenerationRequest& request) {
  if (request.temperature < 0.0 || request.max_tokens < 1) {
    return BackendError{"invalid request: temperature must be >= 0 and max_tokens >= 1", 0};
  }
  return std::nullopt;
}
}  // namespace

CompletionResult MockBackend::complete(const GenerationRequest& request) {
  if (auto invalid = validate_request(request)) return *invalid;
  const auto start = std::chrono::steady_clock::now();
  std::string text = responder_(request, hash_request(request, seed_));
  if (text.empty()) {
    return BackendError{"mock responder produced an empty body", 1};
  }
  GenerationResponse resp;
  resp.text = std::move(text);
  resp.backend_id = id();
  resp.latency = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  return resp;
}

// ---------------------------------------------------------------------------

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

CompletionResult HttpBackend::complete(const GenerationRequest& request) {
  if (auto invalid = validate_request(request)) return *invalid;
  nlohmann::json body{
      {"model", config_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  if (!request.stop.empty()) body["stop"] = request.stop;
  const std::string payload = body.dump();

  std::string last_error;
  auto backoff = config_.retry.initial_backoff;
  const int attempts_allowed = config_.retry.max_retries + 1;
  for (int attempt = 1; attempt <= attempts_allowed; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
        config_.retry.request_timeout));
    client.set_read_timeout(config_.retry.request_timeout);
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto result = client.Post(config_.path, headers, payload, "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
    } else if (result->status < 200 || result->status >= 300) {
      last_error = "status " + std::to_string(result->status);
    } else {
      try {
        const auto parsed = nlohmann::json::parse(result->body);
        std::string text = parsed.at("choices").at(0).at("message").at("content");
        if (text.empty()) throw std::runtime_error("empty content");
        GenerationResponse resp;
        resp.text = std::move(text);
        resp.backend_id = id();
        resp.latency = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now() - start);
        if (parsed.contains("usage") && parsed["usage"].contains("total_tokens")) {
          resp.token_usage = parsed["usage"]["total_tokens"].get<int>();
        }
        return resp;
      } catch (const std::exception& e) {
        last_error = std::string("malformed body: ") + e.what();
      }
    }
    if (attempt < attempts_allowed) {
      sleeper_(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(backoff.count()) *
                                 config_.retry.multiplier));
    }
  }
  return BackendError{last_error, attempts_allowed};
}

// ---------------------------------------------------------------------------

CompletionResult TranscriptingBackend::complete(const GenerationRequest& request) {
  CompletionResult result = inner_.complete(request);
  if (enabled_ && completion_ok(result)) {
    std::lock_guard<std::mutex> lock(mu_);
    entries_.emplace_back(request, std::get<GenerationResponse>(result));
  }
  return result;
}

std::vector<TranscriptingBackend::Entry> TranscriptingBackend::transcript() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

}  // namespace ladder
