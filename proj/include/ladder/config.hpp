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

#ifndef LADDER_CONFIG_HPP_
#define LADDER_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ladder/driver.hpp"

namespace ladder {

// Flat dotted-key configuration: one `key = value` pair per line, `#`
// comments. CLI flags override file values.

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig from_file(const std::string& path);  // throws std::runtime_error
  static KeyValueConfig from_string(std::string_view text);

  void set(std::string key, std::string value);
  void apply_override(std::string_view assignment);  // "key=value"
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, std::string fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // '|'-separated list
  std::vector<std::string> get_list(const std::string& key,
                                    std::vector<std::string> fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// Experiment wiring from flat keys; unknown keys are preserved in the
// manifest snapshot but otherwise ignored.
ExperimentConfig experiment_from_config(const KeyValueConfig& kv);

// Complete, resolved snapshot (defaults included) sufficient to reproduce the
// run with the mock backend.
std::map<std::string, std::string> experiment_to_entries(const ExperimentConfig& cfg);

struct BackendSelection {
  std::string kind = "mock";  // mock | http
  int noise_period = 13;      // mock: every k-th generated line is malformed
  HttpBackendConfig http;
};

BackendSelection backend_from_config(const KeyValueConfig& kv);

}  // namespace ladder

#endif  // LADDER_CONFIG_HPP_
