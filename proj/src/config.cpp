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

#include "ladder/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ladder {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str());
}

KeyValueConfig KeyValueConfig::from_string(std::string_view text) {
  KeyValueConfig cfg;
  std::istringstream is{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    cfg.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return cfg;
}

void KeyValueConfig::set(std::string key, std::string value) {
  entries_[std::move(key)] = std::move(value);
}

void KeyValueConfig::apply_override(std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw std::invalid_argument("override must look like key=value");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key, std::string fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw std::runtime_error("config key " + key + ": expected a number, got '" +
                             it->second + "'");
  }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw std::runtime_error("config key " + key + ": expected an integer, got '" +
                             it->second + "'");
  }
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw std::runtime_error("config key " + key + ": expected an integer, got '" +
                             it->second + "'");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::runtime_error("config key " + key + ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key,
                                                  std::vector<std::string> fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<std::string> out;
  std::string_view rest = it->second;
  while (!rest.empty()) {
    const std::size_t bar = rest.find('|');
    out.push_back(trim(rest.substr(0, bar)));
    if (bar == std::string_view::npos) break;
    rest = rest.substr(bar + 1);
  }
  return out;
}

ExperimentConfig experiment_from_config(const KeyValueConfig& kv) {
  ExperimentConfig cfg;
  cfg.task.train_roots = kv.get_int("task.train_roots", cfg.task.train_roots);
  cfg.task.test_questions = kv.get_int("task.test_questions", cfg.task.test_questions);
  cfg.task.ttrl_questions = kv.get_int("task.ttrl_questions", cfg.task.ttrl_questions);
  cfg.task.mix_primary_l3 = kv.get_double("task.mix_primary_l3", cfg.task.mix_primary_l3);
  cfg.task.mix_primary_l4 = kv.get_double("task.mix_primary_l4", cfg.task.mix_primary_l4);
  cfg.task.boost_l2 = kv.get_double("task.boost_l2", cfg.task.boost_l2);
  cfg.task.boost_l3 = kv.get_double("task.boost_l3", cfg.task.boost_l3);
  cfg.task.boost_l4 = kv.get_double("task.boost_l4", cfg.task.boost_l4);
  cfg.task.seed = kv.get_u64("task.seed", cfg.task.seed);

  cfg.gen.variants_per_prompt = kv.get_int("gen.variants_per_prompt", cfg.gen.variants_per_prompt);
  cfg.gen.temp_lo = kv.get_double("gen.temp_lo", cfg.gen.temp_lo);
  cfg.gen.temp_hi = kv.get_double("gen.temp_hi", cfg.gen.temp_hi);
  cfg.gen.depth_cap = kv.get_int("gen.depth_cap", cfg.gen.depth_cap);
  cfg.gen.easier_percent = kv.get_int("gen.easier_percent", cfg.gen.easier_percent);
  cfg.gen.target_n = kv.get_int("gen.target_n", cfg.gen.target_n);
  cfg.gen.fanout = kv.get_int("gen.fanout", cfg.gen.fanout);
  cfg.gen.personas = kv.get_list("gen.personas", cfg.gen.personas);

  cfg.grpo.group_size = kv.get_int("grpo.group_size", cfg.grpo.group_size);
  cfg.grpo.clip_epsilon = kv.get_double("grpo.clip_epsilon", cfg.grpo.clip_epsilon);
  cfg.grpo.kl_coefficient = kv.get_double("grpo.kl_coef", cfg.grpo.kl_coefficient);
  cfg.grpo.learning_rate = kv.get_double("grpo.learning_rate", cfg.grpo.learning_rate);
  cfg.grpo.steps = kv.get_int("grpo.steps", cfg.grpo.steps);

  cfg.verify.domain_lo = kv.get_double("verify.domain_lo", cfg.verify.domain_lo);
  cfg.verify.domain_hi = kv.get_double("verify.domain_hi", cfg.verify.domain_hi);
  cfg.verify.points = kv.get_int("verify.points", cfg.verify.points);
  cfg.verify.interval_length = kv.get_double("verify.interval_length", cfg.verify.interval_length);
  cfg.verify.rel_tol = kv.get_double("verify.rel_tol", cfg.verify.rel_tol);
  cfg.verify.attempt_deadline =
      std::chrono::milliseconds(kv.get_int("verify.deadline_ms", 2000));
  cfg.verify.max_retries = kv.get_int("verify.max_retries", cfg.verify.max_retries);
  cfg.verify.rng_seed = kv.get_u64("verify.seed", cfg.verify.rng_seed);

  cfg.weights.accuracy = kv.get_double("reward.w_accuracy", cfg.weights.accuracy);
  cfg.weights.format = kv.get_double("reward.w_format", cfg.weights.format);

  cfg.batch_groups = kv.get_int("train.batch_groups", cfg.batch_groups);
  cfg.curve_every = kv.get_int("train.curve_every", cfg.curve_every);
  cfg.plateau_stop = kv.get_bool("train.plateau_stop", cfg.plateau_stop);
  cfg.plateau_min_steps = kv.get_int("train.plateau_min_steps", cfg.plateau_min_steps);
  cfg.solve_budget = std::chrono::milliseconds(kv.get_int("train.solve_budget_ms", 5000));

  cfg.ttrl_steps = kv.get_int("ttrl.steps", cfg.ttrl_steps);
  cfg.ttrl_variants = kv.get_int("ttrl.variants", cfg.ttrl_variants);
  cfg.ttrl_batch_groups = kv.get_int("ttrl.batch_groups", cfg.ttrl_batch_groups);
  cfg.ttrl_depth_cap = kv.get_int("ttrl.depth_cap", cfg.ttrl_depth_cap);

  cfg.seed = kv.get_u64("seed", cfg.seed);
  cfg.use_variants = kv.get_bool("use_variants", cfg.use_variants);
  cfg.parallel = kv.get_bool("parallel", cfg.parallel);
  return cfg;
}

std::map<std::string, std::string> experiment_to_entries(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> out;
  auto put_num = [&](const std::string& key, double v) {
    std::ostringstream os;
    os << v;
    out[key] = os.str();
  };
  out["task.train_roots"] = std::to_string(cfg.task.train_roots);
  out["task.test_questions"] = std::to_string(cfg.task.test_questions);
  out["task.ttrl_questions"] = std::to_string(cfg.task.ttrl_questions);
  put_num("task.mix_primary_l3", cfg.task.mix_primary_l3);
  put_num("task.mix_primary_l4", cfg.task.mix_primary_l4);
  put_num("task.boost_l2", cfg.task.boost_l2);
  put_num("task.boost_l3", cfg.task.boost_l3);
  put_num("task.boost_l4", cfg.task.boost_l4);
  out["task.seed"] = std::to_string(cfg.task.seed);
  out["gen.variants_per_prompt"] = std::to_string(cfg.gen.variants_per_prompt);
  put_num("gen.temp_lo", cfg.gen.temp_lo);
  put_num("gen.temp_hi", cfg.gen.temp_hi);
  out["gen.depth_cap"] = std::to_string(cfg.gen.depth_cap);
  out["gen.easier_percent"] = std::to_string(cfg.gen.easier_percent);
  out["gen.target_n"] = std::to_string(cfg.gen.target_n);
  out["gen.fanout"] = std::to_string(cfg.gen.fanout);
  out["grpo.group_size"] = std::to_string(cfg.grpo.group_size);
  put_num("grpo.clip_epsilon", cfg.grpo.clip_epsilon);
  put_num("grpo.kl_coef", cfg.grpo.kl_coefficient);
  put_num("grpo.learning_rate", cfg.grpo.learning_rate);
  out["grpo.steps"] = std::to_string(cfg.grpo.steps);
  put_num("verify.domain_lo", cfg.verify.domain_lo);
  put_num("verify.domain_hi", cfg.verify.domain_hi);
  out["verify.points"] = std::to_string(cfg.verify.points);
  put_num("verify.interval_length", cfg.verify.interval_length);
  put_num("verify.rel_tol", cfg.verify.rel_tol);
  out["verify.deadline_ms"] = std::to_string(cfg.verify.attempt_deadline.count());
  out["verify.max_retries"] = std::to_string(cfg.verify.max_retries);
  out["verify.seed"] = std::to_string(cfg.verify.rng_seed);
  put_num("reward.w_accuracy", cfg.weights.accuracy);
  put_num("reward.w_format", cfg.weights.format);
  out["train.batch_groups"] = std::to_string(cfg.batch_groups);
  out["train.curve_every"] = std::to_string(cfg.curve_every);
  out["train.plateau_stop"] = cfg.plateau_stop ? "true" : "false";
  out["train.plateau_min_steps"] = std::to_string(cfg.plateau_min_steps);
  out["train.solve_budget_ms"] = std::to_string(cfg.solve_budget.count());
  out["ttrl.steps"] = std::to_string(cfg.ttrl_steps);
  out["ttrl.variants"] = std::to_string(cfg.ttrl_variants);
  out["ttrl.batch_groups"] = std::to_string(cfg.ttrl_batch_groups);
  out["ttrl.depth_cap"] = std::to_string(cfg.ttrl_depth_cap);
  out["seed"] = std::to_string(cfg.seed);
  out["use_variants"] = cfg.use_variants ? "true" : "false";
  out["parallel"] = cfg.parallel ? "true" : "false";
  return out;
}

BackendSelection backend_from_config(const KeyValueConfig& kv) {
  BackendSelection sel;
  sel.kind = kv.get_string("backend", "mock");
  if (sel.kind != "mock" && sel.kind != "http") {
    throw std::runtime_error("backend must be 'mock' or 'http'");
  }
  sel.noise_period = kv.get_int("backend.noise_period", sel.noise_period);
  sel.http.base_url = kv.get_string("backend.url", "");
  sel.http.model = kv.get_string("backend.model", "");
  sel.http.retry.request_timeout =
      std::chrono::milliseconds(kv.get_int("backend.timeout_ms", 60000));
  sel.http.retry.max_retries = kv.get_int("backend.max_retries", 3);
  sel.http.retry.initial_backoff =
      std::chrono::milliseconds(kv.get_int("backend.backoff_ms", 1000));
  return sel;
}

}  // namespace ladder
