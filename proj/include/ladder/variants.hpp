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

#ifndef LADDER_VARIANTS_HPP_
#define LADDER_VARIANTS_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ladder/backend.hpp"
#include "ladder/expr.hpp"
#include "ladder/numint.hpp"

namespace ladder {

// Recursive generation of progressively simpler problem variants:
// transformation sampling, batched prompting with temperature cycling and
// personas, depth-capped trees, duplicate accounting, and unsolvable-variant
// bookkeeping.

enum class DifficultyEffect { kEasier, kEquivalent, kHarder };

struct Transformation {
  std::string id;
  std::string description;
  DifficultyEffect effect = DifficultyEffect::kEasier;
  // Deterministic rewrite for mock generation; nullopt result = inapplicable.
  std::function<std::optional<Expr>(const Expr&)> rewrite;
};

// ~20 deterministic rewrites spanning the usual simplification moves
// (exponent reduction, term deletion, coefficient cleanup, unnesting,
// substitution toward easier kernels) plus equivalent-difficulty reshapes and
// a few hardening moves.
const std::vector<Transformation>& transformation_library();

// k distinct transformations drawn uniformly without replacement, with k
// itself uniform on {3, 4, 5}. Throws std::invalid_argument when the library
// holds fewer than k entries.
std::vector<Transformation> sample_transformations(
    const std::vector<Transformation>& library, std::mt19937_64& rng);

// Deterministic prompt: the problem in textual notation, the transformation
// suggestions, the persona directive, the difficulty-mix instruction, and the
// required numbered-list output shape.
std::string build_prompt(const Expr& problem,
                         const std::vector<Transformation>& transformations,
                         std::string_view persona, int count, int easier_count);

enum class IntendedDifficulty { kEasier, kEquivalent };
enum class Solvability { kUnknown, kSolvable, kUnsolvable };

struct VariantNode {
  int id = 0;
  int parent = -1;  // exactly one parent; -1 for the root
  int depth = 0;    // root = 0
  std::optional<Expr> expression;  // empty for unparseable (opaque) variants
  std::string opaque_text;         // the raw line when expression is empty
  IntendedDifficulty intended = IntendedDifficulty::kEasier;
  double temperature = 0.0;
  std::string persona;
  int batch = -1;
  Solvability solvability = Solvability::kUnknown;
};

struct TreeCounters {
  int requested = 0;
  int produced = 0;
  int rejected_duplicate = 0;
  int unsolvable = 0;
};

struct VariantTree {
  std::vector<VariantNode> nodes;  // nodes[0] is the root
  TreeCounters counters;

  const VariantNode& root() const { return nodes.front(); }
};

struct GenConfig {
  int variants_per_prompt = 10;
  double temp_lo = 0.8;
  double temp_hi = 1.4;
  std::vector<std::string> personas;  // defaults applied when empty
  int depth_cap = 3;
  int easier_percent = 70;  // remainder requested as equivalent difficulty
  int target_n = 100;       // variants per root
  int fanout = 10;          // children kept per expanded node
  std::uint64_t rng_seed = 0;
  bool parallel = false;  // batch generation across the frontier

  void validate() const;  // throws std::invalid_argument
};

const std::vector<std::string>& default_personas();

// Deterministic sawtooth over {temp_lo, temp_lo + 0.1, ..., temp_hi}; any
// window of 7 consecutive batches visits the whole default range.
double temperature_for_batch(const GenConfig& cfg, int batch_index);

struct BatchPlan {
  int parent = 0;
  int batch_index = 0;
  double temperature = 1.0;
  std::string persona;
  std::vector<Transformation> transformations;
};

struct BatchResult {
  std::vector<VariantNode> nodes;  // parent/depth/id unset; deduped in-batch
  int in_batch_duplicates = 0;
  std::optional<BackendError> error;
};

// One backend completion for the plan; lines parsed into candidate
// expressions, unparseable lines kept as opaque unsolvable nodes.
BatchResult generate_batch(const Expr& problem, const GenConfig& cfg,
                           Backend& backend, const BatchPlan& plan);

// Breadth-first recursive generation until target_n variants or frontier
// exhaustion. Under-target trees come back with counters explaining the
// shortfall; backend failures skip the affected batch and continue.
VariantTree build_tree(const Expr& root, const GenConfig& cfg, Backend& backend);

// Removes nodes whose canonical text matches a holdout entry (exact syntactic
// matching); returns the removal count.
int dedup_against(VariantTree& tree, const std::vector<Expr>& holdout);

using SolveFn = std::function<std::optional<Expr>(const Expr&, const Deadline&)>;

// Marks nodes the solver cannot crack within the budget. Such nodes stay in
// the tree but are excluded from training batches. Returns the number of
// unsolvable nodes.
int mark_unsolvable(VariantTree& tree, std::chrono::milliseconds budget,
                    const SolveFn& solver);

// Mock-backend responder that parses the build_prompt layout and applies the
// suggested rewrites (with deterministic fallbacks) to emit a numbered
// variant list. Every `noise_period`-th line is deliberately malformed to
// exercise the opaque-variant path; 0 disables noise.
MockBackend::Responder make_variant_responder(int noise_period = 0);

}  // namespace ladder

#endif  // LADDER_VARIANTS_HPP_
