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

#include "ladder/variants.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ladder/parallel.hpp"

namespace ladder {

namespace {

// Rebuilds the tree bottom-up, replacing nodes where fn fires.
Expr map_nodes(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& fn,
               bool& changed) {
  Expr rebuilt = e;
  if (!e.children().empty()) {
    std::vector<Expr> kids;
    kids.reserve(e.children().size());
    bool kid_changed = false;
    for (const auto& c : e.children()) kids.push_back(map_nodes(c, fn, kid_changed));
    if (kid_changed) {
      changed = true;
      switch (e.kind()) {
        case ExprKind::kSum: rebuilt = Expr::sum(std::move(kids)); break;
        case ExprKind::kProduct: rebuilt = Expr::product(std::move(kids)); break;
        case ExprKind::kPower: rebuilt = Expr::pow(kids[0], kids[1]); break;
        case ExprKind::kQuotient: rebuilt = Expr::quotient(kids[0], kids[1]); break;
        case ExprKind::kNegate: rebuilt = Expr::negate(kids[0]); break;
        case ExprKind::kCall: rebuilt = Expr::call(e.func(), kids[0]); break;
        default: break;
      }
    }
  }
  if (auto replacement = fn(rebuilt)) {
    changed = true;
    return *replacement;
  }
  return rebuilt;
}

std::optional<Expr> apply_node_rule(const Expr& e,
                                    const std::function<std::optional<Expr>(const Expr&)>& fn) {
  bool changed = false;
  Expr out = map_nodes(e, fn, changed);
  if (!changed) return std::nullopt;
  return out;
}

Expr substitute_x(const Expr& e, const Expr& replacement) {
  switch (e.kind()) {
    case ExprKind::kVariable:
      return replacement;
    case ExprKind::kConstant:
      return e;
    default: {
      std::vector<Expr> kids;
      kids.reserve(e.children().size());
      for (const auto& c : e.children()) kids.push_back(substitute_x(c, replacement));
      switch (e.kind()) {
        case ExprKind::kSum: return Expr::sum(std::move(kids));
        case ExprKind::kProduct: return Expr::product(std::move(kids));
        case ExprKind::kPower: return Expr::pow(kids[0], kids[1]);
        case ExprKind::kQuotient: return Expr::quotient(kids[0], kids[1]);
        case ExprKind::kNegate: return Expr::negate(kids[0]);
        case ExprKind::kCall: return Expr::call(e.func(), kids[0]);
        default: return e;
      }
    }
  }
}

bool contains_x(const Expr& e) {
  if (e.kind() == ExprKind::kVariable) return true;
  for (const auto& c : e.children()) {
    if (contains_x(c)) return true;
  }
  return false;
}

std::optional<int> const_int_exponent(const Expr& power) {
  if (power.kind() != ExprKind::kPower) return std::nullopt;
  const Expr& exp = power.child(1);
  if (exp.kind() != ExprKind::kConstant) return std::nullopt;
  const double v = exp.constant_value();
  if (v != std::floor(v) || std::fabs(v) > 64.0) return std::nullopt;
  return static_cast<int>(v);
}

Expr drop_sum_child(const Expr& sum, std::size_t index) {
  std::vector<Expr> kids = sum.children();
  kids.erase(kids.begin() + static_cast<std::ptrdiff_t>(index));
  if (kids.size() == 1) return kids[0];
  return Expr::sum(std::move(kids));
}

// -- the individual rewrites ------------------------------------------------

std::optional<Expr> rw_drop_term(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != ExprKind::kSum) return std::nullopt;
    const auto& kids = n.children();
    if (kids.size() >= 3) return drop_sum_child(n, kids.size() / 2);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (kids[i].kind() == ExprKind::kConstant) return drop_sum_child(n, i);
    }
    return drop_sum_child(n, kids.size() - 1);
  });
}

std::optional<Expr> rw_halve_exponents(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    auto p = const_int_exponent(n);
    if (!p || *p < 2 || *p % 2 != 0) return std::nullopt;
    const int halved = *p / 2;
    if (halved == 1) return n.child(0);
    return Expr::pow(n.child(0), Expr::constant(halved));
  });
}

std::optional<Expr> rw_reduce_exponent(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    auto p = const_int_exponent(n);
    if (!p || *p < 2) return std::nullopt;
    if (*p == 2) return n.child(0);
    return Expr::pow(n.child(0), Expr::constant(*p - 1));
  });
}

std::optional<Expr> rw_numerator_to_one(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != ExprKind::kQuotient) return std::nullopt;
    if (n.child(0).is_constant(1.0)) return std::nullopt;
    return Expr::quotient(Expr::constant(1.0), n.child(1));
  });
}

std::optional<Expr> rw_drop_denominator_constant(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != ExprKind::kQuotient) return std::nullopt;
    const Expr& den = n.child(1);
    if (den.kind() != ExprKind::kSum) return std::nullopt;
    for (std::size_t i = 0; i < den.children().size(); ++i) {
      if (den.child(i).kind() == ExprKind::kConstant) {
        return Expr::quotient(n.child(0), drop_sum_child(den, i));
      }
    }
    return std::nullopt;
  });
}

std::optional<Expr> rw_denominator_constant_to_one(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != ExprKind::kQuotient) return std::nullopt;
    const Expr& den = n.child(1);
    if (den.kind() != ExprKind::kSum) return std::nullopt;
    std::vector<Expr> kids = den.children();
    bool changed = false;
    for (auto& k : kids) {
      if (k.kind() == ExprKind::kConstant && !k.is_constant(1.0)) {
        k = Expr::constant(1.0);
        changed = true;
      }
    }
    if (!changed) return std::nullopt;
    return Expr::quotient(n.child(0), Expr::sum(std::move(kids)));
  });
}

std::optional<Expr> rw_shrink_denominator_constant(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != ExprKind::kQuotient) return std::nullopt;
    const Expr& den = n.child(1);
    if (den.kind() != ExprKind::kSum) return std::nullopt;
    std::vector<Expr> kids = den.children();
    bool changed = false;
    for (auto& k : kids) {
      if (k.kind() == ExprKind::kConstant && std::fabs(k.constant_value()) > 0.5) {
        k = Expr::constant(k.constant_value() / 2.0);
        changed = true;
      }
    }
    if (!changed) return std::nullopt;
    return Expr::quotient(n.child(0), Expr::sum(std::move(kids)));
  });
}

std::optional<Expr> rw_coefficients_to_one(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    if (n.kind() == ExprKind::kProduct) {
      std::vector<Expr> kept;
      for (const auto& c : n.children()) {
        if (c.kind() != ExprKind::kConstant) kept.push_back(c);
      }
      if (kept.size() == n.children().size()) return std::nullopt;
      if (kept.empty()) return Expr::constant(1.0);
      if (kept.size() == 1) return kept[0];
      return Expr::product(std::move(kept));
    }
    if (n.kind() == ExprKind::kQuotient && n.child(0).kind() == ExprKind::kConstant &&
        !n.child(0).is_constant(1.0)) {
      return Expr::quotient(Expr::constant(1.0), n.child(1));
    }
    return std::nullopt;
  });
}

std::optional<Expr> rw_round_coefficients(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != ExprKind::kConstant) return std::nullopt;
    const double v = n.constant_value();
    if (v == std::floor(v)) return std::nullopt;
    double rounded = std::round(v);
    if (rounded == 0.0) rounded = v > 0.0 ? 1.0 : -1.0;
    return Expr::constant(rounded);
  });
}

std::optional<Expr> rw_trig_to_poly(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != ExprKind::kCall) return std::nullopt;
    if (n.func() != Func::kSin && n.func() != Func::kCos && n.func() != Func::kTan) {
      return std::nullopt;
    }
    return n.child(0);
  });
}

std::optional<Expr> rw_exp_to_poly(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != ExprKind::kCall || n.func() != Func::kExp) return std::nullopt;
    return n.child(0);
  });
}

std::optional<Expr> rw_unnest_argument(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != ExprKind::kCall) return std::nullopt;
    if (n.child(0).kind() == ExprKind::kVariable) return std::nullopt;
    if (!contains_x(n.child(0))) return std::nullopt;
    return Expr::call(n.func(), Expr::x());
  });
}

std::optional<Expr> rw_sqrt_to_identity(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != ExprKind::kCall || n.func() != Func::kSqrt) return std::nullopt;
    return n.child(0);
  });
}

std::optional<Expr> rw_drop_factor(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != ExprKind::kProduct) return std::nullopt;
    int non_const = 0;
    for (const auto& c : n.children()) {
      if (c.kind() != ExprKind::kConstant) ++non_const;
    }
    if (non_const < 2) return std::nullopt;
    std::vector<Expr> kids = n.children();
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      if (it->kind() != ExprKind::kConstant) {
        kids.erase(std::next(it).base());
        break;
      }
    }
    if (kids.size() == 1) return kids[0];
    return Expr::product(std::move(kids));
  });
}

std::optional<Expr> rw_scale_by_two(const Expr& e) {
  return Expr::product({Expr::constant(2.0), e});
}

std::optional<Expr> rw_mirror_argument(const Expr& e) {
  if (!contains_x(e)) return std::nullopt;
  return substitute_x(e, Expr::negate(Expr::x()));
}

std::optional<Expr> rw_shift_argument(const Expr& e) {
  if (!contains_x(e)) return std::nullopt;
  return substitute_x(e, Expr::sum({Expr::x(), Expr::constant(1.0)}));
}

std::optional<Expr> rw_swap_sin_cos(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != ExprKind::kCall) return std::nullopt;
    if (n.func() == Func::kSin) return Expr::call(Func::kCos, n.child(0));
    if (n.func() == Func::kCos) return Expr::call(Func::kSin, n.child(0));
    return std::nullopt;
  });
}

std::optional<Expr> rw_negate(const Expr& e) {
  if (e.kind() == ExprKind::kNegate) return e.child(0);
  return Expr::negate(e);
}

std::optional<Expr> rw_raise_exponent(const Expr& e) {
  return apply_node_rule(e, [](const Expr& n) -> std::optional<Expr> {
    auto p = const_int_exponent(n);
    if (!p || *p < 1 || *p > 11) return std::nullopt;
    return Expr::pow(n.child(0), Expr::constant(*p + 1));
  });
}

std::optional<Expr> rw_nest_sine(const Expr& e) {
  if (!contains_x(e)) return std::nullopt;
  return substitute_x(e, Expr::call(Func::kSin, Expr::x()));
}

std::optional<Expr> rw_add_trig_term(const Expr& e) {
  return Expr::sum({e, Expr::call(Func::kSin, Expr::x())});
}

}  // namespace

const std::vector<Transformation>& transformation_library() {
  static const std::vector<Transformation> kLibrary = {
      {"drop-term", "delete one additive term from a sum", DifficultyEffect::kEasier,
       rw_drop_term},
      {"halve-exponents", "halve even exponents", DifficultyEffect::kEasier,
       rw_halve_exponents},
      {"reduce-exponent", "lower an exponent by one", DifficultyEffect::kEasier,
       rw_reduce_exponent},
      {"numerator-to-one", "replace a numerator with 1", DifficultyEffect::kEasier,
       rw_numerator_to_one},
      {"drop-denominator-constant", "remove the constant term of a denominator",
       DifficultyEffect::kEasier, rw_drop_denominator_constant},
      {"denominator-constant-to-one", "set a denominator's constant term to 1",
       DifficultyEffect::kEasier, rw_denominator_constant_to_one},
      {"shrink-denominator-constant", "halve a denominator's constant term",
       DifficultyEffect::kEasier, rw_shrink_denominator_constant},
      {"coefficients-to-one", "strip multiplicative coefficients", DifficultyEffect::kEasier,
       rw_coefficients_to_one},
      {"round-coefficients", "round coefficients to integers", DifficultyEffect::kEasier,
       rw_round_coefficients},
      {"trig-to-poly", "replace a trigonometric kernel with its argument",
       DifficultyEffect::kEasier, rw_trig_to_poly},
      {"exp-to-poly", "replace an exponential kernel with its argument",
       DifficultyEffect::kEasier, rw_exp_to_poly},
      {"unnest-argument", "reduce a nested function argument to x",
       DifficultyEffect::kEasier, rw_unnest_argument},
      {"sqrt-to-identity", "remove a square root", DifficultyEffect::kEasier,
       rw_sqrt_to_identity},
      {"drop-factor", "delete one multiplicative factor", DifficultyEffect::kEasier,
       rw_drop_factor},
      {"scale-by-two", "scale the integrand by 2", DifficultyEffect::kEquivalent,
       rw_scale_by_two},
      {"mirror-argument", "substitute x -> -x", DifficultyEffect::kEquivalent,
       rw_mirror_argument},
      {"shift-argument", "substitute x -> x + 1", DifficultyEffect::kEquivalent,
       rw_shift_argument},
      {"swap-sin-cos", "exchange sine and cosine", DifficultyEffect::kEquivalent,
       rw_swap_sin_cos},
      {"negate", "negate the integrand", DifficultyEffect::kEquivalent, rw_negate},
      {"raise-exponent", "raise an exponent by one", DifficultyEffect::kHarder,
       rw_raise_exponent},
      {"nest-sine", "substitute x -> sin(x)", DifficultyEffect::kHarder, rw_nest_sine},
      {"add-trig-term", "add a trigonometric term", DifficultyEffect::kHarder,
       rw_add_trig_term},
  };
  return kLibrary;
}

std::vector<Transformation> sample_transformations(
    const std::vector<Transformation>& library, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> k_dist(3, 5);
  const int k = k_dist(rng);
  if (static_cast<int>(library.size()) < k) {
    throw std::invalid_argument("sample_transformations: library smaller than k");
  }
  // partial Fisher-Yates over an index vector: uniform without replacement
  std::vector<std::size_t> idx(library.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<Transformation> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i),
                                                    idx.size() - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[pick(rng)]);
    out.push_back(library[idx[static_cast<std::size_t>(i)]]);
  }
  return out;
}

const std::vector<std::string>& default_personas() {
  static const std::vector<std::string> kPersonas = {
      "think like Euler focusing on series",
      "approach like Gauss looking for patterns",
      "reason like a cautious numerical analyst",
      "favor substitutions a first-year student would try",
      "prefer symmetric and even-odd structure",
      "lean on known derivative tables",
      "decompose into partial fractions where possible",
      "look for telescoping or cancellation structure",
  };
  return kPersonas;
}

std::string build_prompt(const Expr& problem,
                         const std::vector<Transformation>& transformations,
                         std::string_view persona, int count, int easier_count) {
  std::ostringstream os;
  os << "Persona: " << persona << "\n";
  os << "Propose practice variants of the following integration problem.\n\n";
  os << "Problem: integrate " << to_text(problem) << " with respect to x\n";
  if (!transformations.empty()) {
    os << "\nSuggested transformations:\n";
    for (const auto& t : transformations) {
      os << "- " << t.id << ": " << t.description << "\n";
    }
  }
  os << "\nProduce exactly " << count << " variant integrands: " << easier_count
     << " easier and " << (count - easier_count) << " equivalent in difficulty.\n";
  os << "Write each variant in sympy-style algebraic notation over x, with no "
        "integral signs and no integration constants.\n";
  os << "Reply with a numbered list only, one variant per line, formatted as "
        "\"1. <integrand>\".\n";
  return os.str();
}

void GenConfig::validate() const {
  if (variants_per_prompt < 1) {
    throw std::invalid_argument("GenConfig: variants_per_prompt must be >= 1");
  }
  if (!(temp_lo > 0.0 && temp_lo <= temp_hi && temp_hi <= 2.0)) {
    throw std::invalid_argument("GenConfig: temperature range must sit inside (0, 2]");
  }
  if (easier_percent < 0 || easier_percent > 100) {
    throw std::invalid_argument("GenConfig: easier_percent must be a percentage");
  }
  if (depth_cap < 1) throw std::invalid_argument("GenConfig: depth_cap must be >= 1");
  if (fanout < 1) throw std::invalid_argument("GenConfig: fanout must be >= 1");
  if (target_n < 0) throw std::invalid_argument("GenConfig: target_n must be >= 0");
}

double temperature_for_batch(const GenConfig& cfg, int batch_index) {
  const long lo = std::lround(cfg.temp_lo * 10.0);
  const long hi = std::lround(cfg.temp_hi * 10.0);
  const long span = hi - lo + 1;
  return static_cast<double>(lo + (batch_index % span)) / 10.0;
}

namespace {
int easier_count_for(const GenConfig& cfg) {
  return static_cast<int>(
      std::lround(cfg.variants_per_prompt * cfg.easier_percent / 100.0));
}
}  // namespace

// ---------------------------------------------------------------------------
// Mock responder

namespace {

struct PromptView {
  std::optional<Expr> problem;
  std::vector<std::string> transformation_ids;
  int count = 0;
  int easier = 0;
};

PromptView parse_prompt(const std::string& prompt) {
  PromptView v;
  std::istringstream is(prompt);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("Problem: integrate ", 0) == 0) {
      constexpr std::string_view kSuffix = " with respect to x";
      std::string body = line.substr(std::string("Problem: integrate ").size());
      if (body.size() > kSuffix.size() &&
          body.compare(body.size() - kSuffix.size(), kSuffix.size(), kSuffix) == 0) {
        body.resize(body.size() - kSuffix.size());
      }
      ParseResult r = parse(body);
      if (parse_ok(r)) v.problem = std::get<Expr>(r);
    } else if (line.rfind("- ", 0) == 0) {
      const std::size_t colon = line.find(':');
      if (colon != std::string::npos) {
        v.transformation_ids.push_back(line.substr(2, colon - 2));
      }
    } else if (line.rfind("Produce exactly ", 0) == 0) {
      std::sscanf(line.c_str(), "Produce exactly %d variant integrands: %d easier",
                  &v.count, &v.easier);
    }
  }
  return v;
}

const Transformation* find_transformation(const std::string& id) {
  for (const auto& t : transformation_library()) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

// Suggested rewrites of the requested effect first, then the rest of the
// library's: suggestions steer, they do not limit.
std::vector<const Transformation*> pool_for(DifficultyEffect effect,
                                            const std::vector<const Transformation*>& suggested) {
  std::vector<const Transformation*> pool;
  for (const auto* t : suggested) {
    if (t->effect == effect) pool.push_back(t);
  }
  for (const auto& t : transformation_library()) {
    if (t.effect != effect) continue;
    bool already = false;
    for (const auto* s : pool) already = already || s == &t;
    if (!already) pool.push_back(&t);
  }
  return pool;
}

}  // namespace

MockBackend::Responder make_variant_responder(int noise_period) {
  return [noise_period](const GenerationRequest& request,
                        std::uint64_t derived_seed) -> std::string {
    const PromptView view = parse_prompt(request.prompt);
    if (!view.problem || view.count <= 0) {
      return "1. x\n";  // not a variant prompt; degenerate but well-formed
    }
    const Expr& problem = *view.problem;
    std::mt19937_64 rng(derived_seed);

    std::vector<const Transformation*> suggested;
    for (const auto& id : view.transformation_ids) {
      if (const Transformation* t = find_transformation(id)) suggested.push_back(t);
    }
    const auto easier_pool = pool_for(DifficultyEffect::kEasier, suggested);
    const auto equivalent_pool = pool_for(DifficultyEffect::kEquivalent, suggested);

    std::set<std::string> emitted;
    emitted.insert(canonical_text(problem));

    std::ostringstream os;
    for (int slot = 0; slot < view.count; ++slot) {
      const std::uint64_t draw = rng();
      if (noise_period > 0 && draw % static_cast<std::uint64_t>(noise_period) == 0) {
        os << (slot + 1) << ". x + \n";  // malformed on purpose
        continue;
      }
      const bool easier = slot < view.easier;
      const auto& pool = easier ? easier_pool : equivalent_pool;
      std::optional<Expr> variant;

      // first pass: each suggested rewrite individually, rotated per slot
      for (std::size_t i = 0; i < pool.size() && !variant; ++i) {
        const auto& t = *pool[(static_cast<std::size_t>(slot) + i) % pool.size()];
        if (auto rewritten = t.rewrite(problem)) {
          const std::string canon = canonical_text(*rewritten);
          if (!emitted.count(canon)) variant = rewritten;
        }
      }
      // second pass: pairwise compositions
      const std::size_t offset = static_cast<std::size_t>(draw % 7);
      for (std::size_t i = 0; i < pool.size() && !variant; ++i) {
        for (std::size_t j = 0; j < pool.size() && !variant; ++j) {
          const auto& first = *pool[(i + offset) % pool.size()];
          const auto& second = *pool[j % pool.size()];
          auto once = first.rewrite(problem);
          if (!once) continue;
          auto twice = second.rewrite(*once);
          const Expr candidate = twice ? *twice : *once;
          const std::string canon = canonical_text(candidate);
          if (!emitted.count(canon)) variant = candidate;
        }
      }
      if (!variant) {
        // keep the slot filled: a coefficient rescale whose multiplier varies
        // with the batch stays distinct across retries of the same problem
        const double k = 2.0 + static_cast<double>((draw >> 8) % 97);
        variant = Expr::product({Expr::constant(k), problem});
      }
      emitted.insert(canonical_text(*variant));
      os << (slot + 1) << ". " << to_text(*variant) << "\n";
    }
    return os.str();
  };
}

// ---------------------------------------------------------------------------
// Batch generation and tree building

BatchResult generate_batch(const Expr& problem, const GenConfig& cfg, Backend& backend,
                           const BatchPlan& plan) {
  cfg.validate();
  BatchResult result;
  const int easier_count = easier_count_for(cfg);
  GenerationRequest request;
  request.prompt = build_prompt(problem, plan.transformations, plan.persona,
                                cfg.variants_per_prompt, easier_count);
  request.temperature = plan.temperature;

  CompletionResult completion = backend.complete(request);
  if (!completion_ok(completion)) {
    result.error = std::get<BackendError>(completion);
    return result;
  }

  std::set<std::string> seen;
  std::istringstream is(std::get<GenerationResponse>(completion).text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line) &&
         static_cast<int>(result.nodes.size()) + result.in_batch_duplicates <
             cfg.variants_per_prompt) {
    // accept "k. body" / "k) body"
    std::size_t pos = 0;
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    std::size_t digits = pos;
    while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) {
      ++digits;
    }
    if (digits == pos || digits >= line.size() ||
        (line[digits] != '.' && line[digits] != ')')) {
      continue;  // not a list line
    }
    std::string body = line.substr(digits + 1);
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) {
      body.erase(body.begin());
    }
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) {
      body.pop_back();
    }
    ++line_no;

    VariantNode node;
    node.intended = line_no <= easier_count ? IntendedDifficulty::kEasier
                                            : IntendedDifficulty::kEquivalent;
    node.temperature = plan.temperature;
    node.persona = plan.persona;
    node.batch = plan.batch_index;

    ParseResult parsed = parse(body);
    if (parse_ok(parsed)) {
      const Expr expr = std::get<Expr>(parsed);
      const std::string canon = canonical_text(expr);
      if (seen.count(canon)) {
        ++result.in_batch_duplicates;
        continue;
      }
      seen.insert(canon);
      node.expression = expr;
    } else {
      node.opaque_text = body;
      node.solvability = Solvability::kUnsolvable;
    }
    result.nodes.push_back(std::move(node));
  }
  return result;
}

VariantTree build_tree(const Expr& root, const GenConfig& cfg, Backend& backend) {
  cfg.validate();
  GenConfig effective = cfg;
  if (effective.personas.empty()) effective.personas = default_personas();

  VariantTree tree;
  tree.counters.requested = effective.target_n;
  VariantNode root_node;
  root_node.id = 0;
  root_node.parent = -1;
  root_node.depth = 0;
  root_node.expression = root;
  tree.nodes.push_back(std::move(root_node));

  std::set<std::string> canon{canonical_text(root)};
  std::mt19937_64 rng(effective.rng_seed);
  std::vector<int> frontier{0};
  int batch_counter = 0;
  int produced = 0;

  while (produced < effective.target_n && !frontier.empty()) {
    // plan this level's batches serially so ids, temperatures and personas
    // are deterministic regardless of execution order
    std::vector<BatchPlan> plans;
    const int batches_per_node =
        (effective.fanout + effective.variants_per_prompt - 1) / effective.variants_per_prompt;
    const int still_needed = effective.target_n - produced;
    const int max_plans =
        (still_needed + effective.variants_per_prompt - 1) / effective.variants_per_prompt;
    for (int parent : frontier) {
      if (tree.nodes[static_cast<std::size_t>(parent)].depth >= effective.depth_cap) continue;
      if (!tree.nodes[static_cast<std::size_t>(parent)].expression) continue;
      for (int b = 0; b < batches_per_node; ++b) {
        BatchPlan plan;
        plan.parent = parent;
        plan.batch_index = batch_counter++;
        plan.temperature = temperature_for_batch(effective, plan.batch_index);
        plan.persona = effective.personas[static_cast<std::size_t>(plan.batch_index) %
                                          effective.personas.size()];
        plan.transformations = sample_transformations(transformation_library(), rng);
        plans.push_back(std::move(plan));
        if (static_cast<int>(plans.size()) >= max_plans) break;
      }
      if (static_cast<int>(plans.size()) >= max_plans) break;
    }
    if (plans.empty()) break;

    // batches for distinct frontier nodes may run concurrently; results are
    // collected in plan order, so the tree is identical either way
    std::vector<BatchResult> results(plans.size());
    parallel_for(plans.size(), effective.parallel, [&](std::size_t i) {
      const Expr& problem =
          *tree.nodes[static_cast<std::size_t>(plans[i].parent)].expression;
      results[i] = generate_batch(problem, effective, backend, plans[i]);
    });

    std::vector<int> next_frontier;
    std::vector<int> accepted_per_parent(tree.nodes.size() + plans.size() * 16, 0);
    for (std::size_t pi = 0; pi < plans.size() && produced < effective.target_n; ++pi) {
      const BatchPlan& plan = plans[pi];
      BatchResult& batch = results[pi];
      if (batch.error) continue;  // the build continues with other batches
      tree.counters.rejected_duplicate += batch.in_batch_duplicates;
      for (VariantNode& node : batch.nodes) {
        if (produced >= effective.target_n) break;
        if (accepted_per_parent[static_cast<std::size_t>(plan.parent)] >= effective.fanout) {
          break;
        }
        if (node.expression) {
          const std::string c = canonical_text(*node.expression);
          if (canon.count(c)) {
            ++tree.counters.rejected_duplicate;
            continue;
          }
          canon.insert(c);
        }
        node.id = static_cast<int>(tree.nodes.size());
        node.parent = plan.parent;
        node.depth = tree.nodes[static_cast<std::size_t>(plan.parent)].depth + 1;
        ++accepted_per_parent[static_cast<std::size_t>(plan.parent)];
        ++produced;
        if (node.expression && node.depth < effective.depth_cap) {
          next_frontier.push_back(node.id);
        }
        tree.nodes.push_back(std::move(node));
      }
    }
    frontier = std::move(next_frontier);
  }
  tree.counters.produced = produced;
  return tree;
}

int dedup_against(VariantTree& tree, const std::vector<Expr>& holdout) {
  std::set<std::string> banned;
  for (const auto& h : holdout) banned.insert(canonical_text(h));
  if (banned.empty() || tree.nodes.size() <= 1) return 0;

  std::vector<bool> remove(tree.nodes.size(), false);
  int matches = 0;
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    const auto& node = tree.nodes[i];
    if (node.expression && banned.count(canonical_text(*node.expression))) {
      remove[i] = true;
      ++matches;
    }
  }
  if (matches == 0) return 0;
  // children are always created after their parents, so one forward pass
  // removes the full contaminated subtree
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].parent >= 0 && remove[static_cast<std::size_t>(tree.nodes[i].parent)]) {
      remove[i] = true;
    }
  }
  std::vector<int> remap(tree.nodes.size(), -1);
  std::vector<VariantNode> kept;
  kept.reserve(tree.nodes.size());
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (remove[i]) continue;
    remap[i] = static_cast<int>(kept.size());
    VariantNode node = tree.nodes[i];
    node.id = remap[i];
    if (node.parent >= 0) node.parent = remap[static_cast<std::size_t>(node.parent)];
    kept.push_back(std::move(node));
  }
  tree.nodes = std::move(kept);
  return matches;
}

int mark_unsolvable(VariantTree& tree, std::chrono::milliseconds budget,
                    const SolveFn& solver) {
  int unsolvable = 0;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    VariantNode& node = tree.nodes[i];
    if (!node.expression) {
      node.solvability = Solvability::kUnsolvable;
    } else {
      const Deadline deadline = Deadline::after(budget);
      node.solvability = solver(*node.expression, deadline).has_value()
                             ? Solvability::kSolvable
                             : Solvability::kUnsolvable;
    }
    if (i > 0 && node.solvability == Solvability::kUnsolvable) ++unsolvable;
  }
  tree.counters.unsolvable = unsolvable;
  return unsolvable;
}

}  // namespace ladder
