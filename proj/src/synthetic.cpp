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

#include "ladder/synthetic.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ladder {

namespace {

// Deterministic per-family parameter streams. Table periods are coprime so
// distinct instance ids give distinct integrands.
UnitMatch instance_unit(Family family, int instance) {
  static const double cs[7] = {2.0, 1.5, 3.0, 2.5, 1.0, 0.5, 1.25};
  UnitMatch u;
  u.family = family;
  u.c = cs[instance % 7];
  switch (family) {
    case kFamPower:
      u.n = 3 + instance % 4;  // x^3 .. x^6
      break;
    case kFamRecipQuad: {
      static const double as[5] = {4.0, 2.25, 9.0, 1.0, 6.25};
      u.a = as[instance % 5];
      break;
    }
    case kFamExponential: {
      static const double as[5] = {0.8, -0.6, 1.2, 0.5, -1.0};
      u.a = as[instance % 5];
      break;
    }
    case kFamSine:
    case kFamCosine: {
      static const double as[5] = {2.0, 1.0, 3.0, 1.5, 0.5};
      u.a = as[instance % 5];
      break;
    }
    case kFamInversePower:
      u.n = 2 + instance % 2;  // 1/x^2, 1/x^3
      break;
    default:
      break;
  }
  return u;
}

std::string completion_for(const Expr& answer) {
  return "The antiderivative is <ANSWER>" + to_text(answer) + "</ANSWER>";
}

}  // namespace

SyntheticTask::SyntheticTask(const SyntheticSpec& spec) : spec_(spec) {
  bank_.feature_dim = kFeatureDim;

  // Disjoint instance streams keep train roots, test questions and TTRL
  // targets pairwise distinct; verified below.
  auto make_question = [&](const std::string& id, Family family, int instance, int level) {
    IntegrandMatch match;
    match.units = {instance_unit(family, instance)};
    Question q;
    q.id = id;
    q.integrand = unit_integrand(match.units.front());
    q.family = family;
    q.level = level;
    q.problem = make_problem(match, q.integrand, level);
    return q;
  };

  for (int i = 0; i < spec_.train_roots; ++i) {
    train_roots_.push_back(make_question("train-" + std::to_string(i),
                                         static_cast<Family>(i % kFamilyCount), i, 3));
  }
  for (int i = 0; i < spec_.test_questions; ++i) {
    test_questions_.push_back(make_question("test-" + std::to_string(i),
                                            static_cast<Family>(i % kFamilyCount),
                                            51 + i, 3));
  }
  for (int i = 0; i < spec_.ttrl_questions; ++i) {
    ttrl_targets_.push_back(make_question("ttrl-" + std::to_string(i),
                                          static_cast<Family>((2 * i + 1) % kFamilyCount),
                                          221 + i, 4));
  }

  std::set<int> distinct;
  for (const auto* qs : {&train_roots_, &test_questions_, &ttrl_targets_}) {
    for (const auto& q : *qs) distinct.insert(q.problem);
  }
  if (distinct.size() != train_roots_.size() + test_questions_.size() + ttrl_targets_.size()) {
    throw std::logic_error("SyntheticTask: question integrands collide");
  }
}

std::vector<double> SyntheticTask::phi(Family family, int level,
                                       std::uint64_t mix_salt) const {
  std::vector<double> out(static_cast<std::size_t>(kPhiDim), 0.0);
  const int f = static_cast<int>(family);
  if (level <= 2) {
    out[static_cast<std::size_t>(f)] = 1.0;
  } else {
    // questions differ a little in how much the true family shows through,
    // so the held-out set crosses the solvability threshold gradually
    double primary = level == 3 ? spec_.mix_primary_l3 : spec_.mix_primary_l4;
    if (level == 3) primary += 0.05 * (static_cast<double>(mix_salt % 3) - 1.0);
    const double rest = 0.5 * (1.0 - primary);
    out[static_cast<std::size_t>(f)] = primary;
    out[static_cast<std::size_t>((f + 1) % kFamilyCount)] = rest;
    out[static_cast<std::size_t>((f + 2) % kFamilyCount)] = rest;
  }
  if (level >= 2) out[kFamilyCount + 0] = 1.0;
  if (level >= 3) out[kFamilyCount + 1] = 1.0;
  if (level >= 4) out[kFamilyCount + 2] = 1.0;
  return out;
}

PolicyParams SyntheticTask::base_params() const {
  PolicyParams p;
  p.theta.assign(static_cast<std::size_t>(kFeatureDim), 0.0);
  const int corrupt_col = kPsiDim - 1;
  p.theta[static_cast<std::size_t>((kFamilyCount + 0) * kPsiDim + corrupt_col)] = spec_.boost_l2;
  p.theta[static_cast<std::size_t>((kFamilyCount + 1) * kPsiDim + corrupt_col)] = spec_.boost_l3;
  p.theta[static_cast<std::size_t>((kFamilyCount + 2) * kPsiDim + corrupt_col)] = spec_.boost_l4;
  return p;
}

int SyntheticTask::make_problem(const IntegrandMatch& match, const Expr& integrand,
                                int level) {
  const std::string canon = canonical_text(integrand);
  if (auto it = by_canonical_.find(canon); it != by_canonical_.end()) return it->second;

  const Family primary = match.primary();
  std::uint64_t salt = 1469598103934665603ULL;
  for (unsigned char ch : canon) {
    salt ^= ch;
    salt *= 1099511628211ULL;
  }
  const std::vector<double> phi_q = phi(primary, level, salt);

  CandidateSet set;
  std::vector<std::string> plain;
  auto push = [&](Family answer_family, const Expr& answer, bool corrupt) {
    std::vector<double> psi(static_cast<std::size_t>(kPsiDim), 0.0);
    psi[static_cast<std::size_t>(answer_family)] = 1.0;
    if (corrupt) psi[static_cast<std::size_t>(kPsiDim - 1)] = 1.0;
    std::vector<double> x(static_cast<std::size_t>(kFeatureDim), 0.0);
    for (int i = 0; i < kPhiDim; ++i) {
      for (int j = 0; j < kPsiDim; ++j) {
        x[static_cast<std::size_t>(i * kPsiDim + j)] =
            phi_q[static_cast<std::size_t>(i)] * psi[static_cast<std::size_t>(j)];
      }
    }
    set.answers.push_back(completion_for(answer));
    set.features.push_back(std::move(x));
    plain.push_back(to_text(answer));
  };

  const Expr exact = antiderivative(match);
  std::vector<Expr> family_exact(static_cast<std::size_t>(kFamilyCount));
  for (int g = 0; g < kFamilyCount; ++g) {
    if (g == static_cast<int>(primary)) {
      family_exact[static_cast<std::size_t>(g)] = exact;
    } else {
      // another family's template answer at a comparable scale
      UnitMatch rep;
      rep.family = static_cast<Family>(g);
      rep.c = match.units.front().c;
      rep.a = 1.0;
      rep.n = 2;
      family_exact[static_cast<std::size_t>(g)] = unit_antiderivative(rep);
    }
  }

  // slot 0 is always the exact antiderivative
  push(primary, exact, false);
  if (level <= 0) {
    push(primary, Expr::product({Expr::constant(spec_.corrupt_multipliers[0]), exact}), true);
  } else if (level == 1) {
    for (int g = 0; g < kFamilyCount; ++g) {
      if (g != static_cast<int>(primary)) {
        push(static_cast<Family>(g), family_exact[static_cast<std::size_t>(g)], false);
      }
    }
    push(primary, Expr::product({Expr::constant(spec_.corrupt_multipliers[0]), exact}), true);
    push(primary, Expr::product({Expr::constant(spec_.corrupt_multipliers[1]), exact}), true);
  } else {
    for (int g = 0; g < kFamilyCount; ++g) {
      if (g != static_cast<int>(primary)) {
        push(static_cast<Family>(g), family_exact[static_cast<std::size_t>(g)], false);
      }
    }
    for (int g = 0; g < kFamilyCount; ++g) {
      for (double m : spec_.corrupt_multipliers) {
        push(static_cast<Family>(g),
             Expr::product({Expr::constant(m), family_exact[static_cast<std::size_t>(g)]}),
             true);
      }
    }
  }

  const int index = bank_.add(std::move(set));
  integrands_.push_back(integrand);
  levels_.push_back(level);
  answers_.push_back(std::move(plain));
  by_canonical_[canon] = index;
  return index;
}

int SyntheticTask::register_variant(const Expr& integrand, int depth,
                                    IntendedDifficulty intended, int root_level) {
  auto match = recognize_integrand(integrand);
  if (!match) return -1;
  int level = root_level - depth;
  if (intended == IntendedDifficulty::kEquivalent) ++level;
  level = std::clamp(level, 0, kMaxLevel);
  return make_problem(*match, integrand, level);
}

const std::string& SyntheticTask::answer_text(int problem, int candidate) const {
  return answers_.at(static_cast<std::size_t>(problem)).at(static_cast<std::size_t>(candidate));
}

}  // namespace ladder
