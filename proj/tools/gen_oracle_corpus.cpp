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

// Regenerates data/oracle_pairs.txt: antiderivatives F whose integrand is
// differentiate(F). Candidates are screened so that under the corpus config
// the pair verifies correct and the coefficient-perturbed copy does not,
// on the canonical seed and two alternates, before being admitted.

#include <iostream>
#include <set>
#include <sstream>

#include "ladder/corpus.hpp"
#include "ladder/expr.hpp"
#include "ladder/io.hpp"
#include "ladder/verify.hpp"

using namespace ladder;

int main(int argc, char** argv) {
  int count = 200;
  std::uint64_t seed = 20260810;
  std::string out_path = "data/oracle_pairs.txt";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--count" && i + 1 < argc) count = std::atoi(argv[++i]);
    else if (arg == "--seed" && i + 1 < argc) seed = std::strtoull(argv[++i], nullptr, 10);
    else if (arg == "--out" && i + 1 < argc) out_path = argv[++i];
    else {
      std::cerr << "usage: gen_oracle_corpus [--count N] [--seed S] [--out PATH]\n";
      return 2;
    }
  }

  std::mt19937_64 rng(seed);
  std::set<std::string> seen;
  std::ostringstream body;
  int kept = 0, tried = 0;
  while (kept < count && tried < count * 60) {
    ++tried;
    const Expr f_anti = random_antiderivative(rng);
    const std::string canon = canonical_text(f_anti);
    if (seen.count(canon)) continue;

    const Expr integrand = differentiate(f_anti);
    const Expr perturbed = perturb_one_coefficient(f_anti, 1.1);
    bool good = true;
    for (std::uint64_t salt : {0ULL, 17ULL, 4242ULL}) {
      VerifyConfig cfg = corpus_verify_config(f_anti);
      cfg.rng_seed ^= salt;
      if (verify(integrand, f_anti, cfg).verdict != Verdict::kCorrect) {
        good = false;
        break;
      }
      if (verify(integrand, perturbed, cfg).verdict == Verdict::kCorrect) {
        good = false;
        break;
      }
    }
    if (!good) continue;
    seen.insert(canon);
    body << to_text(f_anti) << "\n";
    ++kept;
  }
  if (kept < count) {
    std::cerr << "gen_oracle_corpus: only " << kept << " of " << count
              << " candidates survived screening\n";
    return 1;
  }
  atomic_write_file(out_path, body.str());
  std::cout << "wrote " << kept << " antiderivatives to " << out_path << " (screened "
            << tried << " candidates)\n";
  return 0;
}
