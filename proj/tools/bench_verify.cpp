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

// Benchmark: serial reference vs OpenMP batch verification over a generated
// oracle corpus. The two paths must produce identical verdicts; the table
// reports wall times and speedup.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "ladder/corpus.hpp"
#include "ladder/expr.hpp"
#include "ladder/parallel.hpp"
#include "ladder/verify.hpp"

using namespace ladder;

namespace {

struct Workload {
  std::vector<Expr> integrands;
  std::vector<Expr> candidates;
  std::vector<VerifyConfig> configs;
};

Workload make_workload(int pairs, std::uint64_t seed) {
  Workload w;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < pairs; ++i) {
    const Expr f_anti = random_antiderivative(rng);
    w.integrands.push_back(differentiate(f_anti));
    // alternate correct and perturbed candidates so both verdicts appear
    w.candidates.push_back(i % 2 == 0 ? f_anti : perturb_one_coefficient(f_anti, 1.1));
    w.configs.push_back(corpus_verify_config(f_anti));
  }
  return w;
}

double run_pass(const Workload& w, bool parallel, std::vector<Verdict>& verdicts) {
  verdicts.assign(w.integrands.size(), Verdict::kUnverifiable);
  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(w.integrands.size(), parallel, [&](std::size_t i) {
    verdicts[i] = verify(w.integrands[i], w.candidates[i], w.configs[i]).verdict;
  });
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int pairs = 400;
  int repeats = 3;
  if (argc > 1) pairs = std::atoi(argv[1]);
  if (argc > 2) repeats = std::atoi(argv[2]);

  std::printf("batch verification benchmark: %d pairs, %d repeats, %d worker(s)%s\n",
              pairs, repeats, max_parallel_workers(),
              openmp_enabled() ? "" : " [OpenMP disabled at build time]");

  const Workload w = make_workload(pairs, 0xBE9C4ULL);
  std::vector<Verdict> serial_verdicts, parallel_verdicts;

  // warm-up pass populates nothing persistent; timings below are steady-state
  run_pass(w, false, serial_verdicts);

  double serial_best = 1e100, parallel_best = 1e100;
  for (int r = 0; r < repeats; ++r) {
    serial_best = std::min(serial_best, run_pass(w, false, serial_verdicts));
    parallel_best = std::min(parallel_best, run_pass(w, true, parallel_verdicts));
  }

  int correct = 0;
  for (std::size_t i = 0; i < serial_verdicts.size(); ++i) {
    if (serial_verdicts[i] != parallel_verdicts[i]) {
      std::printf("MISMATCH at pair %zu: serial and parallel verdicts differ\n", i);
      return 1;
    }
    if (serial_verdicts[i] == Verdict::kCorrect) ++correct;
  }

  std::printf("%-22s %10s %14s\n", "path", "seconds", "pairs/second");
  std::printf("%-22s %10.3f %14.1f\n", "serial reference", serial_best,
              pairs / serial_best);
  std::printf("%-22s %10.3f %14.1f\n", "openmp", parallel_best, pairs / parallel_best);
  std::printf("speedup: %.2fx, verdicts identical (%d of %d accepted)\n",
              serial_best / parallel_best, correct, pairs);
  return 0;
}
