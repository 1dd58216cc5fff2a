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

#ifndef LADDER_CORPUS_HPP_
#define LADDER_CORPUS_HPP_

#include <random>
#include <vector>

#include "ladder/expr.hpp"
#include "ladder/verify.hpp"

namespace ladder {

// Oracle corpus: antiderivatives F built from smooth-on-[-10,10] building
// blocks (polynomials, trig, mild exponentials, atan, ln/sqrt of positive
// quadratics, reciprocal quadratics), one to three terms with O(1)
// coefficients. The matching integrand is always differentiate(F).

// One random antiderivative; singularity-aware by construction.
Expr random_antiderivative(std::mt19937_64& rng);

// The verification config a corpus pair is checked under: protocol defaults
// with a seed derived from F's canonical text.
VerifyConfig corpus_verify_config(const Expr& antiderivative);

// F with one multiplicative coefficient (never a power exponent) scaled by
// `factor`; the choice of coefficient is seeded by F itself.
Expr perturb_one_coefficient(const Expr& antiderivative, double factor);

// Parses one expression per nonempty line; throws on parse failure.
std::vector<Expr> load_expression_lines(const std::string& text);

}  // namespace ladder

#endif  // LADDER_CORPUS_HPP_
