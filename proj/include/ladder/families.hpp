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

#ifndef LADDER_FAMILIES_HPP_
#define LADDER_FAMILIES_HPP_

#include <optional>
#include <string_view>
#include <vector>

#include "ladder/expr.hpp"
#include "ladder/numint.hpp"

namespace ladder {

// Closed-form integrand templates: the answer table behind the mock solver
// and the toy task's candidate answers. An integrand is "recognized" when it
// decomposes into a sum of these units.

enum Family : int {
  kFamPower = 0,        // c * x^n, integer n >= 0
  kFamRecipQuad = 1,    // c / (x^2 + a), a > 0
  kFamExponential = 2,  // c * exp(a x + b)
  kFamSine = 3,         // c * sin(a x + b)
  kFamCosine = 4,       // c * cos(a x + b)
  kFamInversePower = 5, // c / x^m, integer m >= 1
  kFamilyCount = 6,
};

std::string_view family_name(Family f);

struct UnitMatch {
  Family family = kFamPower;
  double c = 1.0;  // outer multiplier
  double a = 1.0;  // argument slope / quadratic offset, per family
  double b = 0.0;  // argument intercept (exp/sin/cos)
  int n = 0;       // exponent for kFamPower / kFamInversePower
};

struct IntegrandMatch {
  std::vector<UnitMatch> units;  // nonempty; integrand = sum of units
  Family primary() const { return units.front().family; }
};

// Structural decomposition into template units; nullopt when any term falls
// outside the table.
std::optional<IntegrandMatch> recognize_integrand(const Expr& e);

// The canonical expression a unit denotes, and its antiderivative.
Expr unit_integrand(const UnitMatch& u);
Expr unit_antiderivative(const UnitMatch& u);
Expr antiderivative(const IntegrandMatch& m);

// Recognize + integrate by table, cross-checked by differentiating the
// candidate and spot-comparing against the integrand. Returns nullopt for
// unrecognized integrands, failed cross-checks, or an expired deadline --
// such integrands are "unsolvable" for the mock pipeline.
std::optional<Expr> table_solve(const Expr& integrand, const Deadline& deadline);

}  // namespace ladder

#endif  // LADDER_FAMILIES_HPP_
