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

#include "ladder/corpus.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ladder {

namespace {

std::uint64_t fnv1a_str(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

double draw(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return round3(d(rng));
}

Expr coeff(std::mt19937_64& rng) {
  double c = draw(rng, 0.8, 2.2);
  std::uniform_int_distribution<int> sign(0, 1);
  if (sign(rng)) c = -c;
  return Expr::constant(c);
}

Expr quad_plus(double b) {
  return Expr::sum({Expr::pow(Expr::x(), Expr::constant(2.0)), Expr::constant(b)});
}

Expr random_term(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind_dist(0, 6);
  const int kind = kind_dist(rng);
  Expr c = coeff(rng);
  switch (kind) {
    case 0: {
      std::uniform_int_distribution<int> n(1, 5);
      return Expr::product({c, Expr::pow(Expr::x(), Expr::constant(n(rng)))});
    }
    case 1: {
      const double a = draw(rng, 0.5, 2.0);
      std::uniform_int_distribution<int> which(0, 1);
      const Func f = which(rng) ? Func::kSin : Func::kCos;
      return Expr::product({c, Expr::call(f, Expr::product({Expr::constant(a), Expr::x()}))});
    }
    case 2: {
      double a = draw(rng, 0.3, 0.9);
      std::uniform_int_distribution<int> sign(0, 1);
      if (sign(rng)) a = -a;
      return Expr::product(
          {c, Expr::call(Func::kExp, Expr::product({Expr::constant(a), Expr::x()}))});
    }
    case 3: {
      const double a = draw(rng, 0.3, 1.5);
      return Expr::product(
          {c, Expr::call(Func::kAtan, Expr::product({Expr::constant(a), Expr::x()}))});
    }
    case 4:
      return Expr::product({c, Expr::call(Func::kLn, quad_plus(draw(rng, 1.0, 5.0)))});
    case 5:
      return Expr::product({c, Expr::call(Func::kSqrt, quad_plus(draw(rng, 0.5, 4.0)))});
    default:
      return Expr::quotient(c, quad_plus(draw(rng, 1.0, 5.0)));
  }
}

}  // namespace

Expr random_antiderivative(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count_dist(1, 3);
  const int terms = count_dist(rng);
  std::vector<Expr> parts;
  for (int i = 0; i < terms; ++i) parts.push_back(random_term(rng));
  if (parts.size() == 1) return parts[0];
  return Expr::sum(std::move(parts));
}

VerifyConfig corpus_verify_config(const Expr& antiderivative) {
  VerifyConfig cfg;  // protocol defaults: 5 points, [-10,10], 0.1, 1e-2, 2s, 3 retries
  cfg.rng_seed = fnv1a_str(canonical_text(antiderivative));
  return cfg;
}

namespace {

// Counts constants eligible as "coefficients": every constant leaf except
// power exponents.
void collect_coefficients(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind() == ExprKind::kConstant) {
    out.push_back(&e);
    return;
  }
  for (std::size_t i = 0; i < e.children().size(); ++i) {
    if (e.kind() == ExprKind::kPower && i == 1) continue;
    collect_coefficients(e.child(i), out);
  }
}

Expr scale_kth_coefficient(const Expr& e, int& k, double factor) {
  if (e.kind() == ExprKind::kConstant) {
    if (k-- == 0) return Expr::constant(e.constant_value() * factor);
    return e;
  }
  std::vector<Expr> kids;
  kids.reserve(e.children().size());
  for (std::size_t i = 0; i < e.children().size(); ++i) {
    if (e.kind() == ExprKind::kPower && i == 1) {
      kids.push_back(e.child(i));
    } else {
      kids.push_back(scale_kth_coefficient(e.child(i), k, factor));
    }
  }
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

}  // namespace

Expr perturb_one_coefficient(const Expr& antiderivative, double factor) {
  std::vector<const Expr*> coefficients;
  collect_coefficients(antiderivative, coefficients);
  if (coefficients.empty()) return antiderivative;
  std::mt19937_64 rng(fnv1a_str(canonical_text(antiderivative)) ^ 0xC0FFEEULL);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(coefficients.size()) - 1);
  int k = pick(rng);
  return scale_kth_coefficient(antiderivative, k, factor);
}

std::vector<Expr> load_expression_lines(const std::string& text) {
  std::vector<Expr> out;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::size_t b = 0, e = line.size();
    while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
    if (b == e) continue;
    ParseResult r = parse(std::string_view(line).substr(b, e - b));
    if (!parse_ok(r)) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " +
                               std::get<ParseError>(r).message());
    }
    out.push_back(std::get<Expr>(r));
  }
  return out;
}

}  // namespace ladder
