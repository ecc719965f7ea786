// Copyright 2026 The lyapcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared helpers for the unit tests: seeded random polynomials and boxes.

#pragma once

#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lyapcert/lyapcert.hpp"

namespace lyapcert::testing {

using P = Polynomial<double>;

inline P var(std::size_t n, std::size_t i) { return P::variable(n, i); }

/// Random polynomial with per-variable degree at most `deg`, coefficients in
/// [-range, range] and roughly `density` of the monomials present.
inline P random_polynomial(std::mt19937_64& rng, std::size_t n, int deg, double range = 2.0, double density = 0.6) {
  std::uniform_real_distribution<double> coeff(-range, range), keep(0.0, 1.0);
  P p(n);
  for (const MultiIndex& I : monomial_basis(n, MultiIndex(std::vector<int>(n, deg))))
    if (keep(rng) < density) p.add_term(I, coeff(rng));
  return p;
}

inline Box random_box(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> lo(-2.0, 1.0), w(0.25, 2.0);
  std::vector<double> l(n), u(n);
  for (std::size_t j = 0; j < n; ++j) {
    l[j] = lo(rng);
    u[j] = l[j] + w(rng);
  }
  return Box(l, u);
}

inline std::vector<double> random_point(std::mt19937_64& rng, const Box& box) {
  std::vector<double> x(box.dim());
  for (std::size_t j = 0; j < box.dim(); ++j)
    x[j] = std::uniform_real_distribution<double>(box.lower[j], box.upper[j])(rng);
  return x;
}

/// Exhaustive grid minimum with `m` points per axis.
inline double grid_minimum(const P& p, const Box& box, int m) {
  const std::size_t n = box.dim();
  std::vector<int> k(n, 0);
  std::vector<double> x(n);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    for (std::size_t j = 0; j < n; ++j) x[j] = box.lower[j] + box.width(j) * k[j] / (m - 1);
    best = std::min(best, evaluate(p, x));
    std::size_t j = 0;
    while (j < n && ++k[j] == m) k[j++] = 0;
    if (j == n) break;
  }
  return best;
}

inline std::string data_file(const std::string& rel) { return std::string(LYAPCERT_DATA_DIR) + "/" + rel; }

inline SystemSpec load_system(const std::string& rel) {
  std::ifstream in(data_file(rel));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

}  // namespace lyapcert::testing
