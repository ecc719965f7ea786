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

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lyapcert/errors.hpp"
#include "lyapcert/lp.hpp"
#include "lyapcert/multi_index.hpp"
#include "lyapcert/ode.hpp"
#include "lyapcert/polynomial.hpp"

namespace lyapcert {

enum class V1Form { QuadDiag, QuarticDiag };

inline const char* to_string(V1Form f) { return f == V1Form::QuadDiag ? "quad-diag" : "quartic-diag"; }

struct BenchSpec {
  std::size_t n = 2;
  int field_degree = 3;
  V1Form v1_form = V1Form::QuadDiag;
  std::uint64_t seed = 1;
  int max_tries = 100;
};

struct GeneratedBenchmark {
  OdeSystem system;
  Polynomial<double> V1;
  Polynomial<double> V2;
  double residual = 0.0;
  int tries = 0;
};

using BenchRng = std::mt19937_64;

inline double uniform(BenchRng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Σ λ_j x_j^power.
inline Polynomial<double> diagonal_form(const std::vector<double>& lambda, int power) {
  Polynomial<double> v(lambda.size());
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    MultiIndex I(lambda.size());
    I[j] = power;
    v.add_term(I, lambda[j]);
  }
  return v;
}

inline int v1_power(V1Form f) { return f == V1Form::QuadDiag ? 2 : 4; }

/// Σ λ_j x_j² (QuadDiag) or Σ λ_j x_j⁴ (QuarticDiag), λ_j uniform in [0.5, 2].
inline Polynomial<double> gen_v1(const BenchSpec& spec, BenchRng& rng) {
  if (spec.n < 2) throw DomainError("benchmarks need at least two variables");
  std::vector<double> lambda(spec.n);
  for (double& l : lambda) l = uniform(rng, 0.5, 2.0);
  return diagonal_form(lambda, v1_power(spec.v1_form));
}

/// Λ-weighted diagonal form plus 1–3 terms q_j · Π (1+x_i)^{p_i} (1−x_i)^{q_i},
/// each non-negative on [−1,1]ⁿ.  For QuadDiag the form is xᵀΛx and q_j = r_j²
/// with r_j of total degree 1 or 2, coefficients in [−1,1] and no constant
/// term, so V₂(0) = 0.  For QuarticDiag every term of ∇V₁·F is divisible by
/// some x_k³, so the form is Σ λ_j x_j⁴ and q_j = x_k⁴ s_j² with s_j affine.
inline Polynomial<double> gen_v2(std::size_t n, BenchRng& rng, V1Form form = V1Form::QuadDiag) {
  std::vector<double> lambda(n);
  for (double& l : lambda) l = uniform(rng, 0.5, 2.0);
  Polynomial<double> v = diagonal_form(lambda, v1_power(form));
  const int extra = std::uniform_int_distribution<int>(1, 3)(rng);
  std::bernoulli_distribution coin(0.5);
  const Polynomial<double> one = Polynomial<double>::constant(n, 1.0);
  for (int t = 0; t < extra; ++t) {
    Polynomial<double> term(n);
    if (form == V1Form::QuadDiag) {
      const int d = std::uniform_int_distribution<int>(1, 2)(rng);
      Polynomial<double> r(n);
      for (const MultiIndex& I : monomial_basis(n, MultiIndex(std::vector<int>(n, d))))
        if (I.total_degree() >= 1 && I.total_degree() <= d) r.add_term(I, uniform(rng, -1.0, 1.0));
      term = r * r;
    } else {
      const std::size_t k = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      Polynomial<double> s = Polynomial<double>::constant(n, uniform(rng, -1.0, 1.0));
      for (std::size_t i = 0; i < n; ++i) s += Polynomial<double>::variable(n, i) * uniform(rng, -1.0, 1.0);
      term = Polynomial<double>::variable(n, k).pow(4) * s * s;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Polynomial<double> xi = Polynomial<double>::variable(n, i);
      if (coin(rng)) term = term * (one + xi);
      if (coin(rng)) term = term * (one - xi);
    }
    v += term;
  }
  return v;
}

/// Max |coefficient| of ∇V₁·F + V₂.
inline double field_residual(const Polynomial<double>& V1, const Polynomial<double>& V2, const OdeSystem& F) {
  return max_coeff_diff(lie_derivative(V1, F), -V2);
}

/// Solves ∇V₁·F = −V₂ for F with components over monomials of total degree
/// 1..field_degree (minimum-norm solution).  nullopt when no solution
/// reaches the residual tolerance.
inline std::optional<OdeSystem> solve_field(const Polynomial<double>& V1, const Polynomial<double>& V2,
                                            int field_degree, double tol = 1e-9) {
  if (V1.n() != V2.n()) throw DimensionError("V1 and V2 have different dimensions");
  if (field_degree < 1) throw DomainError("field degree must be at least 1");
  const std::size_t n = V1.n();
  std::vector<MultiIndex> basis;
  for (const MultiIndex& I : monomial_basis(n, MultiIndex(std::vector<int>(n, field_degree))))
    if (I.total_degree() >= 1 && I.total_degree() <= field_degree) basis.push_back(I);
  std::vector<Polynomial<double>> grad;
  for (std::size_t j = 0; j < n; ++j) grad.push_back(V1.derivative(j));

  // Row per monomial of the product space or of V₂.
  std::map<MultiIndex, Eigen::Index, GradedLexLess> row_of;
  auto row = [&](const MultiIndex& I) {
    auto it = row_of.find(I);
    if (it != row_of.end()) return it->second;
    const auto r = static_cast<Eigen::Index>(row_of.size());
    row_of.emplace(I, r);
    return r;
  };
  struct Entry {
    Eigen::Index r, c;
    double v;
  };
  std::vector<Entry> entries;
  Eigen::Index col = 0;
  for (std::size_t j = 0; j < n; ++j)
    for (const MultiIndex& m : basis) {
      for (const auto& [I, g] : grad[j].terms()) entries.push_back({row(I + m), col, g});
      ++col;
    }
  for (const auto& [I, c] : V2.terms()) row(I);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(row_of.size()), col);
  for (const auto& e : entries) A(e.r, e.c) += e.v;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(A.rows());
  for (const auto& [I, c] : V2.terms()) b(row_of.at(I)) = -c;
  const auto sol = solve_linear_system(A, b, tol);
  if (!sol) return std::nullopt;
  std::vector<Polynomial<double>> rhs;
  col = 0;
  for (std::size_t j = 0; j < n; ++j) {
    Polynomial<double> f(n);
    for (const MultiIndex& m : basis) f.add_term(m, (*sol)(col++));
    rhs.push_back(std::move(f));
  }
  OdeSystem F(std::move(rhs));
  if (!(field_residual(V1, V2, F) <= tol)) return std::nullopt;
  return F;
}

/// Draws (V₁, V₂) until the field equations are solvable.  Deterministic in
/// the seed.
inline GeneratedBenchmark generate(const BenchSpec& spec) {
  if (spec.n < 2) throw DomainError("benchmarks need at least two variables");
  if (spec.field_degree < 1) throw DomainError("field degree must be at least 1");
  BenchRng rng(spec.seed);
  for (int t = 1; t <= spec.max_tries; ++t) {
    Polynomial<double> V1 = gen_v1(spec, rng);
    Polynomial<double> V2 = gen_v2(spec.n, rng, spec.v1_form);
    if (auto F = solve_field(V1, V2, spec.field_degree)) {
      GeneratedBenchmark g;
      g.residual = field_residual(V1, V2, *F);
      g.system = std::move(*F);
      g.V1 = std::move(V1);
      g.V2 = std::move(V2);
      g.tries = t;
      return g;
    }
  }
  throw ResourceLimitError("no solvable field within " + std::to_string(spec.max_tries) + " tries");
}

}  // namespace lyapcert
