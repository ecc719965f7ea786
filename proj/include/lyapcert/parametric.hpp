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

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lyapcert/errors.hpp"
#include "lyapcert/multi_index.hpp"
#include "lyapcert/ode.hpp"
#include "lyapcert/polynomial.hpp"

namespace lyapcert {

/// V(x, c) = cᵀ · coeff_map · m, linear in the parameter vector c.
struct ParametricPolynomial {
  std::size_t n = 0;
  std::vector<MultiIndex> monomials;
  Eigen::MatrixXd coeff_map;  // one row per parameter, one column per monomial

  ParametricPolynomial() = default;
  ParametricPolynomial(std::size_t nvars, std::vector<MultiIndex> basis, Eigen::MatrixXd map)
      : n(nvars), monomials(std::move(basis)), coeff_map(std::move(map)) {
    if (static_cast<std::size_t>(coeff_map.cols()) != monomials.size())
      throw DimensionError("coefficient map needs one column per monomial");
    for (const auto& m : monomials)
      if (m.size() != n) throw DimensionError("monomial length differs from n");
  }

  /// One free parameter per monomial.
  static ParametricPolynomial identity(std::size_t nvars, std::vector<MultiIndex> basis) {
    const auto k = static_cast<Eigen::Index>(basis.size());
    return ParametricPolynomial(nvars, std::move(basis), Eigen::MatrixXd::Identity(k, k));
  }

  std::size_t num_params() const { return static_cast<std::size_t>(coeff_map.rows()); }

  Polynomial<double> instantiate(const Eigen::VectorXd& c) const {
    if (static_cast<std::size_t>(c.size()) != num_params())
      throw DimensionError("parameter vector has wrong length");
    const Eigen::VectorXd coeffs = coeff_map.transpose() * c;
    Polynomial<double> p(n);
    for (std::size_t k = 0; k < monomials.size(); ++k) p.add_term(monomials[k], coeffs(static_cast<Eigen::Index>(k)));
    return p;
  }
};

/// Lie-derivative matrix: row k holds the coefficients of (x^{m_k})′ over
/// `derivative_monomials` (graded-lex sorted).
struct LieMatrix {
  Eigen::MatrixXd D;
  std::vector<MultiIndex> derivative_monomials;
};

inline LieMatrix lie_matrix(const OdeSystem& sys, const std::vector<MultiIndex>& monomials) {
  if (monomials.empty()) throw DomainError("monomial list is empty");
  std::vector<Polynomial<double>> derivs;
  std::set<MultiIndex, GradedLexLess> support;
  for (const auto& m : monomials) {
    if (m.size() != sys.n()) throw DimensionError("monomial length differs from system dimension");
    derivs.push_back(lie_derivative(Polynomial<double>::monomial(m), sys));
    for (const auto& [I, c] : derivs.back().terms()) support.insert(I);
  }
  LieMatrix out;
  out.derivative_monomials.assign(support.begin(), support.end());
  std::map<MultiIndex, Eigen::Index, GradedLexLess> column;
  for (std::size_t k = 0; k < out.derivative_monomials.size(); ++k)
    column.emplace(out.derivative_monomials[k], static_cast<Eigen::Index>(k));
  out.D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(monomials.size()),
                                static_cast<Eigen::Index>(support.size()));
  for (std::size_t r = 0; r < derivs.size(); ++r)
    for (const auto& [I, c] : derivs[r].terms()) out.D(static_cast<Eigen::Index>(r), column.at(I)) = c;
  return out;
}

/// Lie derivative of a parametric polynomial; the result is again parametric.
inline ParametricPolynomial lie_derivative(const ParametricPolynomial& V, const OdeSystem& sys) {
  LieMatrix lm = lie_matrix(sys, V.monomials);
  return ParametricPolynomial(V.n, std::move(lm.derivative_monomials), V.coeff_map * lm.D);
}

/// Row for x^I holds the coefficients of x^I after x ↦ ℓ + y∘(u − ℓ), over
/// the same basis.  The basis must be closed downward.
inline Eigen::MatrixXd transform_matrix(const Box& box, const std::vector<MultiIndex>& monomials) {
  std::map<MultiIndex, Eigen::Index, GradedLexLess> column;
  for (std::size_t k = 0; k < monomials.size(); ++k) {
    if (monomials[k].size() != box.dim()) throw DimensionError("monomial length differs from box dimension");
    column.emplace(monomials[k], static_cast<Eigen::Index>(k));
  }
  const auto k = static_cast<Eigen::Index>(monomials.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t r = 0; r < monomials.size(); ++r) {
    const Polynomial<double> q = affine_substitute(Polynomial<double>::monomial(monomials[r]), box);
    for (const auto& [J, c] : q.terms()) {
      auto it = column.find(J);
      if (it == column.end()) throw DomainError("monomial basis is not closed downward");
      T(static_cast<Eigen::Index>(r), it->second) = c;
    }
  }
  return T;
}

}  // namespace lyapcert
