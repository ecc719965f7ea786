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
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lyapcert/binomial.hpp"
#include "lyapcert/errors.hpp"
#include "lyapcert/multi_index.hpp"
#include "lyapcert/polynomial.hpp"

namespace lyapcert {

/// Coefficients b_{I,δ} of a polynomial in the tensor Bernstein basis of
/// degree δ on [0,1]ⁿ.  Stored densely in IndexGrid order.
template <typename T = double>
struct BernsteinCoeffs {
  MultiIndex degree;
  IndexGrid grid;
  std::vector<T> values;

  std::size_t size() const { return values.size(); }
  const T& at(const MultiIndex& I) const { return values[grid.linear(I)]; }

  T min() const { return *std::min_element(values.begin(), values.end()); }
  T max() const { return *std::max_element(values.begin(), values.end()); }
};

namespace detail {

/// M[i][j] = C(i,j)/C(m,j) for j ≤ i: univariate monomial-to-Bernstein map.
template <typename T>
std::vector<std::vector<T>> univariate_conversion(int m) {
  std::vector<std::vector<T>> M(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) {
    M[i].resize(static_cast<std::size_t>(i) + 1);
    for (int j = 0; j <= i; ++j) {
      if constexpr (std::is_same_v<T, double>)
        M[i][j] = static_cast<double>(binomial(i, j)) / static_cast<double>(binomial(m, j));
      else
        M[i][j] = T(binomial(i, j)) / T(binomial(m, j));
    }
  }
  return M;
}

}  // namespace detail

/// b_{I,δ} = Σ_{J≤I} C(I,J)/C(δ,J) p_J, applied one axis at a time.
template <typename T>
BernsteinCoeffs<T> bernstein_coeffs(const Polynomial<T>& p, const MultiIndex& delta) {
  if (delta.size() != p.n()) throw DimensionError("expansion degree has wrong length");
  if (!p.degree_vector().leq(delta)) throw DomainError("expansion degree is below the polynomial degree");
  BernsteinCoeffs<T> out;
  out.degree = delta;
  out.grid = IndexGrid(delta);
  out.values.assign(out.grid.size(), T(0));
  for (const auto& [I, c] : p.terms()) out.values[out.grid.linear(I)] = c;

  std::vector<T> line;
  for (std::size_t r = 0; r < p.n(); ++r) {
    const int m = delta[r];
    if (m == 0) continue;
    const auto M = detail::univariate_conversion<T>(m);
    const std::size_t stride = out.grid.stride(r);
    const std::size_t len = static_cast<std::size_t>(m) + 1;
    const std::size_t block = stride * len;
    line.assign(len, T(0));
    for (std::size_t base = 0; base < out.values.size(); base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t start = base + off;
        for (std::size_t i = 0; i < len; ++i) {
          T s = T(0);
          for (std::size_t j = 0; j <= i; ++j) {
            const T& a = out.values[start + j * stride];
            if (!scalar_is_zero(a)) s += M[i][j] * a;
          }
          line[i] = s;
        }
        for (std::size_t i = 0; i < len; ++i) out.values[start + i * stride] = line[i];
      }
    }
  }
  return out;
}

/// Bernstein coefficients of p over an arbitrary box (after the affine map
/// onto the unit box).
inline BernsteinCoeffs<double> bernstein_on_box(const Polynomial<double>& p, const Box& box,
                                                const MultiIndex& delta) {
  return bernstein_coeffs(affine_substitute(p, box), delta);
}

namespace detail {

struct ConversionCache {
  std::shared_mutex mutex;
  std::map<std::vector<int>, std::shared_ptr<const Eigen::MatrixXd>> entries;
};

inline ConversionCache& conversion_cache() {
  static ConversionCache cache;
  return cache;
}

}  // namespace detail

/// Row per monomial x^I, column per Bernstein index J (both I, J ≤ δ in
/// graded-lex order); entry C(J,I)/C(δ,I) when I ≤ J.  Results are cached.
inline std::shared_ptr<const Eigen::MatrixXd> conversion_matrix(std::size_t n, const MultiIndex& delta) {
  if (delta.size() != n) throw DimensionError("expansion degree has wrong length");
  auto& cache = detail::conversion_cache();
  {
    std::shared_lock lock(cache.mutex);
    auto it = cache.entries.find(delta.entries());
    if (it != cache.entries.end()) return it->second;
  }
  const auto basis = monomial_basis(n, delta);
  const auto k = static_cast<Eigen::Index>(basis.size());
  auto B = std::make_shared<Eigen::MatrixXd>(Eigen::MatrixXd::Zero(k, k));
  for (Eigen::Index r = 0; r < k; ++r) {
    const MultiIndex& I = basis[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < k; ++c) {
      const MultiIndex& J = basis[static_cast<std::size_t>(c)];
      if (!I.leq(J)) continue;
      double v = 1.0;
      for (std::size_t l = 0; l < n; ++l)
        v *= static_cast<double>(binomial(J[l], I[l])) / static_cast<double>(binomial(delta[l], I[l]));
      (*B)(r, c) = v;
    }
  }
  std::unique_lock lock(cache.mutex);
  auto [it, inserted] = cache.entries.emplace(delta.entries(), std::move(B));
  return it->second;
}

/// max over [0,1]ⁿ of B_{I,δ}, attained at I/δ (0⁰ = 1).
template <typename T = double>
T basis_value_bound(const MultiIndex& I, const MultiIndex& delta) {
  if (!I.leq(delta)) throw DomainError("basis index exceeds expansion degree");
  T v = T(1);
  for (std::size_t l = 0; l < I.size(); ++l) {
    const int i = I[l];
    const int m = delta[l];
    if (i == 0 || i == m) continue;  // bound is 1 at an endpoint
    T t = T(i) / T(m);
    v *= T(binomial(m, i)) * int_power<T>(t, i) * int_power<T>(T(1) - t, m - i);
  }
  return v;
}

inline double univariate_basis(int i, int m, double x) {
  return static_cast<double>(binomial(m, i)) * std::pow(x, i) * std::pow(1.0 - x, m - i);
}

/// B_{I,δ}(x) = ∏ C(δ_l,i_l) x_l^{i_l} (1−x_l)^{δ_l−i_l}.
inline double eval_basis(const MultiIndex& I, const MultiIndex& delta, std::span<const double> x) {
  if (I.size() != delta.size() || x.size() != I.size()) throw DimensionError("basis evaluation dimension mismatch");
  double v = 1.0;
  for (std::size_t l = 0; l < I.size(); ++l) v *= univariate_basis(I[l], delta[l], x[l]);
  return v;
}

inline double eval_basis(const MultiIndex& I, const MultiIndex& delta, const std::vector<double>& x) {
  return eval_basis(I, delta, std::span<const double>(x));
}

/// Σ_I b_I B_{I,δ}(x).
inline double eval_bernstein(const BernsteinCoeffs<double>& b, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) s += b.values[k] * eval_basis(b.grid.index(k), b.degree, x);
  return s;
}

enum class RecurrenceLevels { FixedLevel1, Full };

/// B_{J,δ′} = a·B_{J,δ′+e_r} + b·B_{J+e_r,δ′+e_r} with
/// a = (δ′_r+1−j_r)/(δ′_r+1) and b = (j_r+1)/(δ′_r+1).
struct RecurrenceConstraint {
  MultiIndex index;        // J
  MultiIndex low_degree;   // δ′
  std::size_t axis = 0;    // r
  int numerator_a = 0;
  int numerator_b = 0;
  int denominator = 1;

  MultiIndex high_degree() const { return low_degree.shifted(axis, 1); }
  const MultiIndex& high_index_a() const { return index; }
  MultiIndex high_index_b() const { return index.shifted(axis, 1); }
  double coeff_a() const { return static_cast<double>(numerator_a) / denominator; }
  double coeff_b() const { return static_cast<double>(numerator_b) / denominator; }
};

/// Lower-degree blocks used by the third relaxation, δ itself first.
/// FixedLevel1 gives δ and δ − e_r for each listed axis; Full gives every δ′ ≤ δ.
inline std::vector<MultiIndex> relaxation_blocks(const MultiIndex& delta, RecurrenceLevels levels,
                                                 const std::vector<std::size_t>& axes) {
  std::vector<MultiIndex> out{delta};
  if (levels == RecurrenceLevels::FixedLevel1) {
    for (std::size_t r : axes) out.push_back(delta.shifted(r, -1));
    return out;
  }
  for (const MultiIndex& d : monomial_basis(delta.size(), delta))
    if (d != delta) out.push_back(d);
  return out;
}

inline std::vector<std::size_t> positive_axes(const MultiIndex& delta) {
  std::vector<std::size_t> axes;
  for (std::size_t r = 0; r < delta.size(); ++r)
    if (delta[r] > 0) axes.push_back(r);
  return axes;
}

/// Recurrences tying lower-degree Bernstein blocks to their successors.
/// With no axis list every axis is used, and each must have δ_r ≥ 1.
inline std::vector<RecurrenceConstraint> recurrence_constraints(
    const MultiIndex& delta, RecurrenceLevels levels,
    std::optional<std::vector<std::size_t>> axes = std::nullopt) {
  std::vector<std::size_t> use;
  if (axes) {
    use = *axes;
  } else {
    for (std::size_t r = 0; r < delta.size(); ++r) use.push_back(r);
  }
  for (std::size_t r : use) {
    if (r >= delta.size()) throw DimensionError("recurrence axis out of range");
    if (delta[r] == 0) throw DomainError("cannot lower a zero expansion degree");
  }

  std::vector<RecurrenceConstraint> out;
  auto emit = [&](const MultiIndex& low, std::size_t r) {
    const int den = low[r] + 1;
    for (const MultiIndex& J : monomial_basis(low.size(), low)) {
      RecurrenceConstraint rc;
      rc.index = J;
      rc.low_degree = low;
      rc.axis = r;
      rc.numerator_a = den - J[r];
      rc.numerator_b = J[r] + 1;
      rc.denominator = den;
      out.push_back(std::move(rc));
    }
  };

  if (levels == RecurrenceLevels::FixedLevel1) {
    for (std::size_t r : use) emit(delta.shifted(r, -1), r);
    return out;
  }
  for (const MultiIndex& low : relaxation_blocks(delta, levels, use)) {
    if (low == delta) continue;
    for (std::size_t r : use)
      if (low[r] < delta[r]) emit(low, r);
  }
  return out;
}

/// Range enclosure of p over the box from the extreme Bernstein coefficients.
inline std::pair<double, double> enclosure(const Polynomial<double>& p, const Box& box, const MultiIndex& delta) {
  const auto b = bernstein_on_box(p, box, delta);
  return {b.min(), b.max()};
}

inline std::pair<double, double> enclosure(const Polynomial<double>& p, const Box& box) {
  return enclosure(p, box, p.degree_vector());
}

}  // namespace lyapcert
