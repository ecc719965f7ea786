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
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "lyapcert/binomial.hpp"
#include "lyapcert/errors.hpp"
#include "lyapcert/multi_index.hpp"
#include "lyapcert/scalar.hpp"

namespace lyapcert {

/// Sparse multivariate polynomial in n variables.
///
/// Terms are kept in graded lexicographic order.  A stored coefficient is
/// never exactly zero; arithmetic drops exact cancellations but never prunes
/// small values (see `pruned` for display-level pruning).
template <typename T = double>
class Polynomial {
 public:
  using Scalar = T;
  using Terms = std::map<MultiIndex, T, GradedLexLess>;

  Polynomial() = default;
  explicit Polynomial(std::size_t n) : n_(n) {}

  static Polynomial constant(std::size_t n, const T& value) {
    Polynomial p(n);
    p.add_term(MultiIndex(n), value);
    return p;
  }

  static Polynomial variable(std::size_t n, std::size_t axis) {
    if (axis >= n) throw DimensionError("variable index out of range");
    Polynomial p(n);
    p.add_term(MultiIndex::unit(n, axis), T(1));
    return p;
  }

  static Polynomial monomial(const MultiIndex& I, const T& coeff = T(1)) {
    Polynomial p(I.size());
    p.add_term(I, coeff);
    return p;
  }

  std::size_t n() const { return n_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  T coeff(const MultiIndex& I) const {
    auto it = terms_.find(I);
    return it == terms_.end() ? T(0) : it->second;
  }

  /// Adds c·x^I, dropping the term if it cancels exactly.
  void add_term(const MultiIndex& I, const T& c) {
    if (I.size() != n_) throw DimensionError("term length differs from variable count");
    if (scalar_is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(I, c);
    if (!inserted) {
      it->second += c;
      if (scalar_is_zero(it->second)) terms_.erase(it);
    }
  }

  /// Componentwise maximum of stored exponents (zero vector for p = 0).
  MultiIndex degree_vector() const {
    MultiIndex d(n_);
    for (const auto& [I, c] : terms_) d = d.max_with(I);
    return d;
  }

  int total_degree() const {
    int d = 0;
    for (const auto& [I, c] : terms_) d = std::max(d, I.total_degree());
    return d;
  }

  Polynomial& operator+=(const Polynomial& q) {
    check_dim(q);
    for (const auto& [I, c] : q.terms_) add_term(I, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& q) {
    check_dim(q);
    for (const auto& [I, c] : q.terms_) add_term(I, -c);
    return *this;
  }

  Polynomial& operator*=(const T& s) {
    if (scalar_is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [I, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator*(Polynomial p, const T& s) { return p *= s; }
  friend Polynomial operator*(const T& s, Polynomial p) { return p *= s; }
  friend Polynomial operator-(Polynomial p) { return p *= T(-1); }

  friend Polynomial operator*(const Polynomial& p, const Polynomial& q) {
    p.check_dim(q);
    Polynomial r(p.n_);
    for (const auto& [I, a] : p.terms_)
      for (const auto& [J, b] : q.terms_) r.add_term(I + J, a * b);
    return r;
  }

  Polynomial pow(int k) const {
    if (k < 0) throw DomainError("negative polynomial power");
    Polynomial r = constant(n_, T(1));
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  /// Partial derivative with respect to variable `axis`.
  Polynomial derivative(std::size_t axis) const {
    if (axis >= n_) throw DimensionError("derivative axis out of range");
    Polynomial r(n_);
    for (const auto& [I, c] : terms_) {
      if (I[axis] == 0) continue;
      r.add_term(I.shifted(axis, -1), c * T(I[axis]));
    }
    return r;
  }

  /// Copy without terms whose magnitude is at most `threshold`.
  Polynomial pruned(double threshold) const {
    Polynomial r(n_);
    for (const auto& [I, c] : terms_)
      if (std::fabs(to_double(c)) > threshold) r.terms_.emplace(I, c);
    return r;
  }

  template <typename U>
  Polynomial<U> cast() const {
    Polynomial<U> r(n_);
    for (const auto& [I, c] : terms_) {
      if constexpr (std::is_same_v<U, double>) r.add_term(I, to_double(c));
      else r.add_term(I, from_double<U>(to_double(c)));
    }
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  void check_dim(const Polynomial& q) const {
    if (q.n_ != n_) throw DimensionError("polynomials have different variable counts");
  }

  std::size_t n_ = 0;
  Terms terms_;
};

/// Largest coefficient magnitude of p - q.
template <typename T>
double max_coeff_diff(const Polynomial<T>& p, const Polynomial<T>& q) {
  double m = 0;
  const Polynomial<T> d = p - q;
  for (const auto& [I, c] : d.terms()) m = std::max(m, std::fabs(to_double(c)));
  return m;
}

template <typename T>
T evaluate(const Polynomial<T>& p, std::span<const T> x) {
  if (x.size() != p.n()) throw DimensionError("evaluation point has wrong dimension");
  T sum = T(0);
  for (const auto& [I, c] : p.terms()) {
    T term = c;
    for (std::size_t l = 0; l < I.size(); ++l) term *= int_power(x[l], I[l]);
    sum += term;
  }
  return sum;
}

inline double evaluate(const Polynomial<double>& p, const std::vector<double>& x) {
  return evaluate(p, std::span<const double>(x));
}

/// Axis-aligned box ∏[lower_j, upper_j] with lower_j < upper_j.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  Box() = default;
  Box(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) throw DimensionError("box bounds have different lengths");
    for (std::size_t j = 0; j < lower.size(); ++j)
      if (!(lower[j] < upper[j])) throw DomainError("degenerate box: lower bound not below upper");
  }

  static Box cube(std::size_t n, double lo, double hi) {
    return Box(std::vector<double>(n, lo), std::vector<double>(n, hi));
  }

  std::size_t dim() const { return lower.size(); }
  double width(std::size_t j) const { return upper[j] - lower[j]; }

  bool contains(std::span<const double> x, double tol = 0.0) const {
    for (std::size_t j = 0; j < dim(); ++j)
      if (x[j] < lower[j] - tol || x[j] > upper[j] + tol) return false;
    return true;
  }

  friend bool operator==(const Box&, const Box&) = default;
};

/// q(y) = p(ℓ + y∘(u − ℓ)), so that y ∈ [0,1]ⁿ covers the box.
template <typename T>
Polynomial<T> affine_substitute(const Polynomial<T>& p, std::span<const T> lower,
                                std::span<const T> upper) {
  const std::size_t n = p.n();
  if (lower.size() != n || upper.size() != n) throw DimensionError("box dimension differs from polynomial");
  std::vector<T> width(n);
  for (std::size_t j = 0; j < n; ++j) {
    width[j] = upper[j] - lower[j];
    if (!(width[j] > T(0))) throw DomainError("degenerate box in affine substitution");
  }
  // Univariate expansions (ℓ + w y)^i, memoised per (axis, exponent).
  std::vector<std::map<int, std::vector<T>>> memo(n);
  auto expansion = [&](std::size_t j, int i) -> const std::vector<T>& {
    auto it = memo[j].find(i);
    if (it != memo[j].end()) return it->second;
    std::vector<T> c(static_cast<std::size_t>(i) + 1);
    for (int k = 0; k <= i; ++k)
      c[k] = T(binomial(i, k)) * int_power(lower[j], i - k) * int_power(width[j], k);
    return memo[j].emplace(i, std::move(c)).first->second;
  };

  Polynomial<T> q(n);
  for (const auto& [I, coeff] : p.terms()) {
    // Expand the tensor product of univariate expansions.
    std::vector<std::pair<MultiIndex, T>> partial{{MultiIndex(n), coeff}};
    for (std::size_t j = 0; j < n; ++j) {
      if (I[j] == 0) continue;
      const auto& e = expansion(j, I[j]);
      std::vector<std::pair<MultiIndex, T>> next;
      next.reserve(partial.size() * e.size());
      for (const auto& [J, c] : partial)
        for (int k = 0; k <= I[j]; ++k) {
          if (scalar_is_zero(e[k])) continue;
          MultiIndex K = J;
          K[j] = k;
          next.emplace_back(std::move(K), c * e[k]);
        }
      partial = std::move(next);
    }
    for (const auto& [J, c] : partial) q.add_term(J, c);
  }
  return q;
}

inline Polynomial<double> affine_substitute(const Polynomial<double>& p, const Box& box) {
  return affine_substitute<double>(p, box.lower, box.upper);
}

template <typename T>
Polynomial<T> affine_substitute_exact(const Polynomial<T>& p, const Box& box) {
  std::vector<T> lo, hi;
  for (double v : box.lower) lo.push_back(from_double<T>(v));
  for (double v : box.upper) hi.push_back(from_double<T>(v));
  return affine_substitute<T>(p, lo, hi);
}

/// Σ_j x_j^(2·power); the definiteness shift used by the synthesiser.
template <typename T = double>
Polynomial<T> sum_of_even_powers(std::size_t n, int power = 1) {
  Polynomial<T> s(n);
  for (std::size_t j = 0; j < n; ++j) {
    MultiIndex I(n);
    I[j] = 2 * power;
    s.add_term(I, T(1));
  }
  return s;
}

}  // namespace lyapcert
