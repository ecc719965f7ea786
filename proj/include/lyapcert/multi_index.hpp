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
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <vector>

#include "lyapcert/errors.hpp"

namespace lyapcert {

/// Exponent vector of a monomial; one non-negative entry per variable.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : e_(n, 0) {}
  MultiIndex(std::initializer_list<int> entries) : e_(entries) { validate(); }
  explicit MultiIndex(std::vector<int> entries) : e_(std::move(entries)) {
    validate();
  }

  static MultiIndex unit(std::size_t n, std::size_t axis) {
    MultiIndex m(n);
    m.e_[axis] = 1;
    return m;
  }

  std::size_t size() const { return e_.size(); }
  int operator[](std::size_t i) const { return e_[i]; }
  int& operator[](std::size_t i) { return e_[i]; }
  const std::vector<int>& entries() const { return e_; }
  auto begin() const { return e_.begin(); }
  auto end() const { return e_.end(); }

  int total_degree() const { return std::accumulate(e_.begin(), e_.end(), 0); }

  /// Componentwise partial order: I ≤ J iff i_l ≤ j_l for every l.
  bool leq(const MultiIndex& other) const {
    if (other.size() != size()) throw DimensionError("multi-index length mismatch");
    for (std::size_t i = 0; i < e_.size(); ++i)
      if (e_[i] > other.e_[i]) return false;
    return true;
  }

  MultiIndex operator+(const MultiIndex& other) const {
    if (other.size() != size()) throw DimensionError("multi-index length mismatch");
    MultiIndex r(*this);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] += other.e_[i];
    return r;
  }

  MultiIndex operator-(const MultiIndex& other) const {
    if (other.size() != size()) throw DimensionError("multi-index length mismatch");
    MultiIndex r(*this);
    for (std::size_t i = 0; i < e_.size(); ++i) {
      r.e_[i] -= other.e_[i];
      if (r.e_[i] < 0) throw DomainError("multi-index difference is negative");
    }
    return r;
  }

  MultiIndex shifted(std::size_t axis, int k) const {
    MultiIndex r(*this);
    r.e_[axis] += k;
    if (r.e_[axis] < 0) throw DomainError("multi-index entry would be negative");
    return r;
  }

  /// Componentwise maximum.
  MultiIndex max_with(const MultiIndex& other) const {
    MultiIndex r(*this);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = std::max(e_[i], other.e_[i]);
    return r;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

  friend std::ostream& operator<<(std::ostream& os, const MultiIndex& m) {
    os << '(';
    for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
    return os << ')';
  }

 private:
  void validate() const {
    for (int v : e_)
      if (v < 0) throw DomainError("multi-index entries must be non-negative");
  }

  std::vector<int> e_;
};

/// Graded lexicographic order: total degree first, then x1 before x2 before
/// ... within a degree (so x² < xy < y² for n = 2, degree 2).
struct GradedLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    const int da = a.total_degree();
    const int db = b.total_degree();
    if (da != db) return da < db;
    return b.entries() < a.entries();
  }
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& m) const {
    std::size_t h = 1469598103934665603ull;
    for (int v : m) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

/// All I ≤ δ in graded lexicographic order; exactly ∏(δ_l + 1) entries.
inline std::vector<MultiIndex> monomial_basis(std::size_t n, const MultiIndex& degree) {
  if (degree.size() != n) throw DimensionError("degree vector length differs from n");
  std::vector<MultiIndex> out;
  MultiIndex cur(n);
  while (true) {
    out.push_back(cur);
    std::size_t i = 0;
    while (i < n && cur[i] == degree[i]) {
      cur[i] = 0;
      ++i;
    }
    if (i == n) break;
    ++cur[i];
  }
  std::sort(out.begin(), out.end(), GradedLexLess{});
  return out;
}

/// Dense mixed-radix addressing of the grid {I : I ≤ δ}; axis 0 varies fastest.
class IndexGrid {
 public:
  IndexGrid() = default;
  explicit IndexGrid(MultiIndex degree) : degree_(std::move(degree)), stride_(degree_.size()) {
    std::size_t s = 1;
    for (std::size_t i = 0; i < degree_.size(); ++i) {
      stride_[i] = s;
      s *= static_cast<std::size_t>(degree_[i] + 1);
    }
    size_ = s;
  }

  const MultiIndex& degree() const { return degree_; }
  std::size_t dim() const { return degree_.size(); }
  std::size_t size() const { return size_; }
  std::size_t stride(std::size_t axis) const { return stride_[axis]; }

  std::size_t linear(const MultiIndex& I) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < degree_.size(); ++i) k += stride_[i] * static_cast<std::size_t>(I[i]);
    return k;
  }

  MultiIndex index(std::size_t k) const {
    MultiIndex I(degree_.size());
    for (std::size_t i = 0; i < degree_.size(); ++i) {
      const auto r = static_cast<std::size_t>(degree_[i] + 1);
      I[i] = static_cast<int>(k % r);
      k /= r;
    }
    return I;
  }

 private:
  MultiIndex degree_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 1;
};

}  // namespace lyapcert
