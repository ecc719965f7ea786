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

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lyapcert/errors.hpp"
#include "lyapcert/polynomial.hpp"

namespace lyapcert {

/// Polynomial vector field dx/dt = f(x).
template <typename T = double>
class BasicOdeSystem {
 public:
  BasicOdeSystem() = default;
  explicit BasicOdeSystem(std::vector<Polynomial<T>> rhs) : rhs_(std::move(rhs)) {
    if (rhs_.empty()) throw DomainError("ODE system needs at least one equation");
    for (const auto& f : rhs_)
      if (f.n() != rhs_.size()) throw DimensionError("every right-hand side must use n variables");
  }

  std::size_t n() const { return rhs_.size(); }
  const std::vector<Polynomial<T>>& rhs() const { return rhs_; }
  const Polynomial<T>& operator[](std::size_t j) const { return rhs_[j]; }

  /// True when f(0) = 0, i.e. no component has a constant term.
  bool has_equilibrium_at_origin() const {
    for (const auto& f : rhs_)
      if (!scalar_is_zero(f.coeff(MultiIndex(n())))) return false;
    return true;
  }

  MultiIndex degree_vector() const {
    MultiIndex d(n());
    for (const auto& f : rhs_) d = d.max_with(f.degree_vector());
    return d;
  }

  int max_degree() const {
    int d = 0;
    for (const auto& f : rhs_) d = std::max(d, f.total_degree());
    return d;
  }

  std::vector<T> evaluate(std::span<const T> x) const {
    std::vector<T> out;
    out.reserve(n());
    for (const auto& f : rhs_) out.push_back(lyapcert::evaluate(f, x));
    return out;
  }

  template <typename U>
  BasicOdeSystem<U> cast() const {
    std::vector<Polynomial<U>> r;
    for (const auto& f : rhs_) r.push_back(f.template cast<U>());
    return BasicOdeSystem<U>(std::move(r));
  }

  friend bool operator==(const BasicOdeSystem&, const BasicOdeSystem&) = default;

 private:
  std::vector<Polynomial<T>> rhs_;
};

using OdeSystem = BasicOdeSystem<double>;

/// V′ = Σ_j (∂p/∂x_j) f_j.
template <typename T>
Polynomial<T> lie_derivative(const Polynomial<T>& p, const BasicOdeSystem<T>& sys) {
  if (p.n() != sys.n()) throw DimensionError("polynomial and system have different dimensions");
  Polynomial<T> out(p.n());
  for (std::size_t j = 0; j < sys.n(); ++j) {
    Polynomial<T> dp = p.derivative(j);
    if (dp.is_zero() || sys[j].is_zero()) continue;
    out += dp * sys[j];
  }
  return out;
}

}  // namespace lyapcert
