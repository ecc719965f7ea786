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

#include <array>
#include <cstdint>
#include <limits>

#include "lyapcert/errors.hpp"

namespace lyapcert {

/// Largest row of Pascal's triangle kept in the table.  C(62, 31) still fits
/// in a signed 64-bit integer; degrees up to 30 per axis leave headroom for
/// the doubled degrees used by degree elevation.
inline constexpr int kMaxBinomialRow = 62;

namespace detail {

struct PascalTable {
  std::array<std::array<std::int64_t, kMaxBinomialRow + 1>, kMaxBinomialRow + 1> c{};

  constexpr PascalTable() {
    for (int n = 0; n <= kMaxBinomialRow; ++n) {
      c[n][0] = 1;
      for (int k = 1; k <= n; ++k) {
        const std::int64_t a = c[n - 1][k - 1];
        const std::int64_t b = k <= n - 1 ? c[n - 1][k] : 0;
        // Overflow guard; cannot trigger for n <= 62.
        if (a > std::numeric_limits<std::int64_t>::max() - b) c[n][k] = -1;
        else c[n][k] = a + b;
      }
    }
  }
};

inline constexpr PascalTable kPascal{};

}  // namespace detail

/// C(n, k) as an exact 64-bit integer; 0 when k is outside [0, n].
inline std::int64_t binomial(int n, int k) {
  if (n < 0 || n > kMaxBinomialRow) throw DomainError("binomial row out of supported range");
  if (k < 0 || k > n) return 0;
  const std::int64_t v = detail::kPascal.c[n][k];
  if (v < 0) throw DomainError("binomial coefficient overflow");
  return v;
}

}  // namespace lyapcert
