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

// Scalar traits shared by the templated algorithms. `double` is the working
// type; `Rational` (GMP) is used to re-check certificates exactly.

#include <cmath>
#include <string>

#include <gmpxx.h>

namespace lyapcert {

using Rational = mpq_class;

template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static double from_double(double v) { return v; }
  static double to_double(double v) { return v; }
  static double abs(double v) { return std::fabs(v); }
  static bool is_zero(double v) { return v == 0.0; }
};

template <>
struct ScalarTraits<Rational> {
  // Every finite double is a dyadic rational, so this conversion is exact.
  static Rational from_double(double v) { return Rational(v); }
  static double to_double(const Rational& v) { return v.get_d(); }
  static Rational abs(const Rational& v) { return ::abs(v); }
  static bool is_zero(const Rational& v) { return sgn(v) == 0; }
};

template <typename T>
T from_double(double v) {
  return ScalarTraits<T>::from_double(v);
}

template <typename T>
double to_double(const T& v) {
  return ScalarTraits<T>::to_double(v);
}

template <typename T>
T scalar_abs(const T& v) {
  return ScalarTraits<T>::abs(v);
}

template <typename T>
bool scalar_is_zero(const T& v) {
  return ScalarTraits<T>::is_zero(v);
}

template <typename T>
T int_power(const T& base, int exponent) {
  T result = T(1);
  for (int k = 0; k < exponent; ++k) result *= base;
  return result;
}

}  // namespace lyapcert
