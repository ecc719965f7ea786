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

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace lyapcert {
namespace {

using testing::P;
using testing::var;

TEST(GenV1, DiagonalForms) {
  const P x = var(2, 0), y = var(2, 1);
  EXPECT_EQ(diagonal_form({1.0, 1.0}, v1_power(V1Form::QuadDiag)), x * x + y * y);
  EXPECT_EQ(diagonal_form({1.0, 1.0}, v1_power(V1Form::QuarticDiag)), x.pow(4) + y.pow(4));
}

TEST(GenV1, PositiveDefinite) {
  BenchRng rng(4);
  for (const V1Form form : {V1Form::QuadDiag, V1Form::QuarticDiag}) {
    BenchSpec spec;
    spec.n = 3;
    spec.v1_form = form;
    const P v = gen_v1(spec, rng);
    EXPECT_EQ(evaluate(v, {0.0, 0.0, 0.0}), 0.0);
    for (int s = 0; s < 100; ++s) {
      auto p = testing::random_point(rng, Box::cube(3, -1, 1));
      EXPECT_GT(evaluate(v, p), 0.0);
    }
  }
}

TEST(GenV2, PositiveAwayFromOrigin) {
  EXPECT_EQ(diagonal_form({2.0, 2.0}, 2), 2.0 * var(2, 0) * var(2, 0) + 2.0 * var(2, 1) * var(2, 1));
  BenchRng rng(5);
  for (int t = 0; t < 10; ++t) {
    const P v = gen_v2(2, rng, t % 2 ? V1Form::QuarticDiag : V1Form::QuadDiag);
    EXPECT_EQ(evaluate(v, {0.0, 0.0}), 0.0);
    const int m = 100;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double a = -1.0 + 2.0 * i / (m - 1), b = -1.0 + 2.0 * j / (m - 1);
        EXPECT_GT(evaluate(v, {a, b}), 0.0);
      }
  }
}

TEST(SolveField, Examples) {
  const P x = var(2, 0), y = var(2, 1);
  const auto a = solve_field(x * x + y * y, 2.0 * x * x + 2.0 * y * y, 1);
  ASSERT_TRUE(a);
  EXPECT_LE(max_coeff_diff((*a)[0], -x), 1e-12);
  EXPECT_LE(max_coeff_diff((*a)[1], -y), 1e-12);

  const auto b = solve_field(x.pow(4) + y.pow(4), 4.0 * x.pow(4) + 4.0 * y.pow(4), 1);
  ASSERT_TRUE(b);
  EXPECT_LE(max_coeff_diff((*b)[0], -x), 1e-12);
  EXPECT_LE(max_coeff_diff((*b)[1], -y), 1e-12);

  EXPECT_FALSE(solve_field(x * x + y * y, x, 3));
}

TEST(Generate, SucceedsAndSatisfiesIdentity) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    BenchSpec spec;
    spec.seed = seed;
    const GeneratedBenchmark g = generate(spec);
    EXPECT_LE(g.residual, 1e-9);
    EXPECT_LE(field_residual(g.V1, g.V2, g.system), 1e-9);
    EXPECT_TRUE(g.system.has_equilibrium_at_origin());
    EXPECT_LE(g.system.max_degree(), spec.field_degree);
    EXPECT_LE(g.tries, spec.max_tries);
  }
}

TEST(Generate, Deterministic) {
  for (const V1Form form : {V1Form::QuadDiag, V1Form::QuarticDiag}) {
    BenchSpec spec;
    spec.v1_form = form;
    spec.seed = 2;
    const GeneratedBenchmark a = generate(spec), b = generate(spec);
    EXPECT_EQ(a.system, b.system);
    EXPECT_EQ(a.V1, b.V1);
    EXPECT_EQ(a.V2, b.V2);
    EXPECT_LE(a.residual, 1e-9);
    spec.seed = 3;
    EXPECT_FALSE(generate(spec).system == a.system);
  }
}

TEST(Generate, HiddenCertificateHolds) {
  BenchSpec spec;
  spec.n = 3;
  spec.seed = 9;
  const GeneratedBenchmark g = generate(spec);
  const Box box = Box::cube(3, -1, 1);
  std::mt19937_64 rng(1);
  const P dV = lie_derivative(g.V1, g.system);
  for (int s = 0; s < 10000; ++s) {
    const auto p = testing::random_point(rng, box);
    double r2 = 0.0;
    for (double v : p) r2 += v * v;
    ASSERT_GT(evaluate(g.V1, p), 0.0);
    ASSERT_LE(evaluate(dV, p), -0.5 * r2 + 1e-12);
  }
}

TEST(Generate, HiddenFunctionIsFoundBySynthesis) {
  BenchSpec spec;
  spec.seed = 2;
  const GeneratedBenchmark g = generate(spec);
  LyapunovQuery q = LyapunovQuery::with_defaults(g.system, Box::cube(2, -1, 1));
  q.method = RelaxMethod::lp2();
  const LyapunovResult r = synthesize(q);
  EXPECT_TRUE(r.found()) << r.failure;
}

TEST(Generate, QuarticV2LiesInTheFieldImage) {
  BenchRng rng(6);
  for (int t = 0; t < 20; ++t) {
    const P v = gen_v2(3, rng, V1Form::QuarticDiag);
    for (const auto& [I, c] : v.terms())
      EXPECT_TRUE(std::any_of(I.begin(), I.end(), [](int e) { return e >= 3; }));
  }
}

TEST(Generate, ExhaustionIsAResourceError) {
  BenchSpec spec;
  spec.field_degree = 1;
  spec.max_tries = 3;
  EXPECT_THROW(static_cast<void>(generate(spec)), ResourceLimitError);
}

TEST(Generate, RejectsBadSpecs) {
  BenchSpec spec;
  spec.n = 1;
  EXPECT_THROW(static_cast<void>(generate(spec)), DomainError);
  spec.n = 2;
  spec.field_degree = 0;
  EXPECT_THROW(static_cast<void>(generate(spec)), DomainError);
}

}  // namespace
}  // namespace lyapcert
