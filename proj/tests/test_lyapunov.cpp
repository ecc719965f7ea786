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

OdeSystem linear2() { return OdeSystem({-var(2, 0), -var(2, 1)}); }

OdeSystem cubic_damping() {
  const P x = var(2, 0), y = var(2, 1);
  return OdeSystem({-x.pow(3) + y, -x - y});
}

OdeSystem cubic_pair() {
  const P x = var(2, 0), y = var(2, 1);
  return OdeSystem({-x.pow(3) - y * y, x * y - y.pow(3)});
}

LyapunovQuery query(OdeSystem sys, RelaxMethod m, std::vector<std::size_t> split) {
  LyapunovQuery q = LyapunovQuery::with_defaults(std::move(sys), Box::cube(2, -1.0, 1.0));
  q.method = std::move(m);
  q.split_axes = std::move(split);
  return q;
}

void expect_sound(const LyapunovResult& r, const OdeSystem& sys, const Box& region) {
  ASSERT_TRUE(r.found());
  const SoundnessReport s = sample_soundness(r, sys, region);
  EXPECT_EQ(s.samples, 10000u);
  EXPECT_TRUE(s.ok()) << s.positivity_violations << " positivity, " << s.decrease_violations << " decrease";
  const CheckReport c = verify_lyapunov_certificates(r, sys);
  EXPECT_TRUE(c.ok) << c.reason;
}

TEST(Template, Examples) {
  const auto t2 = make_template(2, 2);
  EXPECT_EQ(t2.monomials, (std::vector<MultiIndex>{MultiIndex{2, 0}, MultiIndex{1, 1}, MultiIndex{0, 2}}));
  EXPECT_EQ(t2.num_params(), 3u);
  EXPECT_EQ(make_template(2, 4).num_params(), 12u);
  EXPECT_EQ(make_template(3, 2).num_params(), 6u);
}

TEST(Template, VanishesAtOrigin) {
  std::mt19937_64 rng(1);
  for (std::size_t n = 1; n <= 4; ++n)
    for (int deg = 2; deg <= 4; ++deg) {
      const auto t = make_template(n, deg);
      for (int s = 0; s < 5; ++s) {
        Eigen::VectorXd c(static_cast<Eigen::Index>(t.num_params()));
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = std::uniform_real_distribution<double>(-9, 9)(rng);
        EXPECT_EQ(evaluate(t.instantiate(c), std::vector<double>(n, 0.0)), 0.0);
      }
    }
}

TEST(OrthantCells, Examples) {
  const Box sq = Box::cube(2, -1.0, 1.0);
  EXPECT_EQ(orthant_cells(sq, {0, 1}).size(), 4u);
  const auto two = orthant_cells(sq, {0});
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0], Box({-1.0, -1.0}, {0.0, 1.0}));
  EXPECT_EQ(two[1], Box({0.0, -1.0}, {1.0, 1.0}));
  EXPECT_EQ(orthant_cells(Box::cube(3, -1.0, 1.0), {0, 1, 2}).size(), 8u);
  EXPECT_EQ(orthant_cells(sq, {}).size(), 1u);
}

TEST(EncodeCell, LinearSystemReducesToDiagonalBounds) {
  const auto tmpl = ParametricPolynomial::identity(2, {MultiIndex{2, 0}, MultiIndex{0, 2}});
  const CellEncoding enc =
      encode_cell(tmpl, Box::cube(2, 0.0, 1.0), linear2(), RelaxMethod::lp1(), MultiIndex{2, 2}, 0.1);
  ASSERT_EQ(enc.G.rows(), 9);
  bool saw_x = false, saw_y = false;
  for (Eigen::Index i = 0; i < enc.G.rows(); ++i) {
    const double a = enc.G(i, 0), b = enc.G(i, 1), g = enc.g0(i);
    if (a == 0 && b == 0) {
      EXPECT_EQ(g, 0.0);
    } else if (b == 0) {
      EXPECT_DOUBLE_EQ(a, 2.0);
      EXPECT_DOUBLE_EQ(g, -0.1);
      saw_x = true;
    } else if (a == 0) {
      EXPECT_DOUBLE_EQ(b, 2.0);
      EXPECT_DOUBLE_EQ(g, -0.1);
      saw_y = true;
    } else {
      // the corner (2,2) row is the sum of the two bounds
      EXPECT_DOUBLE_EQ(a, 2.0);
      EXPECT_DOUBLE_EQ(b, 2.0);
      EXPECT_DOUBLE_EQ(g, -0.2);
    }
  }
  EXPECT_TRUE(saw_x && saw_y);
}

TEST(EncodeCell, ZeroShiftAdmitsZeroCandidate) {
  const auto tmpl = ParametricPolynomial::identity(2, {MultiIndex{2, 0}});
  for (const Box& cell : orthant_cells(Box::cube(2, -1, 1), {0, 1})) {
    const CellEncoding enc = encode_cell(tmpl, cell, linear2(), RelaxMethod::lp1(), MultiIndex{2, 2}, 0.0);
    EXPECT_GE(enc.coefficients(Eigen::VectorXd::Zero(1)).minCoeff(), 0.0);
  }
}

TEST(EncodeCell, RejectsLowDegree) {
  const auto tmpl = make_template(2, 2);
  EXPECT_THROW(static_cast<void>(encode_cell(tmpl, Box::cube(2, 0, 1), cubic_damping(), RelaxMethod::lp1(),
                                             MultiIndex{2, 2}, 0.1)),
               DomainError);
}

// The joint LP over (c, λ) for the cells of a query, without the objective.
LinearProgram joint_system(const std::vector<CellEncoding>& cells, std::size_t K, double bound) {
  LinearProgram lp;
  std::vector<std::size_t> cvars;
  for (std::size_t k = 0; k < K; ++k) cvars.push_back(lp.add_variable(-bound, bound));
  for (const auto& enc : cells) enc.append_to(lp, cvars);
  return lp;
}

std::vector<CellEncoding> encode_all(const OdeSystem& sys, const RelaxMethod& m, double eps,
                                     const std::vector<std::size_t>& split) {
  const auto tmpl = make_template(sys.n(), 2);
  const ParametricTarget target = make_target(tmpl, sys, eps, 1);
  std::vector<CellEncoding> out;
  for (const Box& cell : orthant_cells(Box::cube(sys.n(), -1, 1), split))
    out.push_back(encode_cell(target, cell, m, target.degree));
  return out;
}

TEST(EncodeCell, CubicDampingIsFeasible) {
  const auto cells = encode_all(cubic_damping(), RelaxMethod::lp3(), 0.1, {0});
  LinearProgram lp = joint_system(cells, 3, 5.0);
  EXPECT_EQ(solve(lp).status, LpStatus::Optimal);
}

TEST(EncodeCell, FeasiblePointsScale) {
  for (const RelaxMethod& m : {RelaxMethod::lp1(), RelaxMethod::lp2()}) {
    const auto cells = encode_all(cubic_damping(), m, 0.0, {0, 1});
    LinearProgram lp = joint_system(cells, 3, 5.0);
    lp.set_objective(0, 1.0);
    lp.set_sense(Sense::Maximize);
    const LpOutcome out = solve(lp);
    ASSERT_EQ(out.status, LpStatus::Optimal);
    ASSERT_LE(lp.max_violation(out.solution), 1e-9);
    const double cmax = std::max({std::abs(out.solution[0]), std::abs(out.solution[1]), std::abs(out.solution[2])});
    for (double t : {0.25, 0.5, 5.0 / cmax}) {
      std::vector<double> scaled = out.solution;
      for (double& v : scaled) v *= t;
      EXPECT_LE(lp.max_violation(scaled), 1e-9 * std::max(1.0, t)) << m.name() << " t=" << t;
    }
  }
}

TEST(Synthesize, CubicDampingLp3SplitX) {
  const LyapunovResult r = synthesize(query(cubic_damping(), RelaxMethod::lp3(), {0}));
  ASSERT_TRUE(r.found()) << r.failure;
  EXPECT_EQ(r.cells, 2u);
  const double lead = r.V.coeff(MultiIndex{2, 0});
  EXPECT_NEAR(r.V.coeff(MultiIndex{1, 1}) / lead, 1.0, 0.05);
  EXPECT_NEAR(r.V.coeff(MultiIndex{0, 2}) / lead, 0.5, 0.05);
  expect_sound(r, cubic_damping(), Box::cube(2, -1, 1));
}

TEST(Synthesize, LinearSystemHitsCoefficientBound) {
  LyapunovQuery q = query(linear2(), RelaxMethod::lp1(), {0, 1});
  const LyapunovResult r = synthesize(q);
  ASSERT_TRUE(r.found());
  EXPECT_EQ(r.cells, 4u);
  EXPECT_NEAR(r.V.coeff(MultiIndex{2, 0}), 5.0, 1e-9);
  EXPECT_NEAR(r.V.coeff(MultiIndex{0, 2}), 5.0, 1e-9);
  expect_sound(r, linear2(), q.region);
}

// −V′ for V = x²+y² is 2x⁴+2y⁴, which no ε·(x²+y²) fits under near 0; the
// quartic shift works.
TEST(Synthesize, CubicPairNeedsQuarticShift) {
  LyapunovQuery q = query(cubic_pair(), RelaxMethod::lp3(), {0, 1});
  EXPECT_FALSE(synthesize(q).found());
  q.shift_power = 2;
  const LyapunovResult r = synthesize(q);
  ASSERT_TRUE(r.found()) << r.failure;
  EXPECT_EQ(r.cells, 4u);
  const double lead = r.V.coeff(MultiIndex{2, 0});
  EXPECT_NEAR(r.V.coeff(MultiIndex{0, 2}) / lead, 1.0, 0.05);
  EXPECT_NEAR(r.V.coeff(MultiIndex{1, 1}) / lead, 0.0, 0.05);
  expect_sound(r, cubic_pair(), q.region);
}

TEST(Synthesize, RoutesAgree) {
  for (const RelaxMethod& m : {RelaxMethod::lp1(), RelaxMethod::lp2(), RelaxMethod::lp3()}) {
    LyapunovQuery q = query(cubic_damping(), m, {0, 1});
    q.route = SolveRoute::Joint;
    const LyapunovResult a = synthesize(q);
    q.route = SolveRoute::CuttingPlane;
    const LyapunovResult b = synthesize(q);
    EXPECT_EQ(a.status, b.status) << m.name();
    if (a.found() && b.found()) {
      EXPECT_LE(max_coeff_diff(a.V, b.V), 1e-6) << m.name();
    }
  }
}

TEST(Synthesize, RadialSchemeCertifiesLinearSystem) {
  LyapunovQuery q = query(linear2(), RelaxMethod::lp1(), {0, 1});
  q.scheme = CellScheme::Radial;
  const LyapunovResult r = synthesize(q);
  EXPECT_EQ(r.cells, 8u);
  ASSERT_EQ(r.cell_facets.size(), r.certificates.size());
  expect_sound(r, linear2(), q.region);
  EXPECT_TRUE(verify_lyapunov_certificates(r, linear2(), true).ok);
}

TEST(Synthesize, UnstableSystemIsNotFound) {
  const P x = var(1, 0);
  const OdeSystem grow({x});
  LyapunovQuery q = LyapunovQuery::with_defaults(grow, Box::cube(1, -1, 1));
  const LyapunovResult r = escalate(q);
  EXPECT_FALSE(r.found());
  EXPECT_TRUE(r.certificates.empty());
  EXPECT_GE(r.diagnostics.size(), default_schedule().size());
}

TEST(Synthesize, RejectsBadQueries) {
  LyapunovQuery q = query(linear2(), RelaxMethod::lp1(), {0, 1});
  q.template_degree = 1;
  EXPECT_THROW(static_cast<void>(synthesize(q)), DomainError);
  q = query(linear2(), RelaxMethod::interval(), {0});
  EXPECT_THROW(static_cast<void>(synthesize(q)), DomainError);
  q = query(linear2(), RelaxMethod::lp1(), {5});
  EXPECT_THROW(static_cast<void>(synthesize(q)), DimensionError);
}

TEST(Synthesize, CertificatesRejectTampering) {
  const LyapunovResult r = synthesize(query(cubic_damping(), RelaxMethod::lp2(), {0, 1}));
  ASSERT_TRUE(r.found());
  LyapunovResult bad = r;
  bad.certificates[0].multipliers[0] += 1e-4;
  EXPECT_FALSE(verify_lyapunov_certificates(bad, cubic_damping()).ok);
  bad = r;
  bad.V.add_term(MultiIndex{1, 1}, 1e-4);
  EXPECT_FALSE(verify_lyapunov_certificates(bad, cubic_damping()).ok);
}

// LP1 success implies LP2 success at the same degree.
TEST(SynthesizeProperty, MonotoneInRelaxation) {
  std::vector<OdeSystem> systems = {linear2(), cubic_damping()};
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    BenchSpec spec;
    spec.seed = seed;
    systems.push_back(generate(spec).system);
  }
  for (const auto& sys : systems) {
    for (const std::vector<std::size_t>& split : {std::vector<std::size_t>{0}, std::vector<std::size_t>{0, 1}}) {
      const LyapunovResult r1 = synthesize(query(sys, RelaxMethod::lp1(), split));
      if (!r1.found()) continue;
      const LyapunovResult r2 = synthesize(query(sys, RelaxMethod::lp2(), split));
      EXPECT_TRUE(r2.found()) << r2.failure;
    }
  }
}

TEST(PositiveDefinite, Examples) {
  const P x = var(2, 0), y = var(2, 1);
  const Box sq = Box::cube(2, -1, 1);
  EXPECT_TRUE(check_positive_definite(x * x + y * y, sq, 0.1).passed);
  const PositivityReport a = check_positive_definite(x * x - y * y, sq, 0.1);
  ASSERT_FALSE(a.passed);
  ASSERT_TRUE(a.witness);
  EXPECT_LT(evaluate(x * x - y * y, *a.witness), 0.0);
  EXPECT_LT(std::abs((*a.witness)[0]), std::abs((*a.witness)[1]));
  EXPECT_FALSE(check_positive_definite(x * y, sq, 0.1).passed);
  // Positive definite but with a mixed term the orthant expansion cannot see.
  EXPECT_TRUE(check_positive_definite(x * x + 1.8 * x * y + y * y, sq, 0.01).passed);
}

TEST(RadialBlowup, MatchesScaledEvaluation) {
  std::mt19937_64 rng(31);
  const P x = var(2, 0), y = var(2, 1);
  const P V = 3.0 * x * x - x * y + 2.0 * y.pow(3) + x.pow(4);
  for (const Facet f : {Facet{0, -1.0}, Facet{1, 1.0}}) {
    const P h = radial_blowup(V, f, 2);
    for (int s = 0; s < 50; ++s) {
      const double r = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
      std::vector<double> phi = testing::random_point(rng, Box::cube(2, -1, 1));
      phi[f.axis] = f.value;
      std::vector<double> arg = {r * phi[0], r * phi[1]};
      std::vector<double> hp = phi;
      hp[f.axis] = r;
      EXPECT_NEAR(evaluate(h, hp) * r * r, evaluate(V, arg), 1e-12);
    }
  }
  EXPECT_THROW(static_cast<void>(radial_blowup(x, Facet{0, 1.0}, 2)), DomainError);
}

TEST(Escalation, FirstStageSucceedsOnLinearSystem) {
  const LyapunovResult r = escalate(LyapunovQuery::with_defaults(linear2(), Box::cube(2, -1, 1)));
  ASSERT_TRUE(r.found());
  EXPECT_EQ(r.method, default_schedule().front().label());
  EXPECT_TRUE(r.strong);
}

TEST(Escalation, ScheduleEndsWithWeakStages) {
  const auto s = default_schedule();
  ASSERT_GE(s.size(), 4u);
  EXPECT_EQ(s[0].label(), "lp1");
  EXPECT_EQ(s[1].label(), "lp2");
  EXPECT_EQ(s[2].label(), "lp3");
  EXPECT_TRUE(s.back().epsilon && *s.back().epsilon == 0.0);
  EXPECT_EQ(strong_schedule().size(), 4u);
}

}  // namespace
}  // namespace lyapcert
