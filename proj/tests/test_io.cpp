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

TEST(ParsePolynomial, Examples) {
  const P p = parse_polynomial("4*x1^2 - 4*x1 + 1");
  EXPECT_EQ(p.n(), 1u);
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(p.coeff(MultiIndex{2}), 4.0);
  EXPECT_EQ(p.coeff(MultiIndex{1}), -4.0);
  EXPECT_EQ(p.coeff(MultiIndex{0}), 1.0);

  EXPECT_TRUE(parse_polynomial("x1*x2 - x2*x1").is_zero());

  const P e = parse_polynomial("-2*x1^3+6*x1^2*x2+7*x1^2-6*x1*x2^2-14*x1*x2+2*x2^3+7*x2^2-9");
  EXPECT_EQ(e.size(), 8u);
  EXPECT_EQ(e.coeff(MultiIndex{2, 1}), 6.0);
  EXPECT_EQ(e.coeff(MultiIndex{0, 0}), -9.0);
}

TEST(ParsePolynomial, Syntax) {
  const P x = var(2, 0), y = var(2, 1);
  EXPECT_EQ(parse_polynomial("x^2 + 2xy + y**2", 2), x * x + 2.0 * x * y + y * y);
  EXPECT_EQ(parse_polynomial("(x - y)^2", 2), x * x - 2.0 * x * y + y * y);
  EXPECT_EQ(parse_polynomial("-x/4 + 1.5e1*y", 2), -0.25 * x + 15.0 * y);
  EXPECT_EQ(parse_polynomial("3 x y", 2), 3.0 * x * y);
  EXPECT_THROW(static_cast<void>(parse_polynomial("x/y", 2)), ParseError);
  EXPECT_THROW(static_cast<void>(parse_polynomial("x^-1", 2)), ParseError);
  EXPECT_THROW(static_cast<void>(parse_polynomial("x^1.5", 2)), ParseError);
  EXPECT_THROW(static_cast<void>(parse_polynomial("x + * y", 2)), ParseError);
  EXPECT_THROW(static_cast<void>(parse_polynomial("q + 1", 2)), ParseError);
  EXPECT_THROW(static_cast<void>(parse_polynomial("x3", 2)), ParseError);
  EXPECT_THROW(static_cast<void>(parse_polynomial("(x + 1", 2)), ParseError);
}

TEST(FormatPolynomial, Layout) {
  const P x = var(2, 0), y = var(2, 1);
  EXPECT_EQ(format_polynomial(5.0 * x * x + 5.0 * x * y + 2.5 * y * y - P::constant(2, 1.0)),
            "5*x1^2 + 5*x1*x2 + 2.5*x2^2 - 1");
  EXPECT_EQ(format_polynomial(x - y, VariableNames({"x", "y"})), "x - y");
  EXPECT_EQ(format_polynomial(P(2)), "0");
  FormatOptions fo;
  fo.prune = 1e-9;
  EXPECT_EQ(format_polynomial(x + 1e-12 * y, {}, fo), "x1");
}

TEST(FormatPolynomial, RoundTripsRandomPolynomials) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 4;
    const P p = testing::random_polynomial(rng, n, 3, 10.0, 0.4);
    const std::string once = format_polynomial(p);
    const P back = parse_polynomial(once, n);
    EXPECT_EQ(back, p) << once;
    EXPECT_EQ(format_polynomial(back), once);
  }
}

TEST(ParseBox, Forms) {
  EXPECT_EQ(parse_box("[0,1]"), Box::cube(1, 0, 1));
  EXPECT_EQ(parse_box("[-1, 1]^3"), Box::cube(3, -1, 1));
  EXPECT_EQ(parse_box("[0,1]x[-1,2]"), Box({0, -1}, {1, 2}));
  EXPECT_THROW(static_cast<void>(parse_box("[1,0]")), ParseError);
  EXPECT_THROW(static_cast<void>(parse_box("[0,1")), ParseError);
}

TEST(ParseSystem, SmallSystems) {
  const P x = var(2, 0), y = var(2, 1);
  const SystemSpec damping = testing::load_system("systems/cubic_damping.ode");
  EXPECT_EQ(damping.system, OdeSystem({-x.pow(3) + y, -x - y}));
  EXPECT_EQ(damping.region, Box::cube(2, -1, 1));
  const SystemSpec quintic = testing::load_system("systems/quintic_coupling.ode");
  EXPECT_EQ(quintic.system,
            OdeSystem({-x - 1.5 * x * x * y.pow(3), -y.pow(3) + 0.5 * x * x * y * y}));
}

TEST(ParseSystem, Grammar) {
  const SystemSpec a = parse_system("vars x y\nx' = -x + y^2 # comment\ny' = -y\n");
  EXPECT_EQ(a.region, Box::cube(2, -1, 1));
  EXPECT_FALSE(a.region_given);
  EXPECT_EQ(a.names, (std::vector<std::string>{"x", "y"}));

  const SystemSpec b = parse_system("vars x1 x2; dx2/dt = -x2; dx1/dt = -x1; region x1 in [-2,1]; region x2 in [-1,3];");
  EXPECT_EQ(b.system, OdeSystem({-var(2, 0), -var(2, 1)}));
  EXPECT_EQ(b.region, Box({-2, -1}, {1, 3}));

  EXPECT_THROW(static_cast<void>(parse_system("vars ;")), ParseError);
  EXPECT_THROW(static_cast<void>(parse_system("vars x y; dx/dt = -x;")), ParseError);
  EXPECT_THROW(static_cast<void>(parse_system("vars x; dx/dt = -x; dx/dt = x;")), ParseError);
  EXPECT_THROW(static_cast<void>(parse_system("vars x; dx/dt = -x; region [-1,1]^2;")), ParseError);
}

TEST(ParseSystem, AllBenchmarkFilesParseAndRoundTrip) {
  const std::pair<const char*, std::size_t> files[] = {
      {"bm01", 2}, {"bm02", 2}, {"bm03", 2}, {"bm04", 2}, {"bm05", 3}, {"bm06", 3}, {"bm07", 3}, {"bm08", 3},
      {"bm09", 3}, {"bm10", 3}, {"bm11", 4}, {"bm12", 4}, {"bm13", 4}, {"bm14", 4}, {"bm15", 4}};
  for (const auto& [name, n] : files) {
    const SystemSpec s = testing::load_system(std::string("systems/") + name + ".ode");
    EXPECT_EQ(s.system.n(), n) << name;
    EXPECT_TRUE(s.system.has_equilibrium_at_origin()) << name;
    const SystemSpec back = parse_system(format_system(s));
    EXPECT_EQ(back.system, s.system) << name;
    EXPECT_EQ(back.region, s.region) << name;
    EXPECT_EQ(system_hash(back), system_hash(s)) << name;
  }
}

TEST(Json, PositivityCertificateRoundTrip) {
  const P p = parse_polynomial("x^2 + y^2 - x*y + 0.5", 2);
  for (const RelaxMethod& m : {RelaxMethod::lp1(), RelaxMethod::lp2(), RelaxMethod::handelman(2)}) {
    const CertifyOutcome out = certify_nonneg(p, Box::cube(2, 0, 1), m, 0.01);
    ASSERT_TRUE(out.certified()) << m.name();
    const Json doc = certificate_document(p, *out.certificate);
    EXPECT_EQ(doc.at("type"), "positivity_certificate");
    const Json reparsed = Json::parse(doc.dump());
    const P q = polynomial_from_json(reparsed.at("polynomial"));
    EXPECT_EQ(q, p);
    const PositivityCertificate c = certificate_from_json(reparsed.at("certificate"));
    EXPECT_EQ(c.bernstein_coeffs, out.certificate->bernstein_coeffs);
    EXPECT_EQ(c.multipliers, out.certificate->multipliers);
    EXPECT_TRUE(check_certificate(q, c).ok) << m.name();
  }
}

TEST(Json, LyapunovResultRoundTrip) {
  const SystemSpec spec = testing::load_system("systems/cubic_damping.ode");
  for (const CellScheme scheme : {CellScheme::Orthant, CellScheme::Radial}) {
    LyapunovQuery q = LyapunovQuery::with_defaults(spec.system, spec.region);
    q.method = RelaxMethod::lp2();
    q.scheme = scheme;
    const LyapunovResult r = synthesize(q);
    ASSERT_TRUE(r.found());
    const Json doc = to_json(r, spec);
    for (const char* key : {"system_hash", "region", "template_degree", "method", "cells", "V", "epsilon",
                            "certificates", "refinements", "timings"})
      EXPECT_TRUE(doc.contains(key)) << key;
    const auto [back, bspec] = lyapunov_result_from_json(Json::parse(doc.dump()));
    EXPECT_EQ(back.V, r.V);
    EXPECT_EQ(back.cell_facets, r.cell_facets);
    EXPECT_EQ(bspec.system, spec.system);
    EXPECT_TRUE(verify_lyapunov_certificates(back, bspec.system).ok);
  }
}

TEST(Report, TextTable) {
  const SystemSpec spec = testing::load_system("systems/cubic_damping.ode");
  LyapunovQuery q = LyapunovQuery::with_defaults(spec.system, spec.region);
  q.method = RelaxMethod::lp3();
  q.split_axes = {0};
  LyapunovResult found = synthesize(q);
  LyapunovResult failed;
  failed.method = "lp1";
  failed.failure = "np";

  const std::string empty = emit_report({}, ReportFormat::Text);
  EXPECT_EQ(std::count(empty.begin(), empty.end(), '\n'), 2);
  EXPECT_NE(empty.find("Relaxation | Lyapunov | #Boxes | Setup | LPTime"), std::string::npos);

  const std::string text = emit_report({{"", found, spec}, {"", failed, spec}}, ReportFormat::Text);
  EXPECT_NE(text.find("5x^2 + 4.95xy + 2.525y^2"), std::string::npos) << text;
  EXPECT_NE(text.find("✗ (np)"), std::string::npos) << text;

  const Json arr = Json::parse(emit_report({{"cubic_damping", found, spec}}, ReportFormat::Json));
  ASSERT_EQ(arr.size(), 1u);
  EXPECT_EQ(arr[0].at("name"), "cubic_damping");
  EXPECT_EQ(arr[0].at("status"), "found");
}

TEST(Numbers, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 2.525, -7e-300, 12345678.0}) EXPECT_EQ(std::stod(format_number(v)), v);
  EXPECT_EQ(format_number(5.0), "5");
}

}  // namespace
}  // namespace lyapcert
