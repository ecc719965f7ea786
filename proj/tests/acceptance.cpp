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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.  Each criterion also has a wall-clock budget.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "test_support.hpp"

namespace {

using namespace lyapcert;
using testing::P;
using testing::var;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    if (pass) detail.clear();
    if (!detail.empty()) detail += "; ";
    detail += what;
    pass = false;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// 1. p = 4x²−4x+1 on [0,1] at δ = 2.
Outcome shifted_square() {
  Outcome o;
  const P x = var(1, 0);
  const P p = 4.0 * x * x - 4.0 * x + P::constant(1, 1.0);
  const Box unit = Box::cube(1, 0, 1);
  const double l1 = lower_bound(p, unit, RelaxMethod::lp1(MultiIndex{2}));
  const double l2 = lower_bound(p, unit, RelaxMethod::lp2(MultiIndex{2}));
  o.detail = "LP1=" + fmt(l1) + " LP2=" + fmt(l2);
  o.require(std::abs(l1 + 1.0) <= 1e-6, "LP1 " + fmt(l1) + " != -1");
  o.require(std::abs(l2) <= 1e-6, "LP2 " + fmt(l2) + " != 0");
  return o;
}

// 2. p = x²+y² on [−1,1]² at δ = (2,2).
Outcome sum_of_squares() {
  Outcome o;
  const P x = var(2, 0), y = var(2, 1);
  const P p = x * x + y * y;
  const Box box = Box::cube(2, -1, 1);
  const MultiIndex d{2, 2};
  const double l1 = lower_bound(p, box, RelaxMethod::lp1(d));
  const double l2 = lower_bound(p, box, RelaxMethod::lp2(d));
  const double l3 = lower_bound(p, box, RelaxMethod::lp3(d, RecurrenceLevels::Full));
  o.detail = "LP1=" + fmt(l1) + " LP2=" + fmt(l2) + " LP3(full)=" + fmt(l3);
  o.require(std::abs(l1 + 2.0) <= 1e-6, "LP1 " + fmt(l1) + " != -2");
  o.require(std::abs(l2 + 0.5) <= 1e-6, "LP2 " + fmt(l2) + " != -0.5");
  o.require(std::abs(l3) <= 1e-6, "LP3 " + fmt(l3) + " != 0");
  return o;
}

// 3. LP1 ≤ LP2 ≤ LP3 ≤ grid minimum on 100 random polynomials.
Outcome monotone_chain() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> pick_n(1, 2), pick_d(1, 3);
  int violations = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = static_cast<std::size_t>(pick_n(rng));
    std::vector<int> deg(n);
    for (int& d : deg) d = pick_d(rng);
    P p(n);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    for (const MultiIndex& I : monomial_basis(n, MultiIndex(deg))) p.add_term(I, c(rng));
    const Box box = Box::cube(n, -1.0, 1.0);
    const MultiIndex delta(deg);
    const double l1 = lower_bound(p, box, RelaxMethod::lp1(delta));
    const double l2 = lower_bound(p, box, RelaxMethod::lp2(delta));
    const double l3 = lower_bound(p, box, RelaxMethod::lp3(delta));
    const double g = testing::grid_minimum(p, box, 200);
    if (!(l1 <= l2 + 1e-7 && l2 + 1e-7 <= l3 + 2e-7 && l3 + 2e-7 <= g + 1e-6)) {
      ++violations;
      o.require(false, "case " + std::to_string(t) + ": " + fmt(l1) + " " + fmt(l2) + " " + fmt(l3) + " " + fmt(g));
    }
  }
  if (o.pass) o.detail = "100 polynomials, 0 violations";
  return o;
}

// 4. Handelman: a cubic over a triangle at D=3; x² on [−1,1] at D = 1..4.
Outcome handelman_pair() {
  Outcome o;
  const P a = var(2, 0), b = var(2, 1), one = P::constant(2, 1.0);
  const P p = -2.0 * a.pow(3) + 6.0 * a * a * b + 7.0 * a * a - 6.0 * a * b * b - 14.0 * a * b + 2.0 * b.pow(3) +
              7.0 * b * b - 9.0 * one;
  const P f1 = a - b - 3.0 * one, f2 = b - a - one;
  const CertifyOutcome ex = handelman_lp(p, {f1, f2}, 3);
  o.require(ex.certified(), "example polynomial not certified at D=3");
  if (ex.certified()) {
    const CheckReport rep = check_certificate(p, *ex.certificate);
    o.require(rep.ok && rep.residual <= 1e-8, "reconstruction residual " + fmt(rep.residual));
    o.detail = "reconstruction residual " + fmt(rep.residual);
  }
  const P x = var(1, 0), u = P::constant(1, 1.0);
  for (int D = 1; D <= 4; ++D)
    o.require(!handelman_lp(x * x, {u - x, u + x}, D).certified(), "x^2 certified at D=" + std::to_string(D));
  if (o.pass) o.detail += "; x^2 has no representation for D=1..4";
  return o;
}

// Found, 10,000-sample soundness and independent certificate recheck.
void require_valid(Outcome& o, const std::string& name, const LyapunovResult& r, const SystemSpec& s) {
  o.require(r.found(), name + " not found (" + to_string(r.status) + ")");
  if (!r.found()) return;
  const SoundnessReport sr = sample_soundness(r, s.system, s.region);
  o.require(sr.ok() && sr.samples == 10000, name + " fails sampling");
  const CheckReport c = verify_lyapunov_certificates(r, s.system);
  o.require(c.ok, name + " certificate recheck: " + c.reason);
}

// 5. The three small systems under default escalation.
Outcome small_systems() {
  Outcome o;
  std::string found;
  for (const char* name : {"cubic_damping", "cubic_pair", "quintic_coupling"}) {
    const SystemSpec s = testing::load_system(std::string("systems/") + name + ".ode");
    const LyapunovResult r = escalate(LyapunovQuery::with_defaults(s.system, s.region));
    require_valid(o, name, r, s);
    if (r.found()) found += std::string(found.empty() ? "" : ", ") + name + " at " + r.method;
  }
  const SystemSpec damping = testing::load_system("systems/cubic_damping.ode");
  LyapunovQuery q = LyapunovQuery::with_defaults(damping.system, damping.region);
  q.method = RelaxMethod::lp3();
  q.split_axes = {0};
  const LyapunovResult r = synthesize(q);
  require_valid(o, "cubic_damping lp3 x-split", r, damping);
  if (r.found()) {
    const double lead = r.V.coeff(MultiIndex{2, 0});
    const double xy = r.V.coeff(MultiIndex{1, 1}) / lead, yy = r.V.coeff(MultiIndex{0, 2}) / lead;
    o.require(std::abs(xy - 1.0) <= 0.05 && std::abs(yy - 0.5) <= 0.05 * 0.5,
              "normalized V = x^2 + " + fmt(xy) + "xy + " + fmt(yy) + "y^2");
    if (o.pass) o.detail = found + "; normalized V = x^2 + " + fmt(xy) + "xy + " + fmt(yy) + "y^2";
  }
  return o;
}

// 6. Benchmarks 1–12.
Outcome benchmark_suite() {
  Outcome o;
  std::ostringstream summary;
  for (int k = 1; k <= 12; ++k) {
    char name[8];
    std::snprintf(name, sizeof name, "bm%02d", k);
    const SystemSpec s = testing::load_system(std::string("systems/") + name + ".ode");
    LyapunovQuery q = LyapunovQuery::with_defaults(s.system, s.region);
    q.time_limit_s = 30.0;
    const auto t0 = std::chrono::steady_clock::now();
    const LyapunovResult r = escalate(q);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Only benchmark 8 may end NotFound, and only honestly (no certificates).
    if (k == 8 && !r.found()) {
      o.require(r.certificates.empty(), std::string(name) + " reported certificates without Found");
    } else {
      require_valid(o, name, r, s);
    }
    summary << (k > 1 ? ", " : "") << name << ' ' << (r.found() ? r.method : to_string(r.status)) << ' '
            << fmt(sec) << 's';
  }
  if (o.pass) o.detail = summary.str();
  else o.detail += " [" + summary.str() + "]";
  return o;
}

// 7. Bernstein property suite.
Outcome bernstein_properties() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::size_t checks = 0;
  // representation identity
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 3;
    const P p = testing::random_polynomial(rng, n, 1 + t % 3);
    const MultiIndex delta(std::vector<int>(n, 3));
    const auto b = bernstein_coeffs(p, delta);
    o.require(b.size() == IndexGrid(delta).size(), "coefficient count");
    for (int s = 0; s < 20; ++s, ++checks) {
      const auto x = testing::random_point(rng, Box::cube(n, 0, 1));
      o.require(std::abs(eval_bernstein(b, x) - evaluate(p, x)) <= 1e-9, "representation identity");
    }
  }
  // unit partition, bound sharpness, recurrence identity
  for (const MultiIndex& d : {MultiIndex{4}, MultiIndex{3, 2}, MultiIndex{2, 3, 2}}) {
    const IndexGrid grid(d);
    const auto rec = recurrence_constraints(d, RecurrenceLevels::Full);
    for (int s = 0; s < 50; ++s) {
      const auto x = testing::random_point(rng, Box::cube(d.size(), 0, 1));
      double sum = 0.0;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double v = eval_basis(grid.index(k), d, x);
        o.require(v <= basis_value_bound(grid.index(k), d) + 1e-12, "bound sharpness");
        sum += v;
        ++checks;
      }
      o.require(std::abs(sum - 1.0) <= 1e-12, "unit partition");
      for (const auto& c : rec) {
        const double lhs = eval_basis(c.index, c.low_degree, x);
        const double rhs = c.coeff_a() * eval_basis(c.high_index_a(), c.high_degree(), x) +
                           c.coeff_b() * eval_basis(c.high_index_b(), c.high_degree(), x);
        o.require(std::abs(lhs - rhs) <= 1e-12, "recurrence identity");
        ++checks;
      }
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const MultiIndex I = grid.index(k);
      std::vector<double> peak(d.size());
      for (std::size_t l = 0; l < d.size(); ++l) peak[l] = static_cast<double>(I[l]) / d[l];
      o.require(std::abs(eval_basis(I, d, peak) - basis_value_bound(I, d)) <= 1e-12, "bound attained at I/delta");
    }
  }
  // enclosure soundness
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + t % 3;
    const P p = testing::random_polynomial(rng, n, 3);
    const Box box = testing::random_box(rng, n);
    const auto [lo, hi] = enclosure(p, box, MultiIndex(std::vector<int>(n, 3)));
    for (int s = 0; s < 1000; ++s, ++checks) {
      const double v = evaluate(p, testing::random_point(rng, box));
      o.require(v >= lo - 1e-9 && v <= hi + 1e-9, "enclosure soundness");
    }
  }
  if (o.pass) o.detail = std::to_string(checks) + " checks, 0 violations";
  return o;
}

// 8. Generator: 10 seeds, residual, equilibrium, LP2 synthesis on 4 boxes.
Outcome generator() {
  Outcome o;
  int found = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    BenchSpec spec;
    spec.seed = seed;
    const GeneratedBenchmark g = generate(spec);
    worst = std::max(worst, g.residual);
    o.require(g.residual <= 1e-9, "seed " + std::to_string(seed) + " residual " + fmt(g.residual));
    o.require(g.system.has_equilibrium_at_origin(), "seed " + std::to_string(seed) + " F(0) != 0");
    LyapunovQuery q = LyapunovQuery::with_defaults(g.system, Box::cube(2, -1, 1));
    q.method = RelaxMethod::lp2();
    const LyapunovResult r = synthesize(q);
    if (r.found() && r.cells == 4) ++found;
  }
  o.require(found >= 8, "only " + std::to_string(found) + "/10 found");
  if (o.pass) o.detail = "max residual " + fmt(worst) + ", LP2 found " + std::to_string(found) + "/10";
  return o;
}

// 9. LP1 under degree elevation for x²+y² on [−1,1]².
Outcome degree_elevation() {
  Outcome o;
  const P x = var(2, 0), y = var(2, 1);
  double prev = -kInfinity;
  std::string vals;
  for (int k : {2, 4, 8, 16}) {
    const double l = lower_bound(x * x + y * y, Box::cube(2, -1, 1), RelaxMethod::lp1(MultiIndex{k, k}));
    o.require(l >= prev - 1e-12, "decrease at delta=" + std::to_string(k));
    o.require(l <= 1e-12, "bound above the true minimum 0");
    prev = l;
    vals += (vals.empty() ? "" : ", ") + fmt(l);
  }
  o.require(prev >= -0.3, "bound at (16,16) is " + fmt(prev));
  if (o.pass) o.detail = "LP1 at delta 2,4,8,16: " + vals;
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "(2x-1)^2 on [0,1]", 1.0, shifted_square},
      {2, "x^2+y^2 on [-1,1]^2", 1.0, sum_of_squares},
      {3, "relaxation chain on random polynomials", 60.0, monotone_chain},
      {4, "Handelman pair", 10.0, handelman_pair},
      {5, "Lyapunov synthesis on the small systems", 30.0, small_systems},
      {6, "benchmarks 1-12", 600.0, benchmark_suite},
      {7, "Bernstein property suite", 60.0, bernstein_properties},
      {8, "benchmark generator", 120.0, generator},
      {9, "degree-elevation convergence", 10.0, degree_elevation},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (sec > c.budget_s) {
      o.pass = false;
      o.detail += "; took " + fmt(sec) + "s over the " + fmt(c.budget_s) + "s budget";
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %d: %s (%.2fs) - %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, sec,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
