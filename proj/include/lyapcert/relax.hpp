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
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "lyapcert/bernstein.hpp"
#include "lyapcert/errors.hpp"
#include "lyapcert/lp.hpp"
#include "lyapcert/multi_index.hpp"
#include "lyapcert/polynomial.hpp"

namespace lyapcert {

enum class RelaxKind { Interval, Handelman, LP1, LP2, LP3 };

inline const char* to_string(RelaxKind k) {
  switch (k) {
    case RelaxKind::Interval: return "interval";
    case RelaxKind::Handelman: return "handelman";
    case RelaxKind::LP1: return "lp1";
    case RelaxKind::LP2: return "lp2";
    case RelaxKind::LP3: return "lp3";
  }
  return "?";
}

/// Which relaxation to build.  `degree` is the Bernstein expansion degree δ
/// for the LP kinds (defaults to the degree vector of the query);
/// `handelman_degree` is the per-factor exponent cap D.
struct RelaxMethod {
  RelaxKind kind = RelaxKind::LP1;
  std::optional<MultiIndex> degree;
  int handelman_degree = 2;
  RecurrenceLevels levels = RecurrenceLevels::FixedLevel1;
  bool interval_bounds = false;  // RLT: add ℓ_I ≤ y_I ≤ u_I rows

  static RelaxMethod make(RelaxKind k, std::optional<MultiIndex> d = std::nullopt) {
    RelaxMethod m;
    m.kind = k;
    m.degree = std::move(d);
    return m;
  }
  static RelaxMethod interval() { return make(RelaxKind::Interval); }
  static RelaxMethod lp1(std::optional<MultiIndex> d = std::nullopt) { return make(RelaxKind::LP1, std::move(d)); }
  static RelaxMethod lp2(std::optional<MultiIndex> d = std::nullopt) { return make(RelaxKind::LP2, std::move(d)); }
  static RelaxMethod lp3(std::optional<MultiIndex> d = std::nullopt,
                         RecurrenceLevels levels = RecurrenceLevels::FixedLevel1) {
    RelaxMethod m = make(RelaxKind::LP3, std::move(d));
    m.levels = levels;
    return m;
  }
  static RelaxMethod handelman(int D) {
    RelaxMethod m = make(RelaxKind::Handelman);
    m.handelman_degree = D;
    return m;
  }

  bool is_bernstein() const {
    return kind == RelaxKind::LP1 || kind == RelaxKind::LP2 || kind == RelaxKind::LP3;
  }

  std::string name() const {
    std::string s = to_string(kind);
    if (kind == RelaxKind::LP3 && levels == RecurrenceLevels::Full) s += "-full";
    return s;
  }
};

// ---------------------------------------------------------------------------
// Interval baseline

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

inline Interval interval_power(double l, double u, int k) {
  if (k == 0) return {1.0, 1.0};
  const double a = std::pow(l, k);
  const double b = std::pow(u, k);
  if (k % 2 == 1 || l >= 0.0) return {std::min(a, b), std::max(a, b)};
  if (u <= 0.0) return {std::min(a, b), std::max(a, b)};
  return {0.0, std::max(a, b)};
}

inline Interval interval_mul(Interval x, Interval y) {
  const double p[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

/// Each monomial replaced by its exact interval over the box; sum of scaled ranges.
inline std::pair<double, double> interval_bound(const Polynomial<double>& p, const Box& box) {
  if (p.n() != box.dim()) throw DimensionError("box dimension differs from polynomial");
  double lo = 0.0, hi = 0.0;
  for (const auto& [I, c] : p.terms()) {
    Interval t{1.0, 1.0};
    for (std::size_t j = 0; j < I.size(); ++j)
      if (I[j] > 0) t = interval_mul(t, interval_power(box.lower[j], box.upper[j], I[j]));
    if (c >= 0) {
      lo += c * t.lo;
      hi += c * t.hi;
    } else {
      lo += c * t.hi;
      hi += c * t.lo;
    }
  }
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// Bernstein relaxations LP1 / LP2 / LP3 in the z variables

/// Equality rows and per-variable upper bounds of a Bernstein relaxation in
/// scalar type T.  Every variable is ≥ 0; all rows are equalities.
template <typename T>
struct RelaxationData {
  std::vector<std::vector<std::pair<std::size_t, T>>> rows;
  std::vector<T> rhs;
  std::vector<T> upper;  // empty when the variables are unbounded above (LP1)
  std::size_t num_vars = 0;
};

/// Variables: the main block (degree δ, IndexGrid order) followed by the
/// lower-degree blocks of LP3.  Rows: one unit partition per block, then the
/// recurrences.
template <typename T>
RelaxationData<T> relaxation_data(const MultiIndex& delta, RelaxKind kind, RecurrenceLevels levels,
                                  std::vector<MultiIndex>* blocks_out = nullptr,
                                  std::vector<std::size_t>* offsets_out = nullptr) {
  RelaxationData<T> d;
  const auto axes = positive_axes(delta);
  const auto blocks = kind == RelaxKind::LP3 ? relaxation_blocks(delta, levels, axes) : std::vector<MultiIndex>{delta};
  std::map<std::vector<int>, std::size_t> block_of;
  std::vector<IndexGrid> grids;
  std::vector<std::size_t> offsets;
  for (const auto& blk : blocks) {
    block_of.emplace(blk.entries(), grids.size());
    offsets.push_back(d.num_vars);
    grids.emplace_back(blk);
    std::vector<std::pair<std::size_t, T>> sum;
    for (std::size_t k = 0; k < grids.back().size(); ++k) {
      sum.emplace_back(d.num_vars + k, T(1));
      if (kind != RelaxKind::LP1) d.upper.push_back(basis_value_bound<T>(grids.back().index(k), blk));
    }
    d.num_vars += grids.back().size();
    d.rows.push_back(std::move(sum));
    d.rhs.push_back(T(1));
  }
  if (kind == RelaxKind::LP3 && !axes.empty()) {
    for (const auto& rc : recurrence_constraints(delta, levels, axes)) {
      const std::size_t lo = block_of.at(rc.low_degree.entries());
      const std::size_t hi = block_of.at(rc.high_degree().entries());
      const T den = T(rc.denominator);
      d.rows.push_back({{offsets[lo] + grids[lo].linear(rc.index), T(1)},
                        {offsets[hi] + grids[hi].linear(rc.high_index_a()), -T(rc.numerator_a) / den},
                        {offsets[hi] + grids[hi].linear(rc.high_index_b()), -T(rc.numerator_b) / den}});
      d.rhs.push_back(T(0));
    }
  }
  if (blocks_out) *blocks_out = blocks;
  if (offsets_out) *offsets_out = offsets;
  return d;
}

/// The z-polytope of a Bernstein relaxation.  Its Farkas multipliers are
/// indexed by the canonical inequality list A z ≤ b: for each equality row
/// the pair (a·z ≤ b, −a·z ≤ −b), then per variable −z ≤ 0 followed by
/// z ≤ u when bounded.
struct BernsteinRelaxation {
  MultiIndex degree;
  RelaxKind kind = RelaxKind::LP1;
  RecurrenceLevels levels = RecurrenceLevels::FixedLevel1;
  std::vector<MultiIndex> blocks;
  std::vector<std::size_t> offsets;
  std::size_t main_size = 0;
  RelaxationData<double> data;
  LinearProgram lp;

  std::size_t num_inequalities() const { return 2 * data.rows.size() + data.num_vars + data.upper.size(); }

  /// Minimises wᵀz over the main block.
  LpOutcome minimize(const std::vector<double>& w, const LpOptions& opt = {}) const {
    if (w.size() != main_size) throw DimensionError("objective length differs from the Bernstein grid");
    LinearProgram copy = lp;
    for (std::size_t k = 0; k < main_size; ++k) copy.set_objective(k, w[k]);
    return solve(copy, opt);
  }

  /// Farkas multipliers λ ≥ 0 with Aᵀλ ≈ −w built from an optimal outcome.
  std::vector<double> farkas_multipliers(const LpOutcome& out) const {
    std::vector<double> lambda;
    lambda.reserve(num_inequalities());
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      lambda.push_back(std::max(-out.row_duals[i], 0.0));
      lambda.push_back(std::max(out.row_duals[i], 0.0));
    }
    for (std::size_t j = 0; j < data.num_vars; ++j) {
      const double d = out.reduced_costs[j];
      lambda.push_back(std::max(d, 0.0));
      if (!data.upper.empty()) lambda.push_back(std::max(-d, 0.0));
    }
    return lambda;
  }

  /// r = Aᵀλ + w (w zero-padded beyond the main block) and bᵀλ, with the
  /// polytope rebuilt in scalar type T.
  template <typename T>
  std::pair<std::vector<T>, T> farkas_residual(const std::vector<T>& w, const std::vector<T>& lambda) const {
    if (lambda.size() != num_inequalities()) throw DimensionError("multiplier count differs from constraint count");
    const RelaxationData<T> d = relaxation_data<T>(degree, kind, levels);
    std::vector<T> r(d.num_vars, T(0));
    for (std::size_t k = 0; k < main_size; ++k) r[k] = w[k];
    T btl = T(0);
    std::size_t at = 0;
    for (std::size_t i = 0; i < d.rows.size(); ++i, at += 2) {
      const T net = lambda[at] - lambda[at + 1];
      if (scalar_is_zero(net)) continue;
      for (const auto& [j, a] : d.rows[i]) r[j] += a * net;
      btl += d.rhs[i] * net;
    }
    for (std::size_t j = 0; j < d.num_vars; ++j) {
      r[j] -= lambda[at++];
      if (!d.upper.empty()) {
        r[j] += lambda[at];
        btl += d.upper[j] * lambda[at];
        ++at;
      }
    }
    return {std::move(r), btl};
  }
};

namespace detail {

inline std::shared_ptr<const BernsteinRelaxation> build_relaxation(const MultiIndex& delta, RelaxKind kind,
                                                                   RecurrenceLevels levels) {
  auto rel = std::make_shared<BernsteinRelaxation>();
  rel->degree = delta;
  rel->kind = kind;
  rel->levels = levels;
  rel->data = relaxation_data<double>(delta, kind, levels, &rel->blocks, &rel->offsets);
  rel->main_size = IndexGrid(delta).size();
  for (std::size_t j = 0; j < rel->data.num_vars; ++j)
    rel->lp.add_variable(0.0, rel->data.upper.empty() ? kInfinity : rel->data.upper[j]);
  for (std::size_t i = 0; i < rel->data.rows.size(); ++i)
    rel->lp.add_row(rel->data.rows[i], Relation::Equal, rel->data.rhs[i]);
  return rel;
}

}  // namespace detail

/// Cached z-polytope for (δ, kind, levels).
inline std::shared_ptr<const BernsteinRelaxation> bernstein_relaxation(const MultiIndex& delta, RelaxKind kind,
                                                                       RecurrenceLevels levels) {
  if (kind != RelaxKind::LP1 && kind != RelaxKind::LP2 && kind != RelaxKind::LP3)
    throw DomainError("not a Bernstein relaxation kind");
  if (kind != RelaxKind::LP3) levels = RecurrenceLevels::FixedLevel1;
  static std::shared_mutex mutex;
  static std::map<std::tuple<std::vector<int>, int, int>, std::shared_ptr<const BernsteinRelaxation>> cache;
  const auto key = std::make_tuple(delta.entries(), static_cast<int>(kind), static_cast<int>(levels));
  {
    std::shared_lock lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto rel = detail::build_relaxation(delta, kind, levels);
  std::unique_lock lock(mutex);
  return cache.emplace(key, std::move(rel)).first->second;
}

// ---------------------------------------------------------------------------
// Certificates

/// Independently checkable evidence that p ≥ margin on a box (or polyhedron).
struct PositivityCertificate {
  RelaxMethod method;
  Box box;
  double margin = 0.0;
  double tolerance = 1e-9;
  double lower_bound = 0.0;
  std::vector<double> bernstein_coeffs;        // Bernstein kinds, IndexGrid order
  std::vector<double> multipliers;             // Farkas λ (LP2/LP3) or Handelman λ_f
  std::vector<MultiIndex> power_products;      // Handelman exponent vectors
  std::vector<Polynomial<double>> halfspaces;  // Handelman constraints f_k ≥ 0
};

enum class CertifyStatus { Certified, Unknown };

struct CertifyOutcome {
  CertifyStatus status = CertifyStatus::Unknown;
  double lower_bound = -kInfinity;
  std::optional<PositivityCertificate> certificate;
  std::string message;

  bool certified() const { return status == CertifyStatus::Certified; }
};

namespace detail {

inline MultiIndex resolve_degree(const Polynomial<double>& p, const RelaxMethod& m) {
  MultiIndex d = m.degree ? *m.degree : p.degree_vector();
  if (d.size() != p.n()) throw DimensionError("expansion degree has wrong length");
  if (!p.degree_vector().leq(d)) throw DomainError("expansion degree is below the polynomial degree");
  return d;
}

inline std::vector<Polynomial<double>> box_halfspaces(const Box& box) {
  std::vector<Polynomial<double>> h;
  const std::size_t n = box.dim();
  for (std::size_t j = 0; j < n; ++j) {
    h.push_back(Polynomial<double>::variable(n, j) - Polynomial<double>::constant(n, box.lower[j]));
    h.push_back(Polynomial<double>::constant(n, box.upper[j]) - Polynomial<double>::variable(n, j));
  }
  return h;
}

/// All exponent vectors in {0..D}^m, i.e. pp(P, D) with a per-factor cap.
inline std::vector<MultiIndex> power_product_exponents(std::size_t m, int D) {
  return monomial_basis(m, MultiIndex(std::vector<int>(m, D)));
}

inline std::vector<Polynomial<double>> expand_power_products(const std::vector<Polynomial<double>>& hs,
                                                            const std::vector<MultiIndex>& exps,
                                                            std::size_t max_terms) {
  std::vector<std::vector<Polynomial<double>>> powers(hs.size());
  std::vector<Polynomial<double>> out;
  out.reserve(exps.size());
  std::size_t total = 0;
  for (const auto& e : exps) {
    Polynomial<double> f = Polynomial<double>::constant(hs.front().n(), 1.0);
    for (std::size_t k = 0; k < hs.size(); ++k) {
      if (e[k] == 0) continue;
      auto& pw = powers[k];
      while (static_cast<int>(pw.size()) <= e[k])
        pw.push_back(pw.empty() ? Polynomial<double>::constant(hs[k].n(), 1.0) : pw.back() * hs[k]);
      f = f * pw[e[k]];
    }
    total += f.size();
    if (total > max_terms) throw ResourceLimitError("power-product expansion exceeds the term cap");
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace detail

struct HandelmanOptions {
  std::size_t max_terms = 200000;
  double margin = 0.0;
  LpOptions lp;
};

/// Searches λ_f ≥ 0 with p − margin ≡ Σ_{f ∈ pp(P,D)} λ_f f.  Unknown means
/// no representation at this D exists (not that p is negative).
inline CertifyOutcome handelman_lp(const Polynomial<double>& p, const std::vector<Polynomial<double>>& halfspaces,
                                   int D, const HandelmanOptions& opt = {}) {
  if (D < 1) throw DomainError("Handelman degree must be at least 1");
  if (halfspaces.empty()) throw DomainError("Handelman needs at least one constraint");
  for (const auto& h : halfspaces) {
    if (h.n() != p.n()) throw DimensionError("constraint dimension differs from polynomial");
    if (h.total_degree() > 1) throw DomainError("Handelman constraints must be affine");
  }
  const auto exps = detail::power_product_exponents(halfspaces.size(), D);
  const auto prods = detail::expand_power_products(halfspaces, exps, opt.max_terms);

  Polynomial<double> target = p - Polynomial<double>::constant(p.n(), opt.margin);
  std::map<MultiIndex, std::size_t, GradedLexLess> row_of;
  for (const auto& [I, c] : target.terms()) row_of.emplace(I, 0);
  for (const auto& f : prods)
    for (const auto& [I, c] : f.terms()) row_of.emplace(I, 0);
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(row_of.size());
  std::size_t r = 0;
  for (auto& [I, idx] : row_of) idx = r++;

  LinearProgram lp;
  for (std::size_t k = 0; k < prods.size(); ++k) {
    lp.add_variable(0.0, kInfinity);
    lp.set_objective(k, 1.0);
    for (const auto& [I, c] : prods[k].terms()) rows[row_of.at(I)].emplace_back(k, c);
  }
  for (const auto& [I, idx] : row_of) lp.add_row(rows[idx], Relation::Equal, target.coeff(I));
  const LpOutcome out = solve(lp, opt.lp);

  CertifyOutcome res;
  if (out.status == LpStatus::NumericFailure) throw NumericFailure("Handelman LP: " + out.message);
  if (out.status != LpStatus::Optimal) {
    res.message = "no Handelman representation at this degree";
    return res;
  }
  PositivityCertificate cert;
  cert.method = RelaxMethod::handelman(D);
  cert.margin = opt.margin;
  cert.lower_bound = opt.margin;
  cert.halfspaces = halfspaces;
  for (std::size_t k = 0; k < prods.size(); ++k) {
    if (out.solution[k] <= 0.0) continue;
    cert.multipliers.push_back(out.solution[k]);
    cert.power_products.push_back(exps[k]);
  }
  res.status = CertifyStatus::Certified;
  res.lower_bound = opt.margin;
  res.certificate = std::move(cert);
  return res;
}

/// Lower bound from the RLT linearisation over box power products (the LP
/// dual of the box Handelman search).
inline double rlt_lower_bound(const Polynomial<double>& p, const Box& box, int D, bool interval_bounds,
                              const HandelmanOptions& opt = {}) {
  const auto hs = detail::box_halfspaces(box);
  const auto exps = detail::power_product_exponents(hs.size(), D);
  const auto prods = detail::expand_power_products(hs, exps, opt.max_terms);
  std::map<MultiIndex, std::size_t, GradedLexLess> var_of;
  for (const auto& [I, c] : p.terms()) var_of.emplace(I, 0);
  for (const auto& f : prods)
    for (const auto& [I, c] : f.terms()) var_of.emplace(I, 0);
  LinearProgram lp;
  const MultiIndex zero(p.n());
  for (auto& [I, idx] : var_of) {
    double lo = -kInfinity, hi = kInfinity;
    if (I == zero) lo = hi = 1.0;
    else if (interval_bounds) {
      std::tie(lo, hi) = interval_bound(Polynomial<double>::monomial(I), box);
    }
    idx = lp.add_variable(lo, hi);
    lp.set_objective(idx, p.coeff(I));
  }
  for (const auto& f : prods) {
    std::vector<std::pair<std::size_t, double>> row;
    double constant = 0.0;
    for (const auto& [I, c] : f.terms()) {
      if (I == zero) constant += c;
      else row.emplace_back(var_of.at(I), c);
    }
    lp.add_row(std::move(row), Relation::GreaterEqual, -constant);
  }
  const LpOutcome out = solve(lp, opt.lp);
  if (out.status == LpStatus::Optimal) return out.objective_value;
  if (out.status == LpStatus::Unbounded) return -kInfinity;
  throw NumericFailure(std::string("RLT LP: ") + to_string(out.status) + " " + out.message);
}

struct BoundResult {
  double value = -kInfinity;
  std::vector<double> bernstein_coeffs;
  std::vector<double> multipliers;
};

namespace detail {

inline BoundResult bernstein_bound(const Polynomial<double>& p, const Box& box, const RelaxMethod& m,
                                   bool want_multipliers, const LpOptions& lpopt = {}) {
  const MultiIndex delta = resolve_degree(p, m);
  const auto coeffs = bernstein_on_box(p, box, delta);
  const auto rel = bernstein_relaxation(delta, m.kind, m.levels);
  const LpOutcome out = rel->minimize(coeffs.values, lpopt);
  if (out.status != LpStatus::Optimal)
    throw NumericFailure(std::string("Bernstein relaxation LP: ") + to_string(out.status) + " " + out.message);
  BoundResult res;
  res.value = out.objective_value;
  res.bernstein_coeffs = coeffs.values;
  if (want_multipliers) res.multipliers = rel->farkas_multipliers(out);
  return res;
}

}  // namespace detail

/// Lower bound on min_{x ∈ box} p(x) from the chosen relaxation.
inline double lower_bound(const Polynomial<double>& p, const Box& box, const RelaxMethod& method) {
  if (p.n() != box.dim()) throw DimensionError("box dimension differs from polynomial");
  switch (method.kind) {
    case RelaxKind::Interval: return interval_bound(p, box).first;
    case RelaxKind::Handelman: return rlt_lower_bound(p, box, method.handelman_degree, method.interval_bounds);
    default: return detail::bernstein_bound(p, box, method, false).value;
  }
}

/// Certificate of p ≥ margin on the box, or Unknown.  Never claims negativity.
inline CertifyOutcome certify_nonneg(const Polynomial<double>& p, const Box& box, const RelaxMethod& method,
                                     double margin = 0.0, double tol = 1e-9) {
  if (margin < 0.0) throw DomainError("margin must be non-negative");
  if (p.n() != box.dim()) throw DimensionError("box dimension differs from polynomial");
  CertifyOutcome res;
  PositivityCertificate cert;
  cert.method = method;
  cert.box = box;
  cert.margin = margin;
  cert.tolerance = tol;
  if (method.kind == RelaxKind::Handelman) {
    HandelmanOptions hopt;
    hopt.margin = margin;
    res = handelman_lp(p, detail::box_halfspaces(box), method.handelman_degree, hopt);
    if (res.certificate) res.certificate->box = box;
    return res;
  }
  if (method.kind == RelaxKind::Interval) {
    res.lower_bound = interval_bound(p, box).first;
    cert.lower_bound = res.lower_bound;
  } else {
    RelaxMethod m = method;
    m.degree = detail::resolve_degree(p, method);
    const Polynomial<double> shifted = p - Polynomial<double>::constant(p.n(), margin);
    const auto b = detail::bernstein_bound(shifted, box, m, method.kind != RelaxKind::LP1);
    res.lower_bound = b.value + margin;
    cert.method = m;
    cert.lower_bound = res.lower_bound;
    cert.bernstein_coeffs = bernstein_on_box(p, box, *m.degree).values;
    cert.multipliers = b.multipliers;
  }
  if (res.lower_bound >= margin - tol) {
    res.status = CertifyStatus::Certified;
    res.certificate = std::move(cert);
  } else {
    res.message = "relaxation bound below the requested margin";
  }
  return res;
}

/// Boxes obtained by cutting each axis at the given interior points.
inline std::vector<Box> subdivide(const Box& box, const std::vector<std::vector<double>>& cuts) {
  if (cuts.size() != box.dim()) throw DimensionError("one cut list per axis is required");
  std::vector<std::vector<double>> knots(box.dim());
  for (std::size_t j = 0; j < box.dim(); ++j) {
    std::vector<double> c = cuts[j];
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    knots[j].push_back(box.lower[j]);
    for (double v : c) {
      if (!(v > box.lower[j] && v < box.upper[j])) throw DomainError("cut must lie strictly inside the box");
      knots[j].push_back(v);
    }
    knots[j].push_back(box.upper[j]);
  }
  std::vector<Box> cells;
  MultiIndex counts(box.dim());
  for (std::size_t j = 0; j < box.dim(); ++j) counts[j] = static_cast<int>(knots[j].size()) - 2;
  for (const MultiIndex& k : monomial_basis(box.dim(), counts)) {
    std::vector<double> lo(box.dim()), hi(box.dim());
    for (std::size_t j = 0; j < box.dim(); ++j) {
      lo[j] = knots[j][k[j]];
      hi[j] = knots[j][k[j] + 1];
    }
    cells.emplace_back(lo, hi);
  }
  return cells;
}

/// Minimum of the per-cell lower bounds; a sound global lower bound.
inline double lower_bound_subdivided(const Polynomial<double>& p, const Box& box, const RelaxMethod& method,
                                     const std::vector<std::vector<double>>& cuts) {
  double best = kInfinity;
  for (const Box& cell : subdivide(box, cuts)) best = std::min(best, lower_bound(p, cell, method));
  return best;
}

// ---------------------------------------------------------------------------
// Independent re-checking

struct CheckReport {
  bool ok = false;
  double residual = 0.0;      // largest reconstruction / identity error found
  double certified_bound = 0.0;
  std::string reason;
};

namespace detail {

template <typename T>
CheckReport check_bernstein(const Polynomial<double>& p, const PositivityCertificate& cert) {
  CheckReport rep;
  const MultiIndex delta = *cert.method.degree;
  const Polynomial<T> pe = p.template cast<T>();
  const auto coeffs = bernstein_coeffs(affine_substitute_exact<T>(pe, cert.box), delta);
  if (coeffs.values.size() != cert.bernstein_coeffs.size()) {
    rep.reason = "Bernstein coefficient count mismatch";
    return rep;
  }
  T worst = T(0);
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    worst = std::max<T>(worst, scalar_abs(T(coeffs.values[k] - from_double<T>(cert.bernstein_coeffs[k]))));
  rep.residual = to_double(worst);
  if (rep.residual > 1e-8) {
    rep.reason = "stored Bernstein coefficients do not reproduce the polynomial";
    return rep;
  }
  std::vector<T> w(coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) w[k] = coeffs.values[k] - from_double<T>(cert.margin);
  const bool exact = !std::is_same_v<T, double>;
  if (cert.method.kind == RelaxKind::LP1) {
    const T mn = *std::min_element(w.begin(), w.end());
    rep.certified_bound = to_double(mn) + cert.margin;
    rep.ok = exact ? bool(mn >= T(0)) : to_double(mn) >= -cert.tolerance;
    if (!rep.ok) rep.reason = "a Bernstein coefficient lies below the margin";
    return rep;
  }
  const auto rel = bernstein_relaxation(delta, cert.method.kind, cert.method.levels);
  if (cert.multipliers.size() != rel->num_inequalities()) {
    rep.reason = "multiplier count differs from the relaxation";
    return rep;
  }
  std::vector<T> lambda;
  lambda.reserve(cert.multipliers.size());
  for (double v : cert.multipliers) {
    if (v < 0.0) {
      rep.reason = "negative Farkas multiplier";
      return rep;
    }
    lambda.push_back(from_double<T>(v));
  }
  const auto [r, btl] = rel->farkas_residual(w, lambda);
  T rinf = T(0), r1 = T(0);
  for (const T& v : r) {
    rinf = std::max<T>(rinf, scalar_abs(v));
    r1 += scalar_abs(v);
  }
  rep.residual = std::max(rep.residual, to_double(rinf));
  // Every z in the polytope has 0 ≤ z ≤ 1, so wᵀz ≥ −bᵀλ − ‖r‖₁.
  const T bound = T(-btl - r1);
  rep.certified_bound = to_double(bound) + cert.margin;
  if (exact) {
    rep.ok = bound >= T(0);
  } else {
    rep.ok = to_double(rinf) <= 1e-6 && -to_double(btl) >= -std::max(cert.tolerance, 1e-7);
  }
  if (!rep.ok) rep.reason = "Farkas identity does not certify the margin";
  return rep;
}

}  // namespace detail

/// Re-verifies a certificate against p by independent recomputation.  With
/// `exact`, all arithmetic uses rationals and the Farkas residual is charged
/// against the bound instead of being tolerated.
inline CheckReport check_certificate(const Polynomial<double>& p, const PositivityCertificate& cert,
                                     bool exact = false) {
  CheckReport rep;
  if (cert.method.kind == RelaxKind::Handelman) {
    if (cert.multipliers.size() != cert.power_products.size() || cert.halfspaces.empty()) {
      rep.reason = "malformed Handelman certificate";
      return rep;
    }
    Polynomial<double> recon(p.n());
    for (std::size_t k = 0; k < cert.multipliers.size(); ++k) {
      if (cert.multipliers[k] < 0.0) {
        rep.reason = "negative Handelman multiplier";
        return rep;
      }
      Polynomial<double> f = Polynomial<double>::constant(p.n(), cert.multipliers[k]);
      for (std::size_t j = 0; j < cert.halfspaces.size(); ++j) f = f * cert.halfspaces[j].pow(cert.power_products[k][j]);
      recon += f;
    }
    const Polynomial<double> target = p - Polynomial<double>::constant(p.n(), cert.margin);
    rep.residual = max_coeff_diff(recon, target);
    rep.ok = rep.residual <= 1e-8;
    rep.certified_bound = cert.margin;
    if (!rep.ok) rep.reason = "Handelman reconstruction does not match the polynomial";
    return rep;
  }
  if (cert.method.kind == RelaxKind::Interval) {
    rep.certified_bound = interval_bound(p, cert.box).first;
    rep.ok = rep.certified_bound >= cert.margin - cert.tolerance;
    if (!rep.ok) rep.reason = "interval bound below the margin";
    return rep;
  }
  if (!cert.method.degree) {
    rep.reason = "certificate lacks an expansion degree";
    return rep;
  }
  return exact ? detail::check_bernstein<Rational>(p, cert) : detail::check_bernstein<double>(p, cert);
}

}  // namespace lyapcert
