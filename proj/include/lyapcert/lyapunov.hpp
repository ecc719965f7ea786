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
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lyapcert/bernstein.hpp"
#include "lyapcert/errors.hpp"
#include "lyapcert/lp.hpp"
#include "lyapcert/ode.hpp"
#include "lyapcert/parametric.hpp"
#include "lyapcert/polynomial.hpp"
#include "lyapcert/relax.hpp"

namespace lyapcert {

enum class LyapunovStatus { Found, NotFound, Inconclusive };

inline const char* to_string(LyapunovStatus s) {
  switch (s) {
    case LyapunovStatus::Found: return "found";
    case LyapunovStatus::NotFound: return "not_found";
    case LyapunovStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

/// How the region is cut into cells.  Orthant: boxes split at 0.  Radial:
/// each facet x_a = b is blown up as x = r·φ and W(rφ)/r² is certified on
/// r ∈ [0,1] × facet, which removes the zero of W at the origin from every
/// cell.
enum class CellScheme { Orthant, Radial };

/// How the coefficient LP is assembled: one joint LP over (c, λ) per the
/// Farkas encoding, or row generation over c alone with a per-cell
/// separation LP.  Both describe the same feasible set of c.
enum class SolveRoute { Auto, Joint, CuttingPlane };

struct LyapunovQuery {
  OdeSystem system;
  Box region;
  int template_degree = 2;
  RelaxMethod method = RelaxMethod::lp1();  // method.degree overrides the expansion degree
  int degree_multiplier = 1;                // δ = multiplier · deg(W) when no override
  std::vector<std::size_t> split_axes;      // bisected at 0
  CellScheme scheme = CellScheme::Orthant;
  double epsilon = 0.1;                     // 0 selects weak (semidefinite) mode
  int shift_power = 1;                      // shift ε·Σ x_j^(2·shift_power)
  double coeff_bound = 5.0;
  int max_refinements = 10;
  double pd_epsilon = 0.01;
  SolveRoute route = SolveRoute::Auto;
  double time_limit_s = 0.0;                // 0: unlimited
  std::size_t max_cut_rounds = 400;

  /// Query with every axis split (2ⁿ cells).
  static LyapunovQuery with_defaults(OdeSystem sys, Box region) {
    LyapunovQuery q;
    q.system = std::move(sys);
    q.region = std::move(region);
    for (std::size_t j = 0; j < q.system.n(); ++j) q.split_axes.push_back(j);
    return q;
  }
};

/// The facet x_axis = value of a box.
struct Facet {
  std::size_t axis = 0;
  double value = 0.0;

  bool operator==(const Facet&) const = default;
};

/// P(r·φ)/r^k restricted to φ_axis = value.  Slot `axis` of the result holds
/// r, the other slots hold φ_j.  P must have no terms of degree below k.
inline Polynomial<double> radial_blowup(const Polynomial<double>& P, const Facet& f, int k) {
  if (f.axis >= P.n()) throw DimensionError("facet axis out of range");
  Polynomial<double> h(P.n());
  for (const auto& [I, c] : P.terms()) {
    if (I.total_degree() < k) throw DomainError("polynomial has terms below the blow-up order");
    MultiIndex J = I;
    J[f.axis] = I.total_degree() - k;
    h.add_term(J, c * std::pow(f.value, I[f.axis]));
  }
  return h;
}

/// The blow-up domain of a facet: r ∈ [0,1] in slot `axis`, the region's
/// ranges elsewhere.
inline Box facet_box(const Box& region, std::size_t axis) {
  Box b = region;
  b.lower[axis] = 0.0;
  b.upper[axis] = 1.0;
  return b;
}

struct PositivityReport {
  bool passed = false;
  std::string route;                         // which check succeeded or "grid"
  std::optional<std::vector<double>> witness;
  double witness_value = 0.0;
};

struct CellCertificate {
  PositivityCertificate certificate;         // for W = −V′ − ε·s on the cell
};

struct LyapunovResult {
  LyapunovStatus status = LyapunovStatus::NotFound;
  Polynomial<double> V;
  std::vector<double> c;
  std::vector<MultiIndex> monomials;
  std::string method;
  std::size_t cells = 0;
  int template_degree = 2;
  double epsilon = 0.1;
  int shift_power = 1;
  bool strong = true;
  MultiIndex degree;
  CellScheme scheme = CellScheme::Orthant;
  std::vector<PositivityCertificate> certificates;
  std::vector<std::optional<Facet>> cell_facets;  // parallel to certificates (radial scheme)
  PositivityReport positivity;
  std::vector<std::vector<double>> refinement_points;
  double setup_ms = 0.0;
  double lp_ms = 0.0;
  std::string failure;                       // np / to / infeasible / ... when not Found
  std::vector<std::string> diagnostics;

  bool found() const { return status == LyapunovStatus::Found; }
};

/// All monomials of total degree 2..degree, one parameter each.
inline ParametricPolynomial make_template(std::size_t n, int degree) {
  if (degree < 2) throw DomainError("template degree must be at least 2");
  std::vector<MultiIndex> basis;
  for (const MultiIndex& I : monomial_basis(n, MultiIndex(std::vector<int>(n, degree))))
    if (I.total_degree() >= 2 && I.total_degree() <= degree) basis.push_back(I);
  return ParametricPolynomial::identity(n, std::move(basis));
}

/// Cells obtained by bisecting the region at 0 along each listed axis.
inline std::vector<Box> orthant_cells(const Box& region, const std::vector<std::size_t>& split_axes) {
  std::vector<std::vector<double>> cuts(region.dim());
  for (std::size_t a : split_axes) {
    if (a >= region.dim()) throw DimensionError("split axis out of range");
    if (!(region.lower[a] < 0.0 && region.upper[a] > 0.0)) throw DomainError("split axis range does not contain 0 in its interior");
    cuts[a] = {0.0};
  }
  return subdivide(region, cuts);
}

/// W(x, c) = −V′(x, c) − ε·s(x) as one polynomial per parameter plus an offset.
struct ParametricTarget {
  std::vector<Polynomial<double>> per_param;
  Polynomial<double> offset;
  MultiIndex degree;
};

inline ParametricTarget make_target(const ParametricPolynomial& V, const OdeSystem& sys, double eps, int shift_power) {
  if (V.n != sys.n()) throw DimensionError("template and system have different dimensions");
  ParametricTarget t;
  t.degree = MultiIndex(V.n);
  for (std::size_t k = 0; k < V.num_params(); ++k) {
    Polynomial<double> v(V.n);
    for (std::size_t m = 0; m < V.monomials.size(); ++m)
      v.add_term(V.monomials[m], V.coeff_map(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)));
    t.per_param.push_back(-lie_derivative(v, sys));
    t.degree = t.degree.max_with(t.per_param.back().degree_vector());
  }
  t.offset = sum_of_even_powers<double>(V.n, shift_power) * (-eps);
  t.degree = t.degree.max_with(t.offset.degree_vector());
  return t;
}

/// The radial blow-up W(rφ, c)/r² of a target on one facet.
inline ParametricTarget blowup_target(const ParametricTarget& t, const Facet& f) {
  ParametricTarget out;
  out.degree = MultiIndex(t.offset.n());
  for (const auto& p : t.per_param) {
    out.per_param.push_back(radial_blowup(p, f, 2));
    out.degree = out.degree.max_with(out.per_param.back().degree_vector());
  }
  out.offset = radial_blowup(t.offset, f, 2);
  out.degree = out.degree.max_with(out.offset.degree_vector());
  return out;
}

/// Encoding of "W(·, c) ≥ 0 on the cell" for one cell.  w(c) = G c + g0 are
/// the Bernstein coefficients of W on the cell.  LP1 requires w(c) ≥ 0;
/// LP2/LP3 require Farkas multipliers λ ≥ 0 with Aᵀλ + w(c) = 0 and bᵀλ ≤ 0.
struct CellEncoding {
  Box cell;
  MultiIndex degree;
  RelaxKind kind = RelaxKind::LP1;
  RecurrenceLevels levels = RecurrenceLevels::FixedLevel1;
  Eigen::MatrixXd G;
  Eigen::VectorXd g0;
  std::shared_ptr<const BernsteinRelaxation> relaxation;  // null for LP1

  Eigen::VectorXd coefficients(const Eigen::VectorXd& c) const { return G * c + g0; }

  /// Adds the cell constraints to `lp`, with c in the variables `cvars`.
  /// Returns the index of the first multiplier variable (LP2/LP3).
  std::size_t append_to(LinearProgram& lp, const std::vector<std::size_t>& cvars) const {
    const auto N = static_cast<std::size_t>(G.rows());
    const auto K = static_cast<std::size_t>(G.cols());
    auto grow = [&](std::size_t I, std::vector<std::pair<std::size_t, double>>& row) {
      for (std::size_t k = 0; k < K; ++k) {
        const double v = G(static_cast<Eigen::Index>(I), static_cast<Eigen::Index>(k));
        if (v != 0.0) row.emplace_back(cvars[k], v);
      }
    };
    if (kind == RelaxKind::LP1) {
      for (std::size_t I = 0; I < N; ++I) {
        std::vector<std::pair<std::size_t, double>> row;
        grow(I, row);
        const double rhs = -g0(static_cast<Eigen::Index>(I));
        if (row.empty() && rhs <= 0.0) continue;
        lp.add_row(std::move(row), Relation::GreaterEqual, rhs, "bernstein");
      }
      return lp.num_vars();
    }
    const auto& d = relaxation->data;
    const std::size_t first = lp.num_vars();
    for (std::size_t i = 0; i < relaxation->num_inequalities(); ++i) lp.add_variable(0.0, kInfinity);
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(d.num_vars);
    std::vector<std::pair<std::size_t, double>> brow;
    std::size_t at = first;
    for (std::size_t i = 0; i < d.rows.size(); ++i, at += 2) {
      for (const auto& [j, a] : d.rows[i]) {
        rows[j].emplace_back(at, a);
        rows[j].emplace_back(at + 1, -a);
      }
      if (d.rhs[i] != 0.0) {
        brow.emplace_back(at, d.rhs[i]);
        brow.emplace_back(at + 1, -d.rhs[i]);
      }
    }
    for (std::size_t j = 0; j < d.num_vars; ++j) {
      rows[j].emplace_back(at++, -1.0);
      if (!d.upper.empty()) {
        rows[j].emplace_back(at, 1.0);
        brow.emplace_back(at, d.upper[j]);
        ++at;
      }
    }
    for (std::size_t j = 0; j < d.num_vars; ++j) {
      double rhs = 0.0;
      if (j < N) {
        grow(j, rows[j]);
        rhs = -g0(static_cast<Eigen::Index>(j));
      }
      lp.add_row(std::move(rows[j]), Relation::Equal, rhs, "farkas");
    }
    lp.add_row(std::move(brow), Relation::LessEqual, 0.0, "farkas_rhs");
    return first;
  }
};

inline MultiIndex scaled_degree(const MultiIndex& d, int multiplier) {
  MultiIndex out = d;
  for (std::size_t j = 0; j < d.size(); ++j) out[j] = d[j] * multiplier;
  return out;
}

inline CellEncoding encode_cell(const ParametricTarget& target, const Box& cell, const RelaxMethod& method,
                                const MultiIndex& delta) {
  if (!method.is_bernstein()) throw DomainError("cell encoding needs a Bernstein relaxation");
  if (!target.degree.leq(delta))
    throw DomainError("Lie derivative degree exceeds the expansion degree; raise the degree (degree elevation)");
  CellEncoding enc;
  enc.cell = cell;
  enc.degree = delta;
  enc.kind = method.kind;
  enc.levels = method.levels;
  const std::size_t N = IndexGrid(delta).size();
  const std::size_t K = target.per_param.size();
  enc.G.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    const auto b = bernstein_on_box(target.per_param[k], cell, delta);
    enc.G.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(b.values.data(), static_cast<Eigen::Index>(N));
  }
  const auto b0 = bernstein_on_box(target.offset, cell, delta);
  enc.g0 = Eigen::Map<const Eigen::VectorXd>(b0.values.data(), static_cast<Eigen::Index>(N));
  if (method.kind != RelaxKind::LP1) enc.relaxation = bernstein_relaxation(delta, method.kind, method.levels);
  return enc;
}

/// Convenience overload building the target from a template and system.
inline CellEncoding encode_cell(const ParametricPolynomial& tmpl, const Box& cell, const OdeSystem& sys,
                                const RelaxMethod& method, const MultiIndex& delta, double eps, int shift_power = 1) {
  return encode_cell(make_target(tmpl, sys, eps, shift_power), cell, method, delta);
}

// ---------------------------------------------------------------------------
// Positive definiteness of a candidate

namespace detail {

/// Adaptive bisection proving h ≥ 0 on the box from Bernstein coefficients.
/// Returns nullopt on success, otherwise a point where h < 0 (if one was
/// found at a cell corner) or an empty vector when the budget ran out.
inline std::optional<std::vector<double>> prove_nonneg_by_bisection(const Polynomial<double>& h, const Box& box,
                                                                    std::size_t budget) {
  const MultiIndex delta = h.degree_vector();
  std::vector<Box> stack{box};
  std::size_t processed = 0;
  while (!stack.empty()) {
    if (++processed > budget) return std::vector<double>{};
    Box cell = std::move(stack.back());
    stack.pop_back();
    const auto b = bernstein_on_box(h, cell, delta);
    if (b.min() >= 0.0) continue;
    // Corner coefficients are exact values of h at the cell vertices.
    for (const MultiIndex& corner : monomial_basis(h.n(), MultiIndex(std::vector<int>(h.n(), 1)))) {
      MultiIndex I(h.n());
      std::vector<double> x(h.n());
      for (std::size_t j = 0; j < h.n(); ++j) {
        I[j] = corner[j] ? delta[j] : 0;
        x[j] = corner[j] ? cell.upper[j] : cell.lower[j];
      }
      if (b.at(I) < -1e-12) return x;
    }
    std::size_t axis = 0;
    double widest = -1.0;
    for (std::size_t j = 0; j < h.n(); ++j) {
      const double rel = cell.width(j) / box.width(j);
      if (delta[j] > 0 && rel > widest) {
        widest = rel;
        axis = j;
      }
    }
    if (widest < 0.0) return std::vector<double>{};
    const double mid = 0.5 * (cell.lower[axis] + cell.upper[axis]);
    Box left = cell, right = cell;
    left.upper[axis] = mid;
    right.lower[axis] = mid;
    stack.push_back(std::move(left));
    stack.push_back(std::move(right));
  }
  return std::nullopt;
}

inline int lowest_degree(const Polynomial<double>& V) {
  int k = std::numeric_limits<int>::max();
  for (const auto& [I, c] : V.terms()) k = std::min(k, I.total_degree());
  return k;
}

}  // namespace detail

/// Grid resolution per axis for the counterexample search.
inline int witness_grid_size(std::size_t n) { return n <= 3 ? 50 : n == 4 ? 20 : 10; }

/// Checks V(x) ≥ ε_pd·Σx_j^k0 on the region (k0 = lowest degree of V, so
/// k0 = 2 for quadratic-led candidates).  First per orthant with the first
/// relaxation at deg(V), then by a radial blow-up per facet with adaptive
/// bisection.  On failure returns the grid point minimising the shortfall.
inline PositivityReport check_positive_definite(const Polynomial<double>& V, const Box& region, double eps_pd) {
  const std::size_t n = V.n();
  if (std::fabs(V.coeff(MultiIndex(n))) > 0.0) throw DomainError("candidate must vanish at the origin");
  PositivityReport rep;
  if (V.is_zero()) {
    rep.route = "zero";
    rep.witness = std::vector<double>(region.upper);
    rep.witness_value = 0.0;
    return rep;
  }
  const int k0 = detail::lowest_degree(V);
  const bool even = k0 % 2 == 0;
  if (even) {
    const Polynomial<double> h = V - sum_of_even_powers<double>(n, k0 / 2) * eps_pd;
    std::vector<std::size_t> all(n);
    for (std::size_t j = 0; j < n; ++j) all[j] = j;
    bool ok = true;
    for (const Box& cell : orthant_cells(region, all)) {
      if (bernstein_on_box(h, cell, h.degree_vector()).min() < -1e-12) {
        ok = false;
        break;
      }
    }
    if (ok) {
      rep.passed = true;
      rep.route = "orthant";
      return rep;
    }
    bool radial_ok = true;
    const std::size_t budget = n <= 2 ? 4000 : n == 3 ? 3000 : 1500;
    for (std::size_t a = 0; a < n && radial_ok; ++a) {
      for (double ba : {region.lower[a], region.upper[a]}) {
        const Facet f{a, ba};
        const Polynomial<double> h2 =
            radial_blowup(V, f, k0) - radial_blowup(sum_of_even_powers<double>(n, k0 / 2), f, k0) * eps_pd;
        if (detail::prove_nonneg_by_bisection(h2, facet_box(region, a), budget)) {
          radial_ok = false;
          break;
        }
      }
    }
    if (radial_ok) {
      rep.passed = true;
      rep.route = "radial";
      return rep;
    }
  }
  // Counterexample search on a uniform grid.
  const int g = witness_grid_size(n);
  const Polynomial<double> s = sum_of_even_powers<double>(n, 1);
  double best = kInfinity;
  std::vector<double> arg;
  std::vector<int> idx(n, 0);
  std::vector<double> x(n);
  for (;;) {
    bool origin = true;
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = region.lower[j] + region.width(j) * idx[j] / (g - 1);
      if (x[j] != 0.0) origin = false;
    }
    if (!origin) {
      const double v = evaluate(V, x) - eps_pd * evaluate(s, x);
      if (v < best) {
        best = v;
        arg = x;
      }
    }
    std::size_t j = 0;
    while (j < n && ++idx[j] == g) idx[j++] = 0;
    if (j == n) break;
  }
  rep.route = "grid";
  rep.witness_value = best;
  if (best < 0.0) rep.witness = arg;
  return rep;
}

// ---------------------------------------------------------------------------
// Synthesis

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct CoefficientSolve {
  std::optional<Eigen::VectorXd> c;
  std::string failure;  // "infeasible", "np", "to"
};

/// Max Σc subject to |c| ≤ B, extra rows, and W(·,c) ≥ 0 on every cell.
class CoefficientProblem {
 public:
  CoefficientProblem(const std::vector<CellEncoding>& cells, std::size_t K, double bound)
      : cells_(cells), K_(K), bound_(bound) {}

  void add_row(std::vector<std::pair<std::size_t, double>> terms, double rhs) {
    extra_.push_back({std::move(terms), rhs});
  }

  CoefficientSolve solve_joint(double& lp_ms, const LpOptions& opt) const {
    LinearProgram lp = master();
    std::vector<std::size_t> cvars(K_);
    for (std::size_t k = 0; k < K_; ++k) cvars[k] = k;
    for (const auto& enc : cells_) enc.append_to(lp, cvars);
    const auto t0 = Clock::now();
    const LpOutcome out = solve(lp, opt);
    lp_ms += ms_since(t0);
    if (opt.deadline && Clock::now() > *opt.deadline) return {std::nullopt, "to"};
    return finish(out);
  }

  CoefficientSolve solve_cutting_plane(double& lp_ms, std::size_t max_rounds, Clock::time_point deadline,
                                       bool has_deadline) {
    for (std::size_t round = 0; round < max_rounds; ++round) {
      if (has_deadline && Clock::now() > deadline) return {std::nullopt, "to"};
      LpOptions opt;
      if (has_deadline) opt.deadline = deadline;
      LinearProgram lp = master();
      for (const auto& cut : cuts_) lp.add_row(cut.terms, Relation::GreaterEqual, cut.rhs, "cut");
      auto t0 = Clock::now();
      const LpOutcome out = solve(lp, opt);
      lp_ms += ms_since(t0);
      if (has_deadline && Clock::now() > deadline) return {std::nullopt, "to"};
      CoefficientSolve res = finish(out);
      if (!res.c) return res;
      const Eigen::VectorXd& c = *res.c;
      std::size_t added = 0;
      for (const auto& enc : cells_) {
        const Eigen::VectorXd w = enc.coefficients(c);
        if (enc.kind == RelaxKind::LP1) {
          added += add_lp1_cuts(enc, w);
          continue;
        }
        std::vector<double> wv(w.data(), w.data() + w.size());
        t0 = Clock::now();
        const LpOutcome sep = enc.relaxation->minimize(wv, opt);
        lp_ms += ms_since(t0);
        if (has_deadline && Clock::now() > deadline) return {std::nullopt, "to"};
        if (!sep.optimal()) return {std::nullopt, "np"};
        if (sep.objective_value >= -kSeparationTol) continue;
        Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(sep.solution.data(), static_cast<Eigen::Index>(w.size()));
        const Eigen::VectorXd coeff = enc.G.transpose() * z;
        add_cut(coeff, -enc.g0.dot(z));
        ++added;
      }
      if (added == 0) return res;
    }
    return {std::nullopt, "np"};
  }

 private:
  struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
    double rhs;
  };

  static constexpr double kSeparationTol = 1e-9;
  static constexpr std::size_t kCutsPerCell = 24;

  LinearProgram master() const {
    LinearProgram lp;
    for (std::size_t k = 0; k < K_; ++k) {
      lp.add_variable(-bound_, bound_);
      lp.set_objective(k, 1.0);
    }
    lp.set_sense(Sense::Maximize);
    for (const auto& r : extra_) lp.add_row(r.terms, Relation::GreaterEqual, r.rhs, "refinement");
    return lp;
  }

  void add_cut(const Eigen::VectorXd& coeff, double rhs) {
    Row r;
    for (std::size_t k = 0; k < K_; ++k)
      if (coeff(static_cast<Eigen::Index>(k)) != 0.0) r.terms.emplace_back(k, coeff(static_cast<Eigen::Index>(k)));
    r.rhs = rhs;
    cuts_.push_back(std::move(r));
  }

  std::size_t add_lp1_cuts(const CellEncoding& enc, const Eigen::VectorXd& w) {
    std::vector<std::pair<double, Eigen::Index>> viol;
    for (Eigen::Index I = 0; I < w.size(); ++I)
      if (w(I) < -kSeparationTol) {
        const double nrm = std::max(enc.G.row(I).norm(), 1e-12);
        viol.emplace_back(w(I) / nrm, I);
      }
    std::sort(viol.begin(), viol.end());
    if (viol.size() > kCutsPerCell) viol.resize(kCutsPerCell);
    for (const auto& [v, I] : viol) add_cut(enc.G.row(I).transpose(), -enc.g0(I));
    return viol.size();
  }

  CoefficientSolve finish(const LpOutcome& out) const {
    if (out.status == LpStatus::Infeasible) return {std::nullopt, "infeasible"};
    if (out.status != LpStatus::Optimal) return {std::nullopt, "np"};
    Eigen::VectorXd c(static_cast<Eigen::Index>(K_));
    for (std::size_t k = 0; k < K_; ++k) c(static_cast<Eigen::Index>(k)) = out.solution[k];
    return {c, {}};
  }

  const std::vector<CellEncoding>& cells_;
  std::size_t K_;
  double bound_;
  std::vector<Row> extra_;
  std::vector<Row> cuts_;
};

inline void validate(const LyapunovQuery& q) {
  const std::size_t n = q.system.n();
  if (q.region.dim() != n) throw DimensionError("region dimension differs from the system");
  for (std::size_t j = 0; j < n; ++j)
    if (!(q.region.lower[j] < 0.0 && q.region.upper[j] > 0.0)) throw DomainError("origin must lie inside the region");
  if (!(q.epsilon >= 0.0)) throw DomainError("epsilon must be non-negative");
  if (!(q.coeff_bound > 0.0)) throw DomainError("coefficient bound must be positive");
  if (q.shift_power < 1) throw DomainError("shift power must be at least 1");
  if (q.degree_multiplier < 1) throw DomainError("degree multiplier must be at least 1");
  if (!q.method.is_bernstein()) throw DomainError("synthesis needs a Bernstein relaxation (lp1, lp2 or lp3)");
  if (!q.system.has_equilibrium_at_origin()) throw DomainError("system must have an equilibrium at the origin");
}

}  // namespace detail

/// W = −V′ − ε·Σ x_j^(2p) for a concrete V.
inline Polynomial<double> derivative_target(const Polynomial<double>& V, const OdeSystem& sys, double eps,
                                            int shift_power) {
  return -lie_derivative(V, sys) - sum_of_even_powers<double>(V.n(), shift_power) * eps;
}

/// Re-verifies every per-cell certificate against W recomputed from V.
inline CheckReport verify_lyapunov_certificates(const LyapunovResult& r, const OdeSystem& sys, bool exact = false) {
  CheckReport all;
  all.ok = !r.certificates.empty();
  const Polynomial<double> W = derivative_target(r.V, sys, r.epsilon, r.shift_power);
  for (std::size_t i = 0; i < r.certificates.size(); ++i) {
    const auto& cert = r.certificates[i];
    const bool radial = i < r.cell_facets.size() && r.cell_facets[i];
    const CheckReport rep = check_certificate(radial ? radial_blowup(W, *r.cell_facets[i], 2) : W, cert, exact);
    all.residual = std::max(all.residual, rep.residual);
    if (!rep.ok) {
      all.ok = false;
      all.reason = rep.reason;
    }
  }
  if (r.certificates.empty()) all.reason = "no certificates";
  return all;
}

/// Searches a polynomial Lyapunov function for the query configuration.
inline LyapunovResult synthesize(const LyapunovQuery& q) {
  detail::validate(q);
  const auto t_setup = detail::Clock::now();
  const auto deadline = t_setup + std::chrono::duration_cast<detail::Clock::duration>(
                                      std::chrono::duration<double>(q.time_limit_s));
  const bool has_deadline = q.time_limit_s > 0.0;
  const std::size_t n = q.system.n();

  LyapunovResult res;
  res.template_degree = q.template_degree;
  res.epsilon = q.epsilon;
  res.shift_power = q.shift_power;
  res.strong = q.epsilon > 0.0;
  res.method = q.method.name();

  const ParametricPolynomial tmpl = make_template(n, q.template_degree);
  res.monomials = tmpl.monomials;
  const ParametricTarget target = make_target(tmpl, q.system, q.epsilon, q.shift_power);
  auto degree_for = [&](const ParametricTarget& t) {
    return q.method.degree ? *q.method.degree : scaled_degree(t.degree, q.degree_multiplier);
  };
  struct CellJob {
    Box box;
    std::optional<Facet> facet;
    const ParametricTarget* target;
    MultiIndex delta;
  };
  std::vector<ParametricTarget> facet_targets;
  facet_targets.reserve(2 * n);
  std::vector<CellJob> jobs;
  res.scheme = q.scheme;
  if (q.scheme == CellScheme::Orthant) {
    for (const Box& cell : orthant_cells(q.region, q.split_axes))
      jobs.push_back({cell, std::nullopt, &target, degree_for(target)});
  } else {
    for (std::size_t a = 0; a < n; ++a)
      for (const double b : {q.region.lower[a], q.region.upper[a]}) {
        const Facet f{a, b};
        facet_targets.push_back(blowup_target(target, f));
        const ParametricTarget& ft = facet_targets.back();
        std::vector<std::vector<double>> cuts(n);
        for (std::size_t j : q.split_axes)
          if (j != a) cuts[j] = {0.0};
        for (const Box& cell : subdivide(facet_box(q.region, a), cuts)) jobs.push_back({cell, f, &ft, degree_for(ft)});
      }
  }
  res.degree = jobs.front().delta;
  res.cells = jobs.size();
  std::vector<CellEncoding> encodings;
  for (const auto& job : jobs) {
    if (has_deadline && detail::Clock::now() > deadline) {
      res.failure = "to";
      res.setup_ms = detail::ms_since(t_setup);
      return res;
    }
    encodings.push_back(encode_cell(*job.target, job.box, q.method, job.delta));
  }
  res.setup_ms = detail::ms_since(t_setup);

  const std::size_t K = tmpl.num_params();
  SolveRoute route = q.route;
  if (route == SolveRoute::Auto) {
    std::size_t size = K;
    for (const auto& enc : encodings)
      size += enc.relaxation ? enc.relaxation->num_inequalities() : static_cast<std::size_t>(enc.G.rows());
    route = size <= 400 ? SolveRoute::Joint : SolveRoute::CuttingPlane;
  }
  detail::CoefficientProblem problem(encodings, K, q.coeff_bound);
  const Polynomial<double> s2 = sum_of_even_powers<double>(n, 1);

  LpOptions joint_opt;
  if (has_deadline) joint_opt.deadline = deadline;
  for (int refinement = 0;; ++refinement) {
    if (has_deadline && detail::Clock::now() > deadline) {
      res.failure = "to";
      return res;
    }
    detail::CoefficientSolve sol = route == SolveRoute::Joint
                                       ? problem.solve_joint(res.lp_ms, joint_opt)
                                       : problem.solve_cutting_plane(res.lp_ms, q.max_cut_rounds, deadline, has_deadline);
    if (!sol.c) {
      res.status = LyapunovStatus::NotFound;
      res.failure = sol.failure;
      return res;
    }
    const Eigen::VectorXd& c = *sol.c;
    res.c.assign(c.data(), c.data() + c.size());
    res.V = tmpl.instantiate(c);
    res.positivity = check_positive_definite(res.V, q.region, q.pd_epsilon);
    if (res.positivity.passed) break;
    if (!res.positivity.witness || refinement >= q.max_refinements) {
      res.status = LyapunovStatus::Inconclusive;
      res.failure = res.positivity.witness ? "refinement budget exhausted" : "positivity undecided";
      return res;
    }
    // Cut V(y, c) ≥ ε_pd·‖y‖² at the counterexample.
    const std::vector<double>& y = *res.positivity.witness;
    res.refinement_points.push_back(y);
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t k = 0; k < K; ++k) {
      double v = 0.0;
      for (std::size_t m = 0; m < tmpl.monomials.size(); ++m) {
        double mono = tmpl.coeff_map(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < n; ++j) mono *= std::pow(y[j], tmpl.monomials[m][j]);
        v += mono;
      }
      if (v != 0.0) row.emplace_back(k, v);
    }
    problem.add_row(std::move(row), q.pd_epsilon * evaluate(s2, y));
  }

  // Per-cell certificates for W computed from the instantiated V.
  const Polynomial<double> W = derivative_target(res.V, q.system, q.epsilon, q.shift_power);
  for (const auto& job : jobs) {
    RelaxMethod m = q.method;
    m.degree = job.delta;
    const MultiIndex& delta = job.delta;
    PositivityCertificate cert;
    cert.method = m;
    cert.box = job.box;
    cert.margin = 0.0;
    cert.tolerance = 1e-7;
    cert.bernstein_coeffs =
        bernstein_on_box(job.facet ? radial_blowup(W, *job.facet, 2) : W, job.box, delta).values;
    if (m.kind == RelaxKind::LP1) {
      cert.lower_bound = *std::min_element(cert.bernstein_coeffs.begin(), cert.bernstein_coeffs.end());
    } else {
      const auto rel = bernstein_relaxation(delta, m.kind, m.levels);
      const auto t0 = detail::Clock::now();
      const LpOutcome out = rel->minimize(cert.bernstein_coeffs);
      res.lp_ms += detail::ms_since(t0);
      if (!out.optimal()) {
        res.status = LyapunovStatus::NotFound;
        res.failure = "np";
        return res;
      }
      cert.lower_bound = out.objective_value;
      cert.multipliers = rel->farkas_multipliers(out);
    }
    res.certificates.push_back(std::move(cert));
    res.cell_facets.push_back(job.facet);
  }
  const CheckReport check = verify_lyapunov_certificates(res, q.system);
  if (!check.ok) {
    res.status = LyapunovStatus::NotFound;
    res.failure = "np";
    res.diagnostics.push_back("certificate recheck failed: " + check.reason);
    return res;
  }
  res.status = LyapunovStatus::Found;
  return res;
}

// ---------------------------------------------------------------------------
// Escalation

struct EscalationStage {
  RelaxMethod method;
  int degree_multiplier = 1;
  std::optional<std::vector<std::size_t>> split_axes;  // nullopt: keep the query's
  std::optional<double> epsilon;                       // nullopt: keep the query's
  int shift_power = 1;
  std::optional<int> template_degree;
  CellScheme scheme = CellScheme::Orthant;

  std::string label() const {
    std::string s = method.name();
    if (scheme == CellScheme::Radial) s += " radial";
    if (degree_multiplier != 1) s += " x" + std::to_string(degree_multiplier);
    if (shift_power != 1) s += " p=" + std::to_string(shift_power);
    if (epsilon && *epsilon == 0.0) s += " weak";
    if (template_degree) s += " deg=" + std::to_string(*template_degree);
    return s;
  }
};

/// The four strong stages (LP1, LP2, LP3 fixed-level-1, LP2 at 2δ), the
/// radial cell scheme, the quartic shift, then weak mode.
inline std::vector<EscalationStage> default_schedule() {
  std::vector<EscalationStage> s;
  auto stage = [](RelaxMethod m, int mult, int p, std::optional<double> eps,
                  CellScheme scheme = CellScheme::Orthant) {
    EscalationStage st;
    st.method = std::move(m);
    st.degree_multiplier = mult;
    st.shift_power = p;
    st.epsilon = eps;
    st.scheme = scheme;
    return st;
  };
  s.push_back(stage(RelaxMethod::lp1(), 1, 1, std::nullopt));
  s.push_back(stage(RelaxMethod::lp2(), 1, 1, std::nullopt));
  s.push_back(stage(RelaxMethod::lp3(), 1, 1, std::nullopt));
  s.push_back(stage(RelaxMethod::lp2(), 2, 1, std::nullopt));
  s.push_back(stage(RelaxMethod::lp1(), 1, 1, std::nullopt, CellScheme::Radial));
  s.push_back(stage(RelaxMethod::lp2(), 1, 1, std::nullopt, CellScheme::Radial));
  s.push_back(stage(RelaxMethod::lp1(), 1, 2, std::nullopt));
  s.push_back(stage(RelaxMethod::lp2(), 1, 2, std::nullopt));
  s.push_back(stage(RelaxMethod::lp1(), 1, 1, 0.0));
  s.push_back(stage(RelaxMethod::lp2(), 1, 1, 0.0));
  return s;
}

/// The four stages of the basic schedule only (strong mode, quadratic shift).
inline std::vector<EscalationStage> strong_schedule() {
  auto s = default_schedule();
  s.resize(4);
  return s;
}

/// Runs synthesize along the schedule and returns the first Found result,
/// otherwise the last result with per-stage diagnostics.
inline LyapunovResult escalate(const LyapunovQuery& q, const std::vector<EscalationStage>& schedule) {
  LyapunovResult last;
  std::vector<std::string> diag;
  for (const auto& st : schedule) {
    LyapunovQuery stage_q = q;
    stage_q.method = st.method;
    if (q.method.degree && !st.method.degree) stage_q.method.degree = q.method.degree;
    stage_q.degree_multiplier = st.degree_multiplier;
    stage_q.shift_power = st.shift_power;
    if (st.epsilon) stage_q.epsilon = *st.epsilon;
    if (st.split_axes) stage_q.split_axes = *st.split_axes;
    if (st.template_degree) stage_q.template_degree = *st.template_degree;
    stage_q.scheme = st.scheme;
    LyapunovResult r;
    try {
      r = synthesize(stage_q);
    } catch (const NumericFailure& e) {
      r.status = LyapunovStatus::NotFound;
      r.failure = "np";
      r.method = st.method.name();
    }
    diag.push_back(st.label() + ": " + to_string(r.status) + (r.failure.empty() ? "" : " (" + r.failure + ")"));
    if (r.found()) {
      r.diagnostics.insert(r.diagnostics.end(), diag.begin(), diag.end());
      r.method = st.label();
      return r;
    }
    last = std::move(r);
  }
  last.status = last.status == LyapunovStatus::Inconclusive ? LyapunovStatus::Inconclusive : LyapunovStatus::NotFound;
  last.diagnostics.insert(last.diagnostics.end(), diag.begin(), diag.end());
  return last;
}

inline LyapunovResult escalate(const LyapunovQuery& q) { return escalate(q, default_schedule()); }

// ---------------------------------------------------------------------------
// Sampling check

struct SoundnessReport {
  std::size_t samples = 0;
  std::size_t positivity_violations = 0;
  std::size_t decrease_violations = 0;

  bool ok() const { return positivity_violations == 0 && decrease_violations == 0; }
};

/// Samples x in the region with ‖x‖∞ ≥ 1e−3 and checks V(x) > 0 and
/// V′(x) ≤ −ε·s(x)/2 (V′(x) ≤ 1e−9 in weak mode).
inline SoundnessReport sample_soundness(const LyapunovResult& r, const OdeSystem& sys, const Box& region,
                                        std::size_t samples = 10000, std::uint64_t seed = 7) {
  SoundnessReport rep;
  std::mt19937_64 rng(seed);
  const std::size_t n = sys.n();
  const Polynomial<double> dV = lie_derivative(r.V, sys);
  const Polynomial<double> s = sum_of_even_powers<double>(n, r.shift_power);
  std::vector<std::uniform_real_distribution<double>> dist;
  for (std::size_t j = 0; j < n; ++j) dist.emplace_back(region.lower[j], region.upper[j]);
  std::vector<double> x(n);
  while (rep.samples < samples) {
    double mx = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = dist[j](rng);
      mx = std::max(mx, std::fabs(x[j]));
    }
    if (mx < 1e-3) continue;
    ++rep.samples;
    if (!(evaluate(r.V, x) > 0.0)) ++rep.positivity_violations;
    const double d = evaluate(dV, x);
    const double limit = r.strong ? -r.epsilon * evaluate(s, x) / 2.0 : 1e-9;
    if (d > limit) ++rep.decrease_violations;
  }
  return rep;
}

}  // namespace lyapcert
