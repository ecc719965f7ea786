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
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lyapcert/errors.hpp"
#include "lyapcert/scalar.hpp"

namespace lyapcert {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Sense { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded, NumericFailure };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::NumericFailure: return "numeric_failure";
  }
  return "?";
}

struct LpVariable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
};

/// Sparse row Σ a_j x_j (rel) rhs.
struct LpRow {
  std::vector<std::pair<std::size_t, double>> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
  std::string name;
};

class LinearProgram {
 public:
  std::size_t add_variable(double lower = 0.0, double upper = kInfinity, std::string name = {}) {
    check_bounds(lower, upper);
    vars_.push_back({std::move(name), lower, upper});
    objective_.push_back(0.0);
    return vars_.size() - 1;
  }

  void set_bounds(std::size_t j, double lower, double upper) {
    check_bounds(lower, upper);
    vars_.at(j).lower = lower;
    vars_.at(j).upper = upper;
  }

  std::size_t add_row(std::vector<std::pair<std::size_t, double>> terms, Relation rel, double rhs,
                      std::string name = {}) {
    if (!std::isfinite(rhs)) throw DomainError("constraint right-hand side must be finite");
    std::vector<std::pair<std::size_t, double>> clean;
    clean.reserve(terms.size());
    std::sort(terms.begin(), terms.end());
    for (const auto& [j, a] : terms) {
      if (j >= vars_.size()) throw DimensionError("constraint refers to an unknown variable");
      if (!std::isfinite(a)) throw DomainError("constraint coefficient must be finite");
      if (!clean.empty() && clean.back().first == j) clean.back().second += a;
      else clean.emplace_back(j, a);
    }
    std::erase_if(clean, [](const auto& t) { return t.second == 0.0; });
    rows_.push_back({std::move(clean), rel, rhs, std::move(name)});
    return rows_.size() - 1;
  }

  std::size_t add_dense_row(std::span<const double> coeffs, Relation rel, double rhs, std::string name = {}) {
    if (coeffs.size() != vars_.size()) throw DimensionError("dense row needs one entry per variable");
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      if (coeffs[j] != 0.0) terms.emplace_back(j, coeffs[j]);
    return add_row(std::move(terms), rel, rhs, std::move(name));
  }

  void set_objective(std::size_t j, double c) {
    if (!std::isfinite(c)) throw DomainError("objective coefficient must be finite");
    objective_.at(j) = c;
  }
  void set_sense(Sense s) { sense_ = s; }

  std::size_t num_vars() const { return vars_.size(); }
  std::size_t num_rows() const { return rows_.size(); }
  const std::vector<LpVariable>& vars() const { return vars_; }
  const std::vector<LpRow>& rows() const { return rows_; }
  const std::vector<double>& objective() const { return objective_; }
  Sense sense() const { return sense_; }

  double activity(std::size_t i, std::span<const double> x) const {
    double s = 0.0;
    for (const auto& [j, a] : rows_[i].terms) s += a * x[j];
    return s;
  }

  double objective_value(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < vars_.size(); ++j) s += objective_[j] * x[j];
    return s;
  }

  /// Largest violation of any row or bound at x.
  double max_violation(std::span<const double> x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      v = std::max(v, vars_[j].lower - x[j]);
      v = std::max(v, x[j] - vars_[j].upper);
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const double a = activity(i, x);
      switch (rows_[i].relation) {
        case Relation::LessEqual: v = std::max(v, a - rows_[i].rhs); break;
        case Relation::GreaterEqual: v = std::max(v, rows_[i].rhs - a); break;
        case Relation::Equal: v = std::max(v, std::fabs(a - rows_[i].rhs)); break;
      }
    }
    return v;
  }

 private:
  static void check_bounds(double lower, double upper) {
    if (std::isnan(lower) || std::isnan(upper) || lower > upper || lower == kInfinity || upper == -kInfinity)
      throw DomainError("variable bounds must satisfy lower <= upper");
  }

  std::vector<LpVariable> vars_;
  std::vector<LpRow> rows_;
  std::vector<double> objective_;
  Sense sense_ = Sense::Minimize;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-7;
  std::size_t max_iterations = 0;  // 0 selects a size-dependent limit
  std::size_t refactor_interval = 64;
  std::optional<std::chrono::steady_clock::time_point> deadline;  // gives up with NumericFailure
};

/// Result of a solve.  Duals follow the convention d = c − Aᵀy, with y_i the
/// sensitivity of the optimal objective to rhs_i in the stated sense.
struct LpOutcome {
  LpStatus status = LpStatus::NumericFailure;
  std::vector<double> solution;
  double objective_value = 0.0;
  std::vector<double> row_duals;
  std::vector<double> reduced_costs;
  std::vector<double> farkas;  // row multipliers proving infeasibility
  double max_violation = 0.0;
  std::size_t iterations = 0;
  std::string message;

  bool optimal() const { return status == LpStatus::Optimal; }
};

namespace detail {

/// Best rational approximation with bounded denominator (continued fractions).
inline Rational rationalize(double v, long max_den = 1000000) {
  if (!std::isfinite(v)) throw DomainError("cannot rationalize a non-finite value");
  const double sign = v < 0 ? -1.0 : 1.0;
  double x = std::fabs(v);
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(x);
    if (a > 1e15) break;
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0;
    const long q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double frac = x - a;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  if (q1 == 0) return Rational(v);
  Rational r(p1, q1);
  r.canonicalize();
  return sign < 0 ? Rational(-r) : r;
}

/// Infeasibility gap yᵀb − max_{v in bounds} yᵀ(Av); positive proves the rows
/// and bounds have no common point.  Multipliers of the wrong sign are dropped.
/// Components of yᵀA with magnitude ≤ tiny are treated as zero (floating
/// point only; the exact check passes tiny = 0).
template <typename T>
T farkas_gap(const LinearProgram& lp, const std::vector<T>& y_in, bool* finite, const T& tiny = T(0)) {
  std::vector<T> y = y_in;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const Relation rel = lp.rows()[i].relation;
    if ((rel == Relation::LessEqual && y[i] > T(0)) || (rel == Relation::GreaterEqual && y[i] < T(0))) y[i] = T(0);
  }
  std::vector<T> g(lp.num_vars(), T(0));
  T yb = T(0);
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    if (scalar_is_zero(y[i])) continue;
    yb += y[i] * from_double<T>(lp.rows()[i].rhs);
    for (const auto& [j, a] : lp.rows()[i].terms) g[j] += y[i] * from_double<T>(a);
  }
  // With y of the sign fixed above, y_i·s_i ≤ 0 for every admissible slack.
  T mx = T(0);
  *finite = true;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (scalar_is_zero(g[j]) || scalar_abs(g[j]) <= tiny) continue;
    const double bound = g[j] > T(0) ? lp.vars()[j].upper : lp.vars()[j].lower;
    if (!std::isfinite(bound)) {
      *finite = false;
      return T(0);
    }
    mx += g[j] * from_double<T>(bound);
  }
  return yb - mx;
}

class SimplexSolver {
 public:
  SimplexSolver(const LinearProgram& lp, const LpOptions& opt) : lp_(lp), opt_(opt) { setup(); }

  LpOutcome run() {
    LpOutcome out;
    Status st = optimize(/*phase1=*/true);
    out.iterations = iter_;
    if (st != Status::Optimal) return failure(out, st == Status::IterationLimit ? "iteration limit in phase 1"
                                                                               : "numerical breakdown in phase 1");
    double infeas = 0.0;
    for (std::size_t j = first_art_; j < N_; ++j) infeas += x_[j];
    if (infeas > phase1_tol_) return infeasible(out);

    for (std::size_t j = first_art_; j < N_; ++j) {
      lb_[j] = ub_[j] = 0.0;
      if (pos_[j] < 0) {
        x_[j] = 0.0;
        state_[j] = State::AtLower;
      }
    }
    st = optimize(/*phase1=*/false);
    out.iterations = iter_;
    if (st == Status::Unbounded) {
      out.status = LpStatus::Unbounded;
      out.message = "objective unbounded";
      return out;
    }
    if (st != Status::Optimal) return failure(out, st == Status::IterationLimit ? "iteration limit in phase 2"
                                                                               : "numerical breakdown in phase 2");
    return optimal(out);
  }

 private:
  enum class State : unsigned char { Basic, AtLower, AtUpper, FreeZero };
  enum class Status { Optimal, Unbounded, IterationLimit, Numeric };

  void setup() {
    m_ = lp_.num_rows();
    n_ = lp_.num_vars();
    scale_.assign(m_, 1.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double mx = 0.0;
      for (const auto& [j, a] : lp_.rows()[i].terms) mx = std::max(mx, std::fabs(a));
      if (mx > 0.0) scale_[i] = std::ldexp(1.0, -std::ilogb(mx));
    }
    cols_.assign(n_ + m_, {});
    b_.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = lp_.rows()[i];
      for (const auto& [j, a] : row.terms) cols_[j].emplace_back(static_cast<int>(i), a * scale_[i]);
      b_[i] = row.rhs * scale_[i];
      cols_[n_ + i].emplace_back(static_cast<int>(i), 1.0);
    }
    lb_.resize(n_ + m_);
    ub_.resize(n_ + m_);
    for (std::size_t j = 0; j < n_; ++j) {
      lb_[j] = lp_.vars()[j].lower;
      ub_[j] = lp_.vars()[j].upper;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      switch (lp_.rows()[i].relation) {
        case Relation::LessEqual: lb_[n_ + i] = 0.0; ub_[n_ + i] = kInfinity; break;
        case Relation::GreaterEqual: lb_[n_ + i] = -kInfinity; ub_[n_ + i] = 0.0; break;
        case Relation::Equal: lb_[n_ + i] = 0.0; ub_[n_ + i] = 0.0; break;
      }
    }

    x_.assign(n_ + m_, 0.0);
    state_.assign(n_ + m_, State::AtLower);
    for (std::size_t j = 0; j < n_; ++j) place_at_bound(j);

    std::vector<double> r = b_;
    for (std::size_t j = 0; j < n_; ++j)
      if (x_[j] != 0.0)
        for (const auto& [i, a] : cols_[j]) r[i] -= a * x_[j];

    head_.assign(m_, -1);
    std::vector<double> art_sign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = n_ + i;
      if (r[i] >= lb_[s] && r[i] <= ub_[s]) {
        head_[i] = static_cast<int>(s);
        x_[s] = r[i];
        state_[s] = State::Basic;
      } else {
        x_[s] = r[i] < lb_[s] ? lb_[s] : ub_[s];
        state_[s] = r[i] < lb_[s] ? State::AtLower : State::AtUpper;
        art_sign[i] = (r[i] - x_[s]) >= 0.0 ? 1.0 : -1.0;
      }
    }
    first_art_ = n_ + m_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (head_[i] >= 0) continue;
      const std::size_t a = cols_.size();
      cols_.push_back({{static_cast<int>(i), art_sign[i]}});
      lb_.push_back(0.0);
      ub_.push_back(kInfinity);
      x_.push_back(std::fabs(r[i] - x_[n_ + i]));
      state_.push_back(State::Basic);
      head_[i] = static_cast<int>(a);
    }
    N_ = cols_.size();
    pos_.assign(N_, -1);
    for (std::size_t i = 0; i < m_; ++i) pos_[head_[i]] = static_cast<int>(i);

    cost1_.assign(N_, 0.0);
    for (std::size_t j = first_art_; j < N_; ++j) cost1_[j] = 1.0;
    cost2_.assign(N_, 0.0);
    const double sgn = lp_.sense() == Sense::Maximize ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n_; ++j) cost2_[j] = sgn * lp_.objective()[j];

    binv_ = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < m_; ++i)
      if (static_cast<std::size_t>(head_[i]) >= first_art_) binv_(i, i) = cols_[head_[i]][0].second;

    max_iter_ = opt_.max_iterations ? opt_.max_iterations : 50 * (N_ + m_) + 1000;
    double bmax = 0.0;
    for (double v : b_) bmax = std::max(bmax, std::fabs(v));
    phase1_tol_ = opt_.feasibility_tol * (1.0 + bmax) * std::max<double>(1.0, static_cast<double>(N_ - first_art_));
  }

  void place_at_bound(std::size_t j) {
    if (std::isfinite(lb_[j])) {
      x_[j] = lb_[j];
      state_[j] = State::AtLower;
    } else if (std::isfinite(ub_[j])) {
      x_[j] = ub_[j];
      state_[j] = State::AtUpper;
    } else {
      x_[j] = 0.0;
      state_[j] = State::FreeZero;
    }
  }

  double column_dot(std::size_t j, const Eigen::VectorXd& y) const {
    double s = 0.0;
    for (const auto& [i, a] : cols_[j]) s += a * y(i);
    return s;
  }

  Eigen::VectorXd duals(const std::vector<double>& c) const {
    Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < m_; ++i) cb(i) = c[head_[i]];
    return binv_.transpose() * cb;
  }

  bool refactor() {
    since_refactor_ = 0;
    if (m_ == 0) return true;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    for (std::size_t k = 0; k < m_; ++k)
      for (const auto& [i, a] : cols_[head_[k]]) B(i, static_cast<Eigen::Index>(k)) = a;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    if (!(lu.rcond() > 1e-13)) return false;
    binv_ = lu.inverse();
    Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(b_.data(), static_cast<Eigen::Index>(m_));
    for (std::size_t j = 0; j < N_; ++j)
      if (pos_[j] < 0 && x_[j] != 0.0)
        for (const auto& [i, a] : cols_[j]) r(i) -= a * x_[j];
    const Eigen::VectorXd xb = binv_ * r;
    for (std::size_t k = 0; k < m_; ++k) x_[head_[k]] = xb(static_cast<Eigen::Index>(k));
    return true;
  }

  Status optimize(bool phase1) {
    const std::vector<double>& c = phase1 ? cost1_ : cost2_;
    std::size_t degenerate_run = 0;
    int confirmations = 0;
    Eigen::VectorXd alpha(static_cast<Eigen::Index>(m_));
    for (;;) {
      if (iter_ >= max_iter_) return Status::IterationLimit;
      if (opt_.deadline && iter_ % 16 == 0 && std::chrono::steady_clock::now() > *opt_.deadline)
        return Status::IterationLimit;
      if (since_refactor_ >= opt_.refactor_interval && !refactor()) return Status::Numeric;
      const Eigen::VectorXd y = duals(c);

      // Pricing: Dantzig, falling back to Bland's rule on long degenerate runs.
      const bool bland = degenerate_run >= kBlandAfter;
      std::ptrdiff_t q = -1;
      int dir = 0;
      double best = 0.0;
      for (std::size_t j = 0; j < N_; ++j) {
        if (state_[j] == State::Basic || lb_[j] == ub_[j]) continue;
        const double d = c[j] - column_dot(j, y);
        int jd = 0;
        if (state_[j] == State::AtLower) jd = d < -opt_.optimality_tol ? 1 : 0;
        else if (state_[j] == State::AtUpper) jd = d > opt_.optimality_tol ? -1 : 0;
        else if (std::fabs(d) > opt_.optimality_tol) jd = d < 0 ? 1 : -1;
        if (jd == 0) continue;
        if (bland) {
          q = static_cast<std::ptrdiff_t>(j);
          dir = jd;
          break;
        }
        if (std::fabs(d) > best) {
          best = std::fabs(d);
          q = static_cast<std::ptrdiff_t>(j);
          dir = jd;
        }
      }
      if (q < 0) {
        // Confirm optimality on a fresh factorization before returning.
        if (since_refactor_ == 0 || confirmations >= 2) return Status::Optimal;
        ++confirmations;
        if (!refactor()) return Status::Numeric;
        continue;
      }
      const std::size_t e = static_cast<std::size_t>(q);

      alpha.setZero();
      for (const auto& [i, a] : cols_[e]) alpha += a * binv_.col(i);

      // Ratio test (Harris two-pass; exact minimum under Bland).
      const double flip = (std::isfinite(ub_[e]) && std::isfinite(lb_[e])) ? ub_[e] - lb_[e] : kInfinity;
      double relaxed = kInfinity;
      double exact = kInfinity;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = dir * alpha(static_cast<Eigen::Index>(i));
        if (std::fabs(a) <= kPivotTol) continue;
        const std::size_t bv = head_[i];
        const double room = a > 0 ? x_[bv] - lb_[bv] : ub_[bv] - x_[bv];
        if (!std::isfinite(room)) continue;
        relaxed = std::min(relaxed, (std::max(room, 0.0) + opt_.feasibility_tol) / std::fabs(a));
        exact = std::min(exact, std::max(room, 0.0) / std::fabs(a));
      }
      if (std::isfinite(flip) && flip <= exact) {
        move(e, dir, flip, alpha);
        x_[e] = dir > 0 ? ub_[e] : lb_[e];
        state_[e] = dir > 0 ? State::AtUpper : State::AtLower;
        ++iter_;
        degenerate_run = 0;
        confirmations = 0;
        continue;
      }
      if (!std::isfinite(relaxed)) {
        if (phase1) return Status::Numeric;  // phase 1 is bounded below
        return Status::Unbounded;
      }
      std::ptrdiff_t r = -1;
      double best_piv = 0.0;
      double step = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = dir * alpha(static_cast<Eigen::Index>(i));
        if (std::fabs(a) <= kPivotTol) continue;
        const std::size_t bv = head_[i];
        const double room = a > 0 ? x_[bv] - lb_[bv] : ub_[bv] - x_[bv];
        if (!std::isfinite(room)) continue;
        const double ratio = std::max(room, 0.0) / std::fabs(a);
        if (bland) {
          if (ratio <= exact + 1e-12 && (r < 0 || head_[i] < head_[r])) {
            r = static_cast<std::ptrdiff_t>(i);
            step = ratio;
          }
        } else if (ratio <= relaxed && std::fabs(a) > best_piv) {
          best_piv = std::fabs(a);
          r = static_cast<std::ptrdiff_t>(i);
          step = ratio;
        }
      }
      if (r < 0) return Status::Numeric;
      const auto ri = static_cast<Eigen::Index>(r);
      const double piv = alpha(ri);
      if (std::fabs(piv) < 1e-11) {
        if (since_refactor_ == 0 || !refactor()) return Status::Numeric;
        continue;
      }
      move(e, dir, step, alpha);
      const std::size_t leave = head_[r];
      const bool to_lower = dir * piv > 0;
      x_[leave] = to_lower ? lb_[leave] : ub_[leave];
      state_[leave] = to_lower ? State::AtLower : State::AtUpper;
      pos_[leave] = -1;
      head_[r] = static_cast<int>(e);
      pos_[e] = static_cast<int>(r);
      state_[e] = State::Basic;

      const Eigen::RowVectorXd prow = binv_.row(ri) / piv;
      binv_.noalias() -= alpha * prow;
      binv_.row(ri) = prow;

      ++iter_;
      ++since_refactor_;
      degenerate_run = step <= 1e-12 ? degenerate_run + 1 : 0;
      confirmations = 0;
    }
  }

  void move(std::size_t e, int dir, double t, const Eigen::VectorXd& alpha) {
    if (t == 0.0) return;
    x_[e] += dir * t;
    for (std::size_t i = 0; i < m_; ++i) x_[head_[i]] -= dir * t * alpha(static_cast<Eigen::Index>(i));
  }

  LpOutcome failure(LpOutcome& out, const char* why) {
    out.status = LpStatus::NumericFailure;
    out.message = why;
    return out;
  }

  LpOutcome infeasible(LpOutcome& out) {
    if (!refactor()) return failure(out, "numerical breakdown while extracting an infeasibility ray");
    const Eigen::VectorXd y = duals(cost1_);
    out.farkas.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) out.farkas[i] = y(static_cast<Eigen::Index>(i)) * scale_[i];
    double ymax = 0.0;
    for (double v : out.farkas) ymax = std::max(ymax, std::fabs(v));
    double amax = 0.0;
    for (const auto& row : lp_.rows())
      for (const auto& [j, a] : row.terms) amax = std::max(amax, std::fabs(a));
    const double tiny = 1e-10 * std::max(1.0, ymax * amax);
    bool finite = false;
    const double gap = farkas_gap<double>(lp_, out.farkas, &finite, tiny);
    if (!finite || !(gap > tiny)) {
      out.farkas.clear();
      return failure(out, "phase 1 stalled above zero without a valid infeasibility ray");
    }
    out.status = LpStatus::Infeasible;
    out.message = "phase 1 optimum is positive";
    return out;
  }

  LpOutcome optimal(LpOutcome& out) {
    out.solution.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    for (std::size_t j = 0; j < n_; ++j) out.solution[j] = std::clamp(out.solution[j], lb_[j], ub_[j]);
    out.objective_value = lp_.objective_value(out.solution);
    const Eigen::VectorXd y = duals(cost2_);
    const double sgn = lp_.sense() == Sense::Maximize ? -1.0 : 1.0;
    out.row_duals.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) out.row_duals[i] = sgn * y(static_cast<Eigen::Index>(i)) * scale_[i];
    out.reduced_costs = lp_.objective();
    for (std::size_t i = 0; i < m_; ++i)
      for (const auto& [j, a] : lp_.rows()[i].terms) out.reduced_costs[j] -= a * out.row_duals[i];
    out.max_violation = lp_.max_violation(out.solution);
    double scale_ref = 1.0;
    for (const auto& row : lp_.rows()) scale_ref = std::max(scale_ref, std::fabs(row.rhs));
    if (out.max_violation > 1e-6 * scale_ref) return failure(out, "solution violates constraints after refactorization");
    out.status = LpStatus::Optimal;
    return out;
  }

  static constexpr double kPivotTol = 1e-9;
  static constexpr std::size_t kBlandAfter = 50;

  const LinearProgram& lp_;
  LpOptions opt_;
  std::size_t m_ = 0, n_ = 0, N_ = 0, first_art_ = 0;
  std::vector<double> scale_, b_, lb_, ub_, x_, cost1_, cost2_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<State> state_;
  std::vector<int> head_, pos_;
  Eigen::MatrixXd binv_;
  std::size_t iter_ = 0, since_refactor_ = 0, max_iter_ = 0;
  double phase1_tol_ = 0.0;
};

}  // namespace detail

/// Dense bounded-variable two-phase primal simplex.
inline LpOutcome solve(const LinearProgram& lp, const LpOptions& options = {}) {
  if (!(options.feasibility_tol > 0.0) || !(options.optimality_tol > 0.0))
    throw DomainError("LP tolerances must be positive");
  detail::SimplexSolver solver(lp, options);
  return solver.run();
}

/// Exact check that `ray` proves infeasibility of `lp`.  The ray is tried as
/// given and after rounding to nearby small-denominator rationals.
inline bool verify_infeasibility_exact(const LinearProgram& lp, const std::vector<double>& ray) {
  if (ray.size() != lp.num_rows()) return false;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<Rational> y;
    y.reserve(ray.size());
    for (double v : ray) y.push_back(attempt == 0 ? detail::rationalize(v) : Rational(v));
    bool finite = false;
    const Rational gap = detail::farkas_gap<Rational>(lp, y, &finite);
    if (finite && gap > 0) return true;
  }
  return false;
}

/// Some x with ‖Ax − b‖∞ ≤ 1e−9 (minimum norm when underdetermined), or
/// nullopt when no such x exists.
inline std::optional<Eigen::VectorXd> solve_linear_system(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                                          double tol = 1e-9) {
  if (A.rows() != b.size()) throw DimensionError("right-hand side length differs from row count");
  if (A.cols() == 0) {
    if (b.size() == 0 || b.cwiseAbs().maxCoeff() <= tol) return Eigen::VectorXd();
    return std::nullopt;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  Eigen::VectorXd x = cod.solve(b);
  if (A.rows() == 0) return x;
  if (!x.allFinite() || (A * x - b).cwiseAbs().maxCoeff() > tol) return std::nullopt;
  return x;
}

/// Human-readable CPLEX-style LP text, for debugging.
inline std::string to_lp_text(const LinearProgram& lp) {
  auto name = [&](std::size_t j) {
    return lp.vars()[j].name.empty() ? "x" + std::to_string(j) : lp.vars()[j].name;
  };
  auto term = [&](std::ostringstream& os, double a, std::size_t j, bool first) {
    if (a < 0) os << (first ? "- " : " - ") << -a << ' ' << name(j);
    else os << (first ? "" : " + ") << a << ' ' << name(j);
  };
  std::ostringstream os;
  os.precision(17);
  os << (lp.sense() == Sense::Minimize ? "Minimize\n" : "Maximize\n") << " obj:";
  bool first = true;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.objective()[j] == 0.0) continue;
    os << ' ';
    term(os, lp.objective()[j], j, first);
    first = false;
  }
  if (first) os << " 0";
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const auto& row = lp.rows()[i];
    os << ' ' << (row.name.empty() ? "r" + std::to_string(i) : row.name) << ':';
    bool f = true;
    for (const auto& [j, a] : row.terms) {
      os << ' ';
      term(os, a, j, f);
      f = false;
    }
    if (f) os << " 0 " << name(0);
    os << (row.relation == Relation::LessEqual ? " <= " : row.relation == Relation::Equal ? " = " : " >= ")
       << row.rhs << '\n';
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const auto& v = lp.vars()[j];
    if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) os << ' ' << name(j) << " free\n";
    else if (!std::isfinite(v.lower)) os << " -inf <= " << name(j) << " <= " << v.upper << '\n';
    else if (!std::isfinite(v.upper)) os << ' ' << name(j) << " >= " << v.lower << '\n';
    else os << ' ' << v.lower << " <= " << name(j) << " <= " << v.upper << '\n';
  }
  os << "End\n";
  return os.str();
}

}  // namespace lyapcert
