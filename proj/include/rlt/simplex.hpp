// Copyright 2026 The rltcut Authors
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

#ifndef RLT_SIMPLEX_HPP_
#define RLT_SIMPLEX_HPP_

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "rlt/linearize.hpp"
#include "rlt/model.hpp"

namespace rlt {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    default: return "iteration_limit";
  }
}

/// One-sided (<=) or equality row over structural columns.
struct LpRow {
  std::map<int, double> coeffs;
  double rhs = 0.0;
  bool equality = false;
};

struct LpInstance {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> objective;  // minimized
  double objective_constant = 0.0;
  std::vector<LpRow> rows;

  int num_cols() const { return static_cast<int>(lower.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
};

enum class ColStatus : std::int8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFree = 3 };

/// Simplex basis snapshot; reusable as a warm start, also after rows were
/// appended (new slacks then start basic).
struct Basis {
  std::vector<int> basic;              // basic column per row
  std::vector<ColStatus> status;       // per column, slacks included
  bool empty() const { return status.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  std::vector<double> x;               // structural values
  double objective = 0.0;
  long iterations = 0;
  std::vector<std::uint8_t> at_lower;  // |x - lb| <= eps_bound
  std::vector<std::uint8_t> at_upper;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

struct LpOptions {
  const Basis* warm = nullptr;
  const std::vector<LpRow>* added_rows = nullptr;
  // (column, lb, ub) overrides, applied on top of the instance bounds
  const std::vector<std::tuple<int, double, double>>* bound_overrides = nullptr;
  long max_pivots = 0;  // 0: 100*(rows+cols)
  Basis* basis_out = nullptr;
};

namespace simplex_detail {

constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-9;
constexpr int kRefactorEvery = 64;
constexpr int kStallLimit = 50;  // non-improving pivots before Bland kicks in

/// Dense bounded-variable primal simplex over structural + slack columns.
/// Phase 1 minimizes the total bound infeasibility of the basic variables
/// (no artificial columns), which makes warm starts with freshly appended
/// violated rows cheap to repair.
class Solver {
 public:
  Solver(const LpInstance& lp, const LpOptions& opts) : lp_(lp), opts_(opts) {
    n_ = lp.num_cols();
    m_ = lp.num_rows() + (opts.added_rows ? static_cast<int>(opts.added_rows->size()) : 0);
    total_ = n_ + m_;
    lower_.assign(total_, 0.0);
    upper_.assign(total_, 0.0);
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lower_[j] = lp.lower[j];
      upper_[j] = lp.upper[j];
      cost_[j] = lp.objective[j];
    }
    if (opts.bound_overrides)
      for (const auto& [col, lb, ub] : *opts.bound_overrides) {
        lower_[col] = lb;
        upper_[col] = ub;
      }
    rows_.reserve(m_);
    for (const LpRow& r : lp.rows) rows_.push_back(&r);
    if (opts.added_rows)
      for (const LpRow& r : *opts.added_rows) rows_.push_back(&r);
    for (int r = 0; r < m_; ++r) {
      lower_[n_ + r] = 0.0;
      upper_[n_ + r] = rows_[r]->equality ? 0.0 : kInf;
    }
    cols_.assign(total_, {});
    for (int r = 0; r < m_; ++r) {
      for (const auto& [var, coef] : rows_[r]->coeffs) cols_[var].emplace_back(r, coef);
      cols_[n_ + r].emplace_back(r, 1.0);
    }
  }

  LpSolution run() {
    LpSolution sol;
    max_pivots_ = opts_.max_pivots > 0 ? opts_.max_pivots : 100L * (m_ + n_);

    if (!init_basis()) {
      // warm basis unusable; retry cold
      opts_warm_ok_ = false;
      init_basis();
    }
    if (singular_) {
      sol.status = LpStatus::kIterationLimit;
      finalize(sol);
      return sol;
    }

    bool feasible = iterate(/*phase1=*/true);
    if (iterations_ >= max_pivots_) {
      sol.status = LpStatus::kIterationLimit;
      finalize(sol);
      return sol;
    }
    if (!feasible) {
      sol.status = LpStatus::kInfeasible;
      finalize(sol);
      return sol;
    }
    bool bounded = iterate(/*phase1=*/false);
    if (iterations_ >= max_pivots_)
      sol.status = LpStatus::kIterationLimit;
    else
      sol.status = bounded ? LpStatus::kOptimal : LpStatus::kUnbounded;
    finalize(sol);
    return sol;
  }

 private:
  bool fixed(int j) const { return lower_[j] == upper_[j]; }

  double nonbasic_value(int j) const {
    switch (status_[j]) {
      case ColStatus::kAtLower: return lower_[j];
      case ColStatus::kAtUpper: return upper_[j];
      default: return 0.0;
    }
  }

  double col_value(int j) const {
    return status_[j] == ColStatus::kBasic ? xb_[basic_pos_[j]] : nonbasic_value(j);
  }

  ColStatus default_status(int j) const {
    if (is_finite(lower_[j])) return ColStatus::kAtLower;
    if (is_finite(upper_[j])) return ColStatus::kAtUpper;
    return ColStatus::kFree;
  }

  bool init_basis() {
    status_.assign(total_, ColStatus::kAtLower);
    basic_.assign(m_, -1);
    basic_pos_.assign(total_, -1);
    singular_ = false;

    const Basis* warm = opts_warm_ok_ ? opts_.warm : nullptr;
    bool used_warm = false;
    if (warm && !warm->empty()) {
      const int warm_cols = static_cast<int>(warm->status.size());
      const int warm_rows = static_cast<int>(warm->basic.size());
      // A warm basis may predate the added rows: statuses for the missing
      // slacks default to basic.
      if (warm_cols <= total_ && warm_rows <= m_ &&
          warm_cols == n_ + warm_rows) {
        used_warm = true;
        for (int j = 0; j < n_; ++j) status_[j] = warm->status[j];
        for (int r = 0; r < warm_rows; ++r) status_[n_ + r] = warm->status[n_ + r];
        for (int r = warm_rows; r < m_; ++r) status_[n_ + r] = ColStatus::kBasic;
        int pos = 0;
        for (int r = 0; r < warm_rows; ++r) {
          int col = warm->basic[r];
          if (col < 0 || col >= n_ + warm_rows || basic_pos_[col] >= 0 ||
              status_[col] != ColStatus::kBasic) {
            used_warm = false;
            break;
          }
          basic_[pos] = col;
          basic_pos_[col] = pos;
          ++pos;
        }
        if (used_warm) {
          for (int r = warm_rows; r < m_; ++r) {
            basic_[pos] = n_ + r;
            basic_pos_[n_ + r] = pos;
            ++pos;
          }
          int nbasic = 0;
          for (int j = 0; j < total_; ++j)
            if (status_[j] == ColStatus::kBasic) ++nbasic;
          if (nbasic != m_) used_warm = false;
        }
        if (!used_warm) {
          status_.assign(total_, ColStatus::kAtLower);
          basic_.assign(m_, -1);
          basic_pos_.assign(total_, -1);
        }
      }
    }

    if (!used_warm) {
      for (int j = 0; j < n_; ++j) status_[j] = default_status(j);
      for (int r = 0; r < m_; ++r) {
        status_[n_ + r] = ColStatus::kBasic;
        basic_[r] = n_ + r;
        basic_pos_[n_ + r] = r;
      }
    } else {
      for (int j = 0; j < total_; ++j)
        if (status_[j] != ColStatus::kBasic) {
          if (status_[j] == ColStatus::kAtLower && !is_finite(lower_[j]))
            status_[j] = default_status(j);
          if (status_[j] == ColStatus::kAtUpper && !is_finite(upper_[j]))
            status_[j] = default_status(j);
        }
    }

    if (!refactor()) {
      if (used_warm) return false;  // cold retry
      singular_ = true;
    }
    return true;
  }

  /// Rebuilds binv_ from the basic set and recomputes basic values.
  bool refactor() {
    // Gauss-Jordan inversion of the basis matrix with partial pivoting.
    std::vector<double> mat(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int pos = 0; pos < m_; ++pos)
      for (const auto& [row, coef] : cols_[basic_[pos]])
        mat[static_cast<std::size_t>(row) * m_ + pos] = coef;
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    for (int col = 0; col < m_; ++col) {
      int piv = -1;
      double best = 1e-11;
      for (int row = col; row < m_; ++row) {
        double v = std::abs(mat[static_cast<std::size_t>(row) * m_ + col]);
        if (v > best) {
          best = v;
          piv = row;
        }
      }
      if (piv < 0) return false;
      if (piv != col) {
        for (int k = 0; k < m_; ++k) {
          std::swap(mat[static_cast<std::size_t>(piv) * m_ + k],
                    mat[static_cast<std::size_t>(col) * m_ + k]);
          std::swap(binv_[static_cast<std::size_t>(piv) * m_ + k],
                    binv_[static_cast<std::size_t>(col) * m_ + k]);
        }
      }
      double p = mat[static_cast<std::size_t>(col) * m_ + col];
      for (int k = 0; k < m_; ++k) {
        mat[static_cast<std::size_t>(col) * m_ + k] /= p;
        binv_[static_cast<std::size_t>(col) * m_ + k] /= p;
      }
      for (int row = 0; row < m_; ++row) {
        if (row == col) continue;
        double f = mat[static_cast<std::size_t>(row) * m_ + col];
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          mat[static_cast<std::size_t>(row) * m_ + k] -=
              f * mat[static_cast<std::size_t>(col) * m_ + k];
          binv_[static_cast<std::size_t>(row) * m_ + k] -=
              f * binv_[static_cast<std::size_t>(col) * m_ + k];
        }
      }
    }
    recompute_basics();
    return true;
  }

  void recompute_basics() {
    std::vector<double> resid(m_, 0.0);
    for (int r = 0; r < m_; ++r) resid[r] = rows_[r]->rhs;
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == ColStatus::kBasic) continue;
      double v = nonbasic_value(j);
      if (v == 0.0) continue;
      for (const auto& [row, coef] : cols_[j]) resid[row] -= coef * v;
    }
    xb_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      const double* bi = &binv_[static_cast<std::size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) s += bi[k] * resid[k];
      xb_[i] = s;
    }
  }

  std::vector<double> ftran(int j) const {
    std::vector<double> w(m_, 0.0);
    for (const auto& [row, coef] : cols_[j])
      for (int i = 0; i < m_; ++i)
        w[i] += binv_[static_cast<std::size_t>(i) * m_ + row] * coef;
    return w;
  }

  double infeasibility() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) {
      int col = basic_[i];
      if (xb_[i] < lower_[col]) s += lower_[col] - xb_[i];
      if (xb_[i] > upper_[col]) s += xb_[i] - upper_[col];
    }
    return s;
  }

  double phase2_objective() const {
    double s = 0.0;
    for (int j = 0; j < total_; ++j) {
      if (cost_[j] == 0.0) continue;
      s += cost_[j] * col_value(j);
    }
    return s;
  }

  /// Runs pivots until the phase goal is reached. Returns true on success
  /// (phase 1: feasible; phase 2: optimal), false on failure (phase 1:
  /// infeasible; phase 2: unbounded). Hitting the pivot budget leaves
  /// iterations_ >= max_pivots_ for the caller to inspect.
  bool iterate(bool phase1) {
    int stall = 0;
    double last_goal = phase1 ? infeasibility() : phase2_objective();
    while (true) {
      if (phase1 && infeasibility() <= kFeasTol) return true;
      if (iterations_ >= max_pivots_) return !phase1;

      // Phase-1 costs mark the violated bound direction of each basic.
      std::vector<double> phase_cost;
      const std::vector<double>* cost = &cost_;
      if (phase1) {
        phase_cost.assign(total_, 0.0);
        for (int i = 0; i < m_; ++i) {
          int col = basic_[i];
          if (xb_[i] < lower_[col] - kFeasTol) phase_cost[col] = -1.0;
          else if (xb_[i] > upper_[col] + kFeasTol) phase_cost[col] = 1.0;
        }
        cost = &phase_cost;
      }

      // y = c_B * B^-1
      std::vector<double> y(m_, 0.0);
      for (int i = 0; i < m_; ++i) {
        double cb = (*cost)[basic_[i]];
        if (cb == 0.0) continue;
        const double* bi = &binv_[static_cast<std::size_t>(i) * m_];
        for (int k = 0; k < m_; ++k) y[k] += cb * bi[k];
      }

      const bool bland = stall >= kStallLimit;
      int enter = -1, dir = 0;
      double best_score = kDualTol;
      for (int j = 0; j < total_; ++j) {
        if (status_[j] == ColStatus::kBasic || fixed(j)) continue;
        double d = (*cost)[j];
        for (const auto& [row, coef] : cols_[j]) d -= y[row] * coef;
        int cand_dir = 0;
        if (status_[j] == ColStatus::kAtLower && d < -kDualTol) cand_dir = 1;
        else if (status_[j] == ColStatus::kAtUpper && d > kDualTol) cand_dir = -1;
        else if (status_[j] == ColStatus::kFree && std::abs(d) > kDualTol)
          cand_dir = d < 0.0 ? 1 : -1;
        if (cand_dir == 0) continue;
        if (bland) {
          enter = j;
          dir = cand_dir;
          break;
        }
        if (std::abs(d) > best_score) {
          best_score = std::abs(d);
          enter = j;
          dir = cand_dir;
        }
      }
      if (enter < 0) {
        if (phase1) return infeasibility() <= kFeasTol;
        return true;  // optimal
      }

      std::vector<double> w = ftran(enter);

      // Ratio test. Basic variables block at the first bound they meet;
      // infeasible basics moving toward their violated bound block exactly
      // when they reach it.
      double t_best = kInf;
      int leave_pos = -1;
      double leave_pivot = 0.0;
      int leave_bound = 0;  // 1: lower, 2: upper
      if (is_finite(lower_[enter]) && is_finite(upper_[enter]))
        t_best = upper_[enter] - lower_[enter];  // bound flip
      for (int i = 0; i < m_; ++i) {
        double delta = dir * w[i];
        if (std::abs(delta) <= kPivotTol) continue;
        int col = basic_[i];
        double v = xb_[i];
        double t = kInf;
        int bound = 0;
        if (v < lower_[col] - kFeasTol) {
          if (delta < 0.0) {  // moving up toward its lower bound
            t = (lower_[col] - v) / (-delta);
            bound = 1;
          }
        } else if (v > upper_[col] + kFeasTol) {
          if (delta > 0.0) {
            t = (v - upper_[col]) / delta;
            bound = 2;
          }
        } else if (delta > 0.0) {
          if (is_finite(lower_[col])) {
            t = (v - lower_[col]) / delta;
            bound = 1;
          }
        } else {
          if (is_finite(upper_[col])) {
            t = (v - upper_[col]) / delta;
            bound = 2;
          }
        }
        if (bound == 0) continue;
        t = std::max(t, 0.0);
        bool better = t < t_best - 1e-12;
        if (!better && t < t_best + 1e-12 && leave_pos >= 0) {
          // deterministic tie break: larger pivot, then smaller column id
          if (std::abs(w[i]) > std::abs(leave_pivot) + 1e-12)
            better = true;
          else if (std::abs(std::abs(w[i]) - std::abs(leave_pivot)) <= 1e-12 &&
                   col < basic_[leave_pos])
            better = true;
        } else if (!better && t < t_best + 1e-12 && leave_pos < 0 && t <= t_best) {
          better = true;
        }
        if (better) {
          t_best = t;
          leave_pos = i;
          leave_pivot = w[i];
          leave_bound = bound;
        }
      }

      if (!is_finite(t_best)) {
        if (phase1) return infeasibility() <= kFeasTol;
        return false;  // unbounded
      }

      ++iterations_;
      if (leave_pos < 0) {
        // bound flip of the entering column
        for (int i = 0; i < m_; ++i) xb_[i] -= dir * t_best * w[i];
        status_[enter] =
            status_[enter] == ColStatus::kAtLower ? ColStatus::kAtUpper : ColStatus::kAtLower;
      } else {
        double enter_value = nonbasic_value(enter) + dir * t_best;
        int leave_col = basic_[leave_pos];
        for (int i = 0; i < m_; ++i)
          if (i != leave_pos) xb_[i] -= dir * t_best * w[i];
        // binv update: row r scaled by the pivot, eliminated elsewhere
        double pivot = w[leave_pos];
        double* br = &binv_[static_cast<std::size_t>(leave_pos) * m_];
        for (int k = 0; k < m_; ++k) br[k] /= pivot;
        for (int i = 0; i < m_; ++i) {
          if (i == leave_pos) continue;
          double f = w[i];
          if (f == 0.0) continue;
          double* bi = &binv_[static_cast<std::size_t>(i) * m_];
          for (int k = 0; k < m_; ++k) bi[k] -= f * br[k];
        }
        status_[leave_col] = leave_bound == 1 ? ColStatus::kAtLower : ColStatus::kAtUpper;
        if (!is_finite(leave_bound == 1 ? lower_[leave_col] : upper_[leave_col]))
          status_[leave_col] = ColStatus::kFree;
        basic_pos_[leave_col] = -1;
        basic_[leave_pos] = enter;
        basic_pos_[enter] = leave_pos;
        status_[enter] = ColStatus::kBasic;
        xb_[leave_pos] = enter_value;
      }

      if (iterations_ % kRefactorEvery == 0) {
        if (!refactor()) {
          singular_ = true;
          return !phase1;
        }
      }

      double goal = phase1 ? infeasibility() : phase2_objective();
      if (goal < last_goal - 1e-12) stall = 0;
      else ++stall;
      last_goal = goal;
    }
  }

  void finalize(LpSolution& sol) {
    if (sol.status == LpStatus::kOptimal) {
      refactor();  // sharpen values before reporting
      if (infeasibility() > kFeasTol) sol.status = LpStatus::kIterationLimit;
    }
    sol.iterations = iterations_;
    sol.x.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) sol.x[j] = col_value(j);
    sol.objective = lp_.objective_constant;
    for (int j = 0; j < n_; ++j) sol.objective += cost_[j] * sol.x[j];
    sol.at_lower.assign(n_, 0);
    sol.at_upper.assign(n_, 0);
    for (int j = 0; j < n_; ++j) {
      if (is_finite(lower_[j]) && std::abs(sol.x[j] - lower_[j]) <= kFeasTol)
        sol.at_lower[j] = 1;
      if (is_finite(upper_[j]) && std::abs(sol.x[j] - upper_[j]) <= kFeasTol)
        sol.at_upper[j] = 1;
    }
    if (opts_.basis_out) {
      opts_.basis_out->basic = basic_;
      opts_.basis_out->status = status_;
    }
  }

  const LpInstance& lp_;
  const LpOptions& opts_;
  bool opts_warm_ok_ = true;
  int n_ = 0, m_ = 0, total_ = 0;
  std::vector<const LpRow*> rows_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lower_, upper_, cost_;
  std::vector<ColStatus> status_;
  std::vector<int> basic_, basic_pos_;
  std::vector<double> binv_, xb_;
  long iterations_ = 0;
  long max_pivots_ = 0;
  bool singular_ = false;
};

}  // namespace simplex_detail

/// Solves the LP (optionally with appended rows, bound overrides and a warm
/// basis). Deterministic: identical inputs give identical runs.
inline LpSolution solve_lp(const LpInstance& lp, const LpOptions& opts = {}) {
  simplex_detail::Solver solver(lp, opts);
  return solver.run();
}

/// Builds the initial LP relaxation: variable bounds and rows verbatim, plus
/// (optionally) the envelope rows of every product relation whose bound data
/// is finite.
inline LpInstance lp_from_problem(const Problem& problem, bool include_mccormick) {
  LpInstance lp;
  const int n = problem.num_vars();
  lp.lower.resize(n);
  lp.upper.resize(n);
  lp.objective.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    lp.lower[j] = problem.lb(j);
    lp.upper[j] = problem.ub(j);
  }
  for (const auto& [var, coef] : problem.objective.terms()) lp.objective[var] = coef;
  lp.objective_constant = problem.objective.constant();

  auto append = [&](const LinearRow& row) {
    if (row.is_equality()) {
      LpRow r;
      r.coeffs = row.coeffs;
      r.rhs = row.rhs;
      r.equality = true;
      lp.rows.push_back(std::move(r));
      return;
    }
    if (is_finite(row.rhs)) {
      LpRow r;
      r.coeffs = row.coeffs;
      r.rhs = row.rhs;
      lp.rows.push_back(std::move(r));
    }
    if (is_finite(row.lhs)) {
      LpRow r;
      for (const auto& [var, coef] : row.coeffs) r.coeffs[var] = -coef;
      r.rhs = -row.lhs;
      lp.rows.push_back(std::move(r));
    }
  };

  for (const LinearRow& row : problem.rows) append(row);
  if (include_mccormick)
    for (const ProductRelation& rel : problem.relations)
      for (const LinearRow& row : mccormick(problem, rel).rows) append(row);
  return lp;
}

}  // namespace rlt

#endif  // RLT_SIMPLEX_HPP_
