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

#ifndef RLT_SEPARATE_HPP_
#define RLT_SEPARATE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "rlt/linearize.hpp"
#include "rlt/model.hpp"
#include "rlt/simplex.hpp"

namespace rlt {

// ---------------------------------------------------------------------------
// Row marks
// ---------------------------------------------------------------------------

constexpr int kMarkLt = 1;
constexpr int kMarkGt = 2;
constexpr int kMarkBoth = 3;

struct MarkEntry {
  int factor_var;
  int row;
  int mark;
};

/// Sparse (factor variable, row) -> mark table, entries sorted; a merged
/// per-row view supports plain mark(r) lookups.
struct MarkTable {
  std::vector<MarkEntry> entries;
  std::map<int, int> by_row;

  int mark_of(int row, int factor_var) const {
    MarkEntry probe{factor_var, row, 0};
    auto it = std::lower_bound(entries.begin(), entries.end(), probe,
                               [](const MarkEntry& a, const MarkEntry& b) {
                                 return std::tie(a.factor_var, a.row) <
                                        std::tie(b.factor_var, b.row);
                               });
    if (it != entries.end() && it->factor_var == factor_var && it->row == row)
      return it->mark;
    return 0;
  }

  int row_mark(int row) const {
    auto it = by_row.find(row);
    return it == by_row.end() ? 0 : it->second;
  }

  bool empty() const { return entries.empty(); }
};

/// Column-wise view of the problem rows.
struct ColumnMatrix {
  std::vector<std::vector<std::pair<int, double>>> cols;  // var -> (row, coef)

  static ColumnMatrix build(const Problem& problem) {
    ColumnMatrix m;
    m.cols.assign(problem.num_vars(), {});
    for (const LinearRow& row : problem.rows)
      for (const auto& [var, coef] : row.coeffs)
        m.cols[var].emplace_back(row.id, coef);
    return m;
  }
};

constexpr double kProductTol = 1e-9;  // product-vs-relation equality slack

/// Marks the rows whose multiplication with a bound factor can give a cut
/// whose violation grows when product relations are substituted in. For a
/// relation on (p, q) with linear-side value v* and product value p*q*, the
/// mark for bound factors of one variable is driven by the row coefficients
/// of the other: the term a_rk * x_k * x_f in the reformulated row picks up
/// a_rk * (v* - p*) when substituted.
inline MarkTable mark_rows(const LpSolution& solution, const Problem& problem,
                           const ProductIndex& index, const ColumnMatrix& columns) {
  std::map<std::pair<int, int>, int> marks;  // (factor, row) -> bits
  for (const auto& [pair, rel_ids] : index.by_pair) {
    for (int rel_id : rel_ids) {
      const ProductRelation& rel = problem.relations[rel_id];
      const double prod = solution.x[rel.i] * solution.x[rel.j];
      const double value = rel.linear_side_value(solution.x);
      const double diff = prod - value;
      if (std::abs(diff) <= kProductTol) continue;
      const std::pair<int, int> orientations[2] = {{rel.i, rel.j}, {rel.j, rel.i}};
      for (const auto& [factor, scanned] : orientations) {
        for (const auto& [row, coef] : columns.cols[scanned]) {
          const double signed_diff = coef * diff;
          if (signed_diff < 0.0)
            marks[{factor, row}] |= kMarkLt;
          else if (signed_diff > 0.0)
            marks[{factor, row}] |= kMarkGt;
        }
        if (rel.i == rel.j) break;  // square relation: one orientation
      }
    }
  }
  MarkTable table;
  table.entries.reserve(marks.size());
  for (const auto& [key, mark] : marks) {
    table.entries.push_back({key.first, key.second, mark});
    table.by_row[key.second] |= mark;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Factor selection
// ---------------------------------------------------------------------------

enum class RowSense { kLe, kGe, kEq };

enum class FactorDirection { kLower, kUpper, kTimesX };

inline const char* to_string(FactorDirection d) {
  switch (d) {
    case FactorDirection::kLower: return "lower";
    case FactorDirection::kUpper: return "upper";
    default: return "times_x";
  }
}

struct FactorChoice {
  bool lower = false;
  bool upper = false;
};

/// Which bound factors a marked row is multiplied with. Equality rows are
/// split into both sides and always get both factors once marked.
inline FactorChoice factor_choices(int mark, RowSense sense) {
  if (mark == 0) return {};
  if (sense == RowSense::kEq || mark == kMarkBoth) return {true, true};
  if (sense == RowSense::kLe)
    return mark == kMarkLt ? FactorChoice{true, false} : FactorChoice{false, true};
  return mark == kMarkLt ? FactorChoice{false, true} : FactorChoice{true, false};
}

// ---------------------------------------------------------------------------
// One-sided rows and projection
// ---------------------------------------------------------------------------

/// A <=-normalized side of a problem row. Ranged and equality rows are split
/// before separation, so each side is its own cut source.
struct OneSidedRow {
  int row = -1;
  bool ge_side = false;  // built from the original >= side (negated)
  RowSense orig_sense = RowSense::kLe;
  std::vector<std::pair<int, double>> support;  // var-sorted
  double rhs = 0.0;
};

inline std::vector<OneSidedRow> normalize_rows(const Problem& problem) {
  std::vector<OneSidedRow> out;
  for (const LinearRow& row : problem.rows) {
    const bool eq = row.is_equality();
    if (is_finite(row.rhs)) {
      OneSidedRow os;
      os.row = row.id;
      os.orig_sense = eq ? RowSense::kEq : RowSense::kLe;
      for (const auto& [var, coef] : row.coeffs) os.support.emplace_back(var, coef);
      os.rhs = row.rhs;
      out.push_back(std::move(os));
    }
    if (is_finite(row.lhs)) {
      OneSidedRow os;
      os.row = row.id;
      os.ge_side = true;
      os.orig_sense = eq ? RowSense::kEq : RowSense::kGe;
      for (const auto& [var, coef] : row.coeffs) os.support.emplace_back(var, -coef);
      os.rhs = -row.lhs;
      out.push_back(std::move(os));
    }
  }
  return out;
}

/// The linear system restricted to the variables strictly between their
/// bounds at the solution; everything else is fixed at its value and moved
/// to the right-hand side.
struct ProjectedSystem {
  std::vector<std::uint8_t> in_j1;                        // per variable
  std::vector<std::vector<std::pair<int, double>>> support;  // per one-sided row
  std::vector<double> rhs;
};

inline ProjectedSystem project_rows(const std::vector<OneSidedRow>& rows,
                                    const LpSolution& solution, int num_vars) {
  ProjectedSystem sys;
  sys.in_j1.assign(num_vars, 0);
  for (int v = 0; v < num_vars; ++v)
    sys.in_j1[v] = !solution.at_lower[v] && !solution.at_upper[v];
  sys.support.resize(rows.size());
  sys.rhs.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double adjust = 0.0;
    for (const auto& [var, coef] : rows[r].support) {
      if (sys.in_j1[var])
        sys.support[r].emplace_back(var, coef);
      else
        adjust += coef * solution.x[var];
    }
    sys.rhs[r] = rows[r].rhs - adjust;
  }
  return sys;
}

inline ProjectedSystem project_rows(const Problem& problem, const LpSolution& solution) {
  return project_rows(normalize_rows(problem), solution, problem.num_vars());
}

// ---------------------------------------------------------------------------
// Cut generation
// ---------------------------------------------------------------------------

struct CutProvenance {
  int row = -1;
  bool ge_side = false;
  int factor_var = -1;
  FactorDirection direction = FactorDirection::kLower;
  std::vector<LinearizationKind> substitutions;
  int unknown_term_count = 0;
  int violation_increasing_subs = 0;
};

struct Cut {
  AffineExpr expr;  // pure linear; constant folded into rhs
  double rhs = 0.0;
  double violation_at = 0.0;
  CutProvenance provenance;

  std::tuple<int, bool, int, int> identity() const {
    return {provenance.row, provenance.ge_side, provenance.factor_var,
            static_cast<int>(provenance.direction)};
  }
};

enum class CutFailure { kNone, kInfiniteBound, kLinearization, kUnknownCap };

struct SeparationContext {
  const Problem& problem;
  const ProductIndex& index;
  const CliqueStore& cliques;
  int max_unknown_terms = 20;
  double cut_violation_tol = 1e-6;
};

/// Multiplies one <=-side of a row with a bound factor of x_f, linearizes
/// every product term and returns the resulting cut (regardless of its
/// violation; the caller filters). Support and rhs are passed explicitly so
/// projected rows can reuse the routine.
inline std::optional<Cut> generate_rlt_cut(
    const std::vector<std::pair<int, double>>& support, double rhs, int row_id,
    bool ge_side, int factor_var, FactorDirection direction,
    const SeparationContext& ctx, const std::vector<double>& x_star,
    int max_unknown_terms, CutFailure* failure = nullptr) {
  auto fail = [&](CutFailure f) {
    if (failure) *failure = f;
    return std::nullopt;
  };
  if (failure) *failure = CutFailure::kNone;
  const Problem& problem = ctx.problem;
  const bool lower = direction == FactorDirection::kLower;
  const double bound = lower ? problem.lb(factor_var) : problem.ub(factor_var);
  if (!is_finite(bound)) return fail(CutFailure::kInfiniteBound);

  Cut cut;
  cut.provenance.row = row_id;
  cut.provenance.ge_side = ge_side;
  cut.provenance.factor_var = factor_var;
  cut.provenance.direction = direction;
  const double sign = lower ? 1.0 : -1.0;

  for (const auto& [var, coef] : support) {
    const double prod_coef = sign * coef;
    auto outcome = linearize_term(prod_coef, var, factor_var, x_star, problem,
                                  ctx.index, ctx.cliques);
    if (!outcome) return fail(CutFailure::kLinearization);
    cut.expr.add_scaled(outcome->expr, 1.0);
    cut.provenance.substitutions.push_back(outcome->kind);
    if (outcome->uses_unknown_term &&
        ++cut.provenance.unknown_term_count > max_unknown_terms)
      return fail(CutFailure::kUnknownCap);
    if (outcome->kind == LinearizationKind::kSubstitutedW) {
      const ProductRelation& rel = problem.relations[outcome->relation_id];
      const double inc = prod_coef * (rel.linear_side_value(x_star) -
                                      x_star[var] * x_star[factor_var]);
      if (inc > kProductTol) ++cut.provenance.violation_increasing_subs;
    }
    // linear remainder of expanding the factor
    cut.expr.add_term(var, -sign * bound * coef);
  }
  cut.expr.add_term(factor_var, -sign * rhs);
  double cut_rhs = -sign * rhs * bound;

  cut_rhs -= cut.expr.constant();
  cut.expr.set_constant(0.0);
  cut.expr.prune(1e-12);
  cut.rhs = cut_rhs;
  cut.violation_at = cut.expr.value_at(x_star) - cut.rhs;
  return cut;
}

// ---------------------------------------------------------------------------
// Separation drivers
// ---------------------------------------------------------------------------

enum class SeparationMode { kBaseline, kMarking };

struct SeparationStats {
  long candidates_examined = 0;
  long cuts_built = 0;
  long cuts_kept = 0;
  long linearization_failures = 0;
  long unknown_capped = 0;
  long projection_filtered = 0;
};

struct SeparationResult {
  std::vector<Cut> cuts;
  SeparationStats stats;
};

/// Generates violated RLT cuts at the LP solution. Baseline mode tries every
/// (row side, product variable, finite bound factor); marking mode only the
/// combinations the mark table selects. With projection on, a candidate's
/// cut is first built on the projected system and the full cut only when the
/// projected one is violated.
inline SeparationResult separate_rlt(const LpSolution& solution, SeparationMode mode,
                                     bool projection, const SeparationContext& ctx) {
  SeparationResult result;
  if (!solution.optimal()) return result;
  const Problem& problem = ctx.problem;
  const std::vector<OneSidedRow> rows = normalize_rows(problem);
  const std::vector<int> factors = ctx.index.product_vars();

  // (one-sided row index, factor var, direction)
  std::vector<std::tuple<int, int, int>> candidates;
  auto push_candidate = [&](int row_idx, int factor, FactorDirection dir) {
    const double b = dir == FactorDirection::kLower ? problem.lb(factor)
                                                    : problem.ub(factor);
    if (!is_finite(b)) return;
    candidates.emplace_back(row_idx, factor, static_cast<int>(dir));
  };

  if (mode == SeparationMode::kBaseline) {
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (int f : factors) {
        push_candidate(static_cast<int>(r), f, FactorDirection::kLower);
        push_candidate(static_cast<int>(r), f, FactorDirection::kUpper);
      }
  } else {
    const ColumnMatrix columns = ColumnMatrix::build(problem);
    const MarkTable marks = mark_rows(solution, problem, ctx.index, columns);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (const MarkEntry& entry : marks.entries) {
        if (entry.row != rows[r].row) continue;
        FactorChoice choice = factor_choices(entry.mark, rows[r].orig_sense);
        if (choice.lower)
          push_candidate(static_cast<int>(r), entry.factor_var, FactorDirection::kLower);
        if (choice.upper)
          push_candidate(static_cast<int>(r), entry.factor_var, FactorDirection::kUpper);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::optional<ProjectedSystem> projected;
  if (projection)
    projected = project_rows(rows, solution, problem.num_vars());

  std::set<std::tuple<int, bool, int, int>> seen;
  for (const auto& [row_idx, factor, dir_int] : candidates) {
    const OneSidedRow& os = rows[row_idx];
    const FactorDirection dir = static_cast<FactorDirection>(dir_int);
    if (!seen.insert({os.row, os.ge_side, factor, dir_int}).second) continue;
    ++result.stats.candidates_examined;

    CutFailure failure = CutFailure::kNone;
    if (projection) {
      auto pcut = generate_rlt_cut(projected->support[row_idx], projected->rhs[row_idx],
                                   os.row, os.ge_side, factor, dir, ctx, solution.x,
                                   std::numeric_limits<int>::max(), &failure);
      if (!pcut) {
        ++result.stats.linearization_failures;
        continue;
      }
      if (pcut->violation_at <= ctx.cut_violation_tol) {
        ++result.stats.projection_filtered;
        continue;
      }
    }

    auto cut = generate_rlt_cut(os.support, os.rhs, os.row, os.ge_side, factor, dir,
                                ctx, solution.x, ctx.max_unknown_terms, &failure);
    if (!cut) {
      if (failure == CutFailure::kUnknownCap)
        ++result.stats.unknown_capped;
      else
        ++result.stats.linearization_failures;
      continue;
    }
    ++result.stats.cuts_built;
    if (cut->violation_at > ctx.cut_violation_tol) {
      result.cuts.push_back(std::move(*cut));
      ++result.stats.cuts_kept;
    }
  }
  return result;
}

}  // namespace rlt

#endif  // RLT_SEPARATE_HPP_
