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

#ifndef RLT_LINEARIZE_HPP_
#define RLT_LINEARIZE_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rlt/expr.hpp"
#include "rlt/model.hpp"

namespace rlt {

// ---------------------------------------------------------------------------
// Cliques
// ---------------------------------------------------------------------------

struct CliqueLiteral {
  int var = -1;
  bool complemented = false;
};

/// Set-packing constraints over binary literals: sum of literals <= 1.
/// Lookup is by unordered variable pair; the complement pattern decides which
/// product identity applies.
class CliqueStore {
 public:
  void add_clique(std::vector<CliqueLiteral> members) {
    if (members.size() < 2) return;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        add_pair(members[a], members[b]);
    cliques_.push_back(std::move(members));
  }

  const std::vector<std::vector<CliqueLiteral>>& cliques() const { return cliques_; }

  /// True when some clique contains literals (u, comp_u) and (v, comp_v).
  bool has_pair(int u, bool comp_u, int v, bool comp_v) const {
    if (u > v) {
      std::swap(u, v);
      std::swap(comp_u, comp_v);
    }
    auto it = pair_masks_.find({u, v});
    if (it == pair_masks_.end()) return false;
    return (it->second >> (2 * (comp_u ? 1 : 0) + (comp_v ? 1 : 0))) & 1;
  }

  bool empty() const { return cliques_.empty(); }

 private:
  void add_pair(CliqueLiteral a, CliqueLiteral b) {
    if (a.var > b.var) std::swap(a, b);
    int bit = 2 * (a.complemented ? 1 : 0) + (b.complemented ? 1 : 0);
    pair_masks_[{a.var, b.var}] |= 1u << bit;
  }

  std::vector<std::vector<CliqueLiteral>> cliques_;
  std::map<std::pair<int, int>, unsigned> pair_masks_;
};

/// Harvests cliques from rows that syntactically have the set-packing shape:
/// all-binary support, coefficients +-1, and right side 1 - (#negative
/// coefficients). Both sides of two-sided rows are inspected.
inline CliqueStore mine_cliques(const Problem& problem) {
  CliqueStore store;
  auto try_side = [&](const LinearRow& row, bool negated) {
    double side = negated ? -row.lhs : row.rhs;
    if (!is_finite(side)) return;
    if (row.coeffs.size() < 2) return;
    std::vector<CliqueLiteral> members;
    int negatives = 0;
    for (const auto& [var, coef] : row.coeffs) {
      double c = negated ? -coef : coef;
      if (!problem.is_binary(var)) return;
      if (std::abs(std::abs(c) - 1.0) > 1e-12) return;
      if (c < 0.0) ++negatives;
      members.push_back({var, c < 0.0});
    }
    if (std::abs(side - (1.0 - negatives)) > 1e-9) return;
    store.add_clique(std::move(members));
  };
  for (const LinearRow& row : problem.rows) {
    try_side(row, false);
    try_side(row, true);
  }
  return store;
}

// ---------------------------------------------------------------------------
// Single-term approximators
// ---------------------------------------------------------------------------

enum class SquareSide { kUnder, kOver };

/// Linear approximator of x^2 on [lb, ub]: a tangent at x_star from below or
/// the secant through the endpoints from above. The secant requires finite
/// bounds; without them there is no linear overestimator.
inline std::optional<AffineExpr> square_approximator(int var, double lb, double ub,
                                                     double x_star, SquareSide side) {
  AffineExpr expr;
  if (side == SquareSide::kOver) {
    if (!is_finite(lb) || !is_finite(ub)) return std::nullopt;
    expr.add_term(var, lb + ub);
    expr.add_constant(-lb * ub);
    return expr;
  }
  double t = x_star;
  if (is_finite(lb)) t = std::max(t, lb);
  if (is_finite(ub)) t = std::min(t, ub);
  expr.add_term(var, 2.0 * t);
  expr.add_constant(-t * t);
  return expr;
}

// ---------------------------------------------------------------------------
// McCormick rows
// ---------------------------------------------------------------------------

struct McCormickRows {
  std::vector<LinearRow> rows;
  int skipped = 0;  // inequalities dropped for missing finite bounds
};

namespace lin_detail {

/// One McCormick inequality written on the relation's linear side:
///   linear_side (>=|<=) bi*x_j + bj*x_i - bi*bj,
/// where bi is the used bound of x_i and bj the used bound of x_j.
inline std::optional<LinearRow> envelope_row(const ProductRelation& rel,
                                             double bound_i, double bound_j,
                                             bool lower_side) {
  if (!is_finite(bound_i) || !is_finite(bound_j)) return std::nullopt;
  AffineExpr e = rel.linear_side();
  e.add_term(rel.j, -bound_i);
  e.add_term(rel.i, -bound_j);
  double shift = -e.constant() - bound_i * bound_j;
  LinearRow row;
  for (const auto& [var, coef] : e.terms()) row.coeffs[var] = coef;
  if (lower_side)
    row.lhs = shift;  // expr >= shift
  else
    row.rhs = shift;  // expr <= shift
  return row;
}

}  // namespace lin_detail

/// Envelope inequalities of the relation over the box of (x_i, x_j).
/// A relation whose linear side is below the product gets the concave
/// envelope, one above gets the convex envelope, an equality gets all four.
/// Inequalities whose bounds are infinite are skipped and counted.
inline McCormickRows mccormick(const Problem& problem, const ProductRelation& rel) {
  const double li = problem.lb(rel.i), ui = problem.ub(rel.i);
  const double lj = problem.lb(rel.j), uj = problem.ub(rel.j);
  McCormickRows out;
  auto push = [&](std::optional<LinearRow> row) {
    if (row)
      out.rows.push_back(std::move(*row));
    else
      ++out.skipped;
  };
  if (rel.sense == RelationSense::kGe || rel.sense == RelationSense::kEq) {
    // linear side >= product >= convex envelope
    push(lin_detail::envelope_row(rel, li, lj, true));
    push(lin_detail::envelope_row(rel, ui, uj, true));
  }
  if (rel.sense == RelationSense::kLe || rel.sense == RelationSense::kEq) {
    // linear side <= product <= concave envelope
    push(lin_detail::envelope_row(rel, li, uj, false));
    push(lin_detail::envelope_row(rel, ui, lj, false));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Term linearization
// ---------------------------------------------------------------------------

enum class LinearizationKind {
  kSubstitutedW,
  kBinarySquare,
  kSquareSecant,
  kSquareTangent,
  kClique,
  kMcCormickEnv,
  kUnknownMcCormick,
};

struct LinearizationOutcome {
  AffineExpr expr;
  LinearizationKind kind = LinearizationKind::kMcCormickEnv;
  bool uses_unknown_term = false;
  int relation_id = -1;  // set for kSubstitutedW
};

namespace lin_detail {

/// Best available envelope plane of x_k*x_j at the point x: the tightest
/// underestimating plane for under, the tightest overestimating plane for
/// over. Returns nullopt if no plane has the finite bounds it needs.
inline std::optional<AffineExpr> envelope_plane(const Problem& problem, int k, int j,
                                                const std::vector<double>& x,
                                                bool under) {
  const double lk = problem.lb(k), uk = problem.ub(k);
  const double lj = problem.lb(j), uj = problem.ub(j);
  // Planes (bk, bj) with value bj*x_k + bk*x_j - bk*bj.
  std::pair<double, double> pick[2];
  if (under) {
    pick[0] = {lk, lj};
    pick[1] = {uk, uj};
  } else {
    pick[0] = {lk, uj};
    pick[1] = {uk, lj};
  }
  bool found = false;
  double best_value = 0.0;
  std::pair<double, double> best{};
  for (const auto& [bk, bj] : pick) {
    if (!is_finite(bk) || !is_finite(bj)) continue;
    double value = bj * x[k] + bk * x[j] - bk * bj;
    bool better = !found || (under ? value > best_value : value < best_value);
    if (better) {
      found = true;
      best_value = value;
      best = {bk, bj};
    }
  }
  if (!found) return std::nullopt;
  AffineExpr expr;
  expr.add_term(k, best.second);
  expr.add_term(j, best.first);
  expr.add_constant(-best.first * best.second);
  return expr;
}

}  // namespace lin_detail

/// Replaces the bilinear term coef*x_k*x_j by a linear expression that
/// underestimates it on the feasible set, so that substituting it into the
/// <=-side of a valid inequality preserves validity. Rules are tried in a
/// fixed order: product-relation substitution, binary square, continuous
/// square, clique identity, envelope fallback. Returns nullopt when no valid
/// underestimator exists (the caller abandons the cut).
inline std::optional<LinearizationOutcome> linearize_term(
    double coef, int k, int j, const std::vector<double>& x_star,
    const Problem& problem, const ProductIndex& index, const CliqueStore& cliques) {
  LinearizationOutcome out;

  // Substitute the relation's linear side for the product when the relation
  // sense makes the substitution an underestimation for this coefficient
  // sign; equality relations allow both signs.
  for (int rel_id : index.relations_of(k, j)) {
    const ProductRelation& rel = problem.relations[rel_id];
    bool ok = rel.sense == RelationSense::kEq ||
              (rel.sense == RelationSense::kLe && coef >= 0.0) ||
              (rel.sense == RelationSense::kGe && coef <= 0.0);
    if (!ok) continue;
    out.expr.add_scaled(rel.linear_side(), coef);
    out.kind = LinearizationKind::kSubstitutedW;
    out.relation_id = rel_id;
    return out;
  }

  if (k == j) {
    if (problem.is_binary(j)) {
      out.expr.add_term(j, coef);
      out.kind = LinearizationKind::kBinarySquare;
      return out;
    }
    // coef*x_j^2: tangent under for positive coef, secant over for negative.
    SquareSide side = coef >= 0.0 ? SquareSide::kUnder : SquareSide::kOver;
    auto approx = square_approximator(j, problem.lb(j), problem.ub(j), x_star[j], side);
    if (!approx) return std::nullopt;
    out.expr.add_scaled(*approx, coef);
    out.kind = side == SquareSide::kUnder ? LinearizationKind::kSquareTangent
                                          : LinearizationKind::kSquareSecant;
    return out;
  }

  if (problem.is_binary(k) && problem.is_binary(j)) {
    // x_k + x_j <= 1        -> x_k*x_j = 0
    // x_k <= x_j            -> x_k*x_j = x_k
    // x_j <= x_k            -> x_k*x_j = x_j
    // x_k + x_j >= 1        -> x_k*x_j = x_k + x_j - 1
    if (cliques.has_pair(k, false, j, false)) {
      out.kind = LinearizationKind::kClique;
      return out;
    }
    if (cliques.has_pair(k, false, j, true)) {
      out.expr.add_term(k, coef);
      out.kind = LinearizationKind::kClique;
      return out;
    }
    if (cliques.has_pair(k, true, j, false)) {
      out.expr.add_term(j, coef);
      out.kind = LinearizationKind::kClique;
      return out;
    }
    if (cliques.has_pair(k, true, j, true)) {
      out.expr.add_term(k, coef);
      out.expr.add_term(j, coef);
      out.expr.add_constant(-coef);
      out.kind = LinearizationKind::kClique;
      return out;
    }
  }

  auto plane = lin_detail::envelope_plane(problem, k, j, x_star, coef >= 0.0);
  if (!plane) return std::nullopt;
  out.expr.add_scaled(*plane, coef);
  bool known = index.has_pair(k, j);
  out.kind = known ? LinearizationKind::kMcCormickEnv : LinearizationKind::kUnknownMcCormick;
  out.uses_unknown_term = !known;
  return out;
}

inline const char* to_string(LinearizationKind k) {
  switch (k) {
    case LinearizationKind::kSubstitutedW: return "substituted_w";
    case LinearizationKind::kBinarySquare: return "binary_square";
    case LinearizationKind::kSquareSecant: return "square_secant";
    case LinearizationKind::kSquareTangent: return "square_tangent";
    case LinearizationKind::kClique: return "clique";
    case LinearizationKind::kMcCormickEnv: return "mccormick_env";
    default: return "unknown_mccormick";
  }
}

}  // namespace rlt

#endif  // RLT_LINEARIZE_HPP_
