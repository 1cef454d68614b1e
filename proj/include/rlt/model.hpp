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

#ifndef RLT_MODEL_HPP_
#define RLT_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rlt/expr.hpp"

namespace rlt {

enum class VarKind { kContinuous, kBinary };

struct Variable {
  int id = -1;
  std::string name;
  double lb = -kInf;
  double ub = kInf;
  VarKind kind = VarKind::kContinuous;
};

/// Two-sided linear row lhs <= coeffs*x <= rhs; either side may be infinite.
/// Equality rows have lhs == rhs. No explicit zero coefficients are stored.
struct LinearRow {
  int id = -1;
  std::string name;
  std::map<int, double> coeffs;
  double lhs = -kInf;
  double rhs = kInf;

  bool is_equality() const { return lhs == rhs && is_finite(lhs); }
};

enum class RelationSense { kLe, kGe, kEq };

inline const char* to_string(RelationSense s) {
  switch (s) {
    case RelationSense::kLe: return "le";
    case RelationSense::kGe: return "ge";
    default: return "eq";
  }
}

/// Product relation  A*x_i + B*w + C*x_j + D  (sense)  x_i*x_j.
/// Explicit relations have A = C = D = 0 and B = 1, i.e. w (sense) x_i*x_j.
struct ProductRelation {
  int i = -1;
  int j = -1;
  int w = -1;
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;
  double d = 0.0;
  RelationSense sense = RelationSense::kEq;

  bool is_explicit() const { return a == 0.0 && c == 0.0 && d == 0.0 && b == 1.0; }

  /// The linear side as an affine expression over problem variables.
  AffineExpr linear_side() const {
    AffineExpr e(d);
    e.add_term(i, a);
    e.add_term(w, b);
    e.add_term(j, c);
    return e;
  }

  double linear_side_value(const std::vector<double>& x) const {
    return a * x[i] + b * x[w] + c * x[j] + d;
  }
};

struct Problem {
  std::vector<Variable> variables;
  std::vector<LinearRow> rows;
  AffineExpr objective;  // minimized
  std::vector<ProductRelation> relations;

  int num_vars() const { return static_cast<int>(variables.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  bool is_binary(int v) const { return variables[v].kind == VarKind::kBinary; }
  double lb(int v) const { return variables[v].lb; }
  double ub(int v) const { return variables[v].ub; }

  const std::string& var_name(int v) const { return variables[v].name; }
};

struct ValidationIssue {
  std::string location;
  std::string message;
};

using ValidationReport = std::vector<ValidationIssue>;

/// Checks every structural invariant of the problem; an empty report means
/// the problem is well formed.
inline ValidationReport validate(const Problem& problem) {
  ValidationReport report;
  auto fail = [&](std::string where, std::string what) {
    report.push_back({std::move(where), std::move(what)});
  };

  const int n = problem.num_vars();
  for (const Variable& v : problem.variables) {
    std::string loc = "variable " + v.name;
    if (std::isnan(v.lb) || std::isnan(v.ub)) fail(loc, "NaN bound");
    if (is_finite(v.lb) && is_finite(v.ub) && v.lb > v.ub)
      fail(loc, "lb > ub");
    if (v.kind == VarKind::kBinary) {
      if (!is_finite(v.lb) || !is_finite(v.ub))
        fail(loc, "binary variable with infinite bound");
      else if (v.lb < 0.0 || v.ub > 1.0)
        fail(loc, "binary variable bounds outside [0,1]");
    }
  }

  for (const LinearRow& row : problem.rows) {
    std::string loc = "row " + row.name;
    if (!is_finite(row.lhs) && !is_finite(row.rhs))
      fail(loc, "both sides infinite");
    if (is_finite(row.lhs) && is_finite(row.rhs) && row.lhs > row.rhs)
      fail(loc, "lhs > rhs");
    for (const auto& [var, coef] : row.coeffs) {
      if (var < 0 || var >= n) fail(loc, "coefficient on unknown variable");
      if (coef == 0.0) fail(loc, "stored zero coefficient");
      if (std::isnan(coef)) fail(loc, "NaN coefficient");
    }
  }

  for (const auto& [var, coef] : problem.objective.terms()) {
    if (var < 0 || var >= n) fail("objective", "coefficient on unknown variable");
    if (std::isnan(coef)) fail("objective", "NaN coefficient");
  }

  for (std::size_t r = 0; r < problem.relations.size(); ++r) {
    const ProductRelation& rel = problem.relations[r];
    std::string loc = "relation " + std::to_string(r);
    bool vars_ok = true;
    for (int v : {rel.i, rel.j, rel.w}) {
      if (v < 0 || v >= n) {
        fail(loc, "unknown variable reference");
        vars_ok = false;
      }
    }
    if (!vars_ok) continue;
    if (rel.b == 0.0) fail(loc, "B = 0");
    for (double coef : {rel.a, rel.b, rel.c, rel.d})
      if (std::isnan(coef)) fail(loc, "NaN coefficient");
    if (!rel.is_explicit() && !problem.is_binary(rel.i))
      fail(loc, "implicit relation with non-binary x_i");
  }

  return report;
}

/// Adjacency index over product relations: partners of a variable and
/// relations of an unordered pair, both id-sorted.
struct ProductIndex {
  // var -> sorted list of (partner var, relation id)
  std::map<int, std::vector<std::pair<int, int>>> by_var;
  // {min(i,j), max(i,j)} -> sorted relation ids
  std::map<std::pair<int, int>, std::vector<int>> by_pair;
  // ids of relations dropped as exact duplicates of an earlier one
  std::vector<int> duplicates;

  const std::vector<std::pair<int, int>>& partners(int var) const {
    static const std::vector<std::pair<int, int>> kEmpty;
    auto it = by_var.find(var);
    return it == by_var.end() ? kEmpty : it->second;
  }

  const std::vector<int>& relations_of(int u, int v) const {
    static const std::vector<int> kEmpty;
    auto it = by_pair.find(std::minmax(u, v));
    return it == by_pair.end() ? kEmpty : it->second;
  }

  bool has_pair(int u, int v) const { return !relations_of(u, v).empty(); }

  /// Variables that occur in some relation as i or j, sorted.
  std::vector<int> product_vars() const {
    std::vector<int> out;
    out.reserve(by_var.size());
    for (const auto& [var, list] : by_var) out.push_back(var);
    return out;
  }
};

inline ProductIndex build_product_index(const Problem& problem) {
  ProductIndex index;
  for (std::size_t r = 0; r < problem.relations.size(); ++r) {
    const ProductRelation& rel = problem.relations[r];
    // Exact duplicates of an earlier relation (same i, j, w, coefficients and
    // sense, up to i/j order) are skipped and reported.
    bool duplicate = false;
    for (int prev : index.relations_of(rel.i, rel.j)) {
      const ProductRelation& p = problem.relations[prev];
      if (p.w != rel.w || p.sense != rel.sense || p.b != rel.b || p.d != rel.d)
        continue;
      if ((p.i == rel.i && p.j == rel.j && p.a == rel.a && p.c == rel.c) ||
          (p.i == rel.j && p.j == rel.i && p.a == rel.c && p.c == rel.a)) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) {
      index.duplicates.push_back(static_cast<int>(r));
      continue;
    }
    const int id = static_cast<int>(r);
    index.by_pair[std::minmax(rel.i, rel.j)].push_back(id);
    index.by_var[rel.i].emplace_back(rel.j, id);
    if (rel.j != rel.i) index.by_var[rel.j].emplace_back(rel.i, id);
  }
  for (auto& [var, list] : index.by_var) std::sort(list.begin(), list.end());
  return index;
}

}  // namespace rlt

#endif  // RLT_MODEL_HPP_
