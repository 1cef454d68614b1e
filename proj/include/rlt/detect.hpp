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

#ifndef RLT_DETECT_HPP_
#define RLT_DETECT_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rlt/linearize.hpp"
#include "rlt/model.hpp"

namespace rlt {

enum class CandidateSource {
  kThreeVarRow,
  kImpliedBound,
  kClique,
  kTwoVarRow,
  kGlobalBound,
};

inline const char* to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::kThreeVarRow: return "three_var_row";
    case CandidateSource::kImpliedBound: return "implied_bound";
    case CandidateSource::kClique: return "clique";
    case CandidateSource::kTwoVarRow: return "two_var_row";
    default: return "global_bound";
  }
}

/// One reading of a linear fact as  a*x_i + b*w + c*x_j <= d.
/// Pool candidates (rows without the binary, variable bounds) leave x_i
/// unset until they are paired.
struct CandidateRelation {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  CandidateSource source = CandidateSource::kThreeVarRow;
  int x_i = -1;
  int w = -1;
  int x_j = -1;  // -1 when c == 0
  int row = -1;  // source row, -1 for bounds and cliques

  std::string describe(const Problem& problem) const {
    switch (source) {
      case CandidateSource::kClique:
        return "clique(" + problem.rows[row].name + ")";
      case CandidateSource::kGlobalBound:
        if (row >= 0) return "row " + problem.rows[row].name;
        return "bounds of " + problem.var_name(w);
      default:
        return "row " + problem.rows[row].name;
    }
  }
};

/// Candidates grouped so that pairs sharing the same (x_i, w, x_j) triple
/// can be enumerated: keyed readings know their binary, pool readings are
/// instantiated per key.
struct CandidateStore {
  // (x_i, w, x_j) -> readings with c != 0
  std::map<std::tuple<int, int, int>, std::vector<CandidateRelation>> keyed;
  // (x_i, w) -> readings with c == 0 (implied bounds, cliques)
  std::map<std::pair<int, int>, std::vector<CandidateRelation>> keyed_c0;
  // (w, x_j) -> x_i-free readings of two-variable rows
  std::map<std::pair<int, int>, std::vector<CandidateRelation>> two_var;
  // w -> x_i-free, x_j-free readings (single-variable rows, variable bounds)
  std::map<int, std::vector<CandidateRelation>> global;

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [k, v] : keyed) n += v.size();
    for (const auto& [k, v] : keyed_c0) n += v.size();
    for (const auto& [k, v] : two_var) n += v.size();
    for (const auto& [k, v] : global) n += v.size();
    return n;
  }
};

namespace detect_detail {

struct SideReading {
  std::vector<std::pair<int, double>> support;  // var, coefficient
  double rhs;
  int row;
};

/// Both <=-normalized readings of every row (the >= side negated).
inline std::vector<SideReading> row_sides(const Problem& problem) {
  std::vector<SideReading> out;
  for (const LinearRow& row : problem.rows) {
    if (is_finite(row.rhs)) {
      SideReading s;
      for (const auto& [var, coef] : row.coeffs) s.support.emplace_back(var, coef);
      s.rhs = row.rhs;
      s.row = row.id;
      out.push_back(std::move(s));
    }
    if (is_finite(row.lhs)) {
      SideReading s;
      for (const auto& [var, coef] : row.coeffs) s.support.emplace_back(var, -coef);
      s.rhs = -row.lhs;
      s.row = row.id;
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace detect_detail

/// Harvests every first/second-relation reading the pairing step considers:
/// rows with up to three nonzeros containing a binary (each binary may act as
/// x_i, each remaining pair is read in both (w, x_j) role assignments),
/// implied bounds from two-variable rows, x_i-free constraints on (w, x_j),
/// single-variable rows, two-literal clique projections, and finite variable
/// bounds of every variable that occurs in the w role somewhere.
inline CandidateStore collect_candidates(const Problem& problem,
                                         const CliqueStore& cliques) {
  CandidateStore store;
  for (const auto& side : detect_detail::row_sides(problem)) {
    const std::size_t nnz = side.support.size();
    if (nnz == 1) {
      const auto& [var, coef] = side.support[0];
      CandidateRelation cand;
      cand.b = coef;
      cand.d = side.rhs;
      cand.w = var;
      cand.row = side.row;
      cand.source = CandidateSource::kGlobalBound;
      store.global[var].push_back(cand);
      continue;
    }
    if (nnz == 2) {
      // x_i-free reading, both role assignments
      for (int pick = 0; pick < 2; ++pick) {
        const auto& [wv, wc] = side.support[pick];
        const auto& [jv, jc] = side.support[1 - pick];
        CandidateRelation cand;
        cand.b = wc;
        cand.c = jc;
        cand.d = side.rhs;
        cand.w = wv;
        cand.x_j = jv;
        cand.row = side.row;
        cand.source = CandidateSource::kTwoVarRow;
        store.two_var[{wv, jv}].push_back(cand);
      }
      // implied-bound readings for each binary in the row
      for (int pick = 0; pick < 2; ++pick) {
        const auto& [iv, ic] = side.support[pick];
        if (!problem.is_binary(iv)) continue;
        const auto& [wv, wc] = side.support[1 - pick];
        CandidateRelation cand;
        cand.a = ic;
        cand.b = wc;
        cand.d = side.rhs;
        cand.x_i = iv;
        cand.w = wv;
        cand.row = side.row;
        cand.source = CandidateSource::kImpliedBound;
        store.keyed_c0[{iv, wv}].push_back(cand);
      }
      continue;
    }
    if (nnz == 3) {
      for (int pick = 0; pick < 3; ++pick) {
        const auto& [iv, ic] = side.support[pick];
        if (!problem.is_binary(iv)) continue;
        int others[2], oi = 0;
        for (int k = 0; k < 3; ++k)
          if (k != pick) others[oi++] = k;
        for (int flip = 0; flip < 2; ++flip) {
          const auto& [wv, wc] = side.support[others[flip]];
          const auto& [jv, jc] = side.support[others[1 - flip]];
          CandidateRelation cand;
          cand.a = ic;
          cand.b = wc;
          cand.c = jc;
          cand.d = side.rhs;
          cand.x_i = iv;
          cand.w = wv;
          cand.x_j = jv;
          cand.row = side.row;
          cand.source = CandidateSource::kThreeVarRow;
          store.keyed[{iv, wv, jv}].push_back(cand);
        }
      }
      continue;
    }
  }

  // Two-literal clique projections: each pair of literals in a clique obeys
  // lit_a + lit_b <= 1, read with either literal's variable as x_i.
  for (const auto& clique : cliques.cliques()) {
    for (std::size_t p = 0; p < clique.size(); ++p) {
      for (std::size_t q = 0; q < clique.size(); ++q) {
        if (p == q) continue;
        const CliqueLiteral& li = clique[p];
        const CliqueLiteral& lw = clique[q];
        CandidateRelation cand;
        cand.a = li.complemented ? -1.0 : 1.0;
        cand.b = lw.complemented ? -1.0 : 1.0;
        cand.d = 1.0 - (li.complemented ? 1 : 0) - (lw.complemented ? 1 : 0);
        cand.x_i = li.var;
        cand.w = lw.var;
        cand.source = CandidateSource::kClique;
        store.keyed_c0[{li.var, lw.var}].push_back(cand);
      }
    }
  }

  // Finite variable bounds of every w-role variable.
  std::set<int> w_vars;
  for (const auto& [key, list] : store.keyed) w_vars.insert(std::get<1>(key));
  for (const auto& [key, list] : store.keyed_c0) w_vars.insert(key.second);
  for (const auto& [key, list] : store.two_var) w_vars.insert(key.first);
  for (const auto& [var, list] : store.global) w_vars.insert(var);
  for (int v : w_vars) {
    if (is_finite(problem.ub(v))) {
      CandidateRelation cand;
      cand.b = 1.0;
      cand.d = problem.ub(v);
      cand.w = v;
      cand.source = CandidateSource::kGlobalBound;
      store.global[v].push_back(cand);
    }
    if (is_finite(problem.lb(v))) {
      CandidateRelation cand;
      cand.b = -1.0;
      cand.d = -problem.lb(v);
      cand.w = v;
      cand.source = CandidateSource::kGlobalBound;
      store.global[v].push_back(cand);
    }
  }
  return store;
}

enum class DeriveReject {
  kNone,
  kSignB,        // b1*b2 <= 0
  kGammaZero,    // c2*b1 - b2*c1 vanishes
  kBothAZero,    // relation would hold for fractional x_i as well
  kSameSignA,    // both readings restrict the same x_i value
};

struct DeriveResult {
  std::optional<ProductRelation> relation;
  DeriveReject reject = DeriveReject::kNone;
};

/// Combines two <=-readings on the same (x_i, w, x_j) into the product
/// relation they imply. rel1 contributes (a1, d1), rel2 contributes
/// (b2, c2, d2); both orders of a pair are therefore worth trying.
inline DeriveResult derive_product(const CandidateRelation& rel1,
                                   const CandidateRelation& rel2) {
  DeriveResult out;
  const double b1 = rel1.b, b2 = rel2.b;
  if (b1 * b2 <= 0.0) {
    out.reject = DeriveReject::kSignB;
    return out;
  }
  const double gamma = rel2.c * b1 - b2 * rel1.c;
  const double scale = std::max({1.0, std::abs(rel2.c * b1), std::abs(b2 * rel1.c)});
  if (std::abs(gamma) <= 1e-12 * scale) {
    out.reject = DeriveReject::kGammaZero;
    return out;
  }
  const bool a1_zero = rel1.a == 0.0;
  const bool a2_zero = rel2.a == 0.0;
  if (a1_zero && a2_zero) {
    out.reject = DeriveReject::kBothAZero;
    return out;
  }
  if (rel1.a * rel2.a > 0.0) {
    out.reject = DeriveReject::kSameSignA;
    return out;
  }

  ProductRelation rel;
  rel.i = rel1.x_i >= 0 ? rel1.x_i : rel2.x_i;
  rel.w = rel1.w;
  rel.j = rel1.x_j >= 0 ? rel1.x_j : rel2.x_j;
  rel.a = (b2 * (rel1.a - rel1.d) + b1 * rel2.d) / gamma;
  rel.b = b1 * b2 / gamma;
  rel.c = b1 * rel2.c / gamma;
  rel.d = -b1 * rel2.d / gamma;
  rel.sense = b1 / gamma > 0.0 ? RelationSense::kLe : RelationSense::kGe;
  // The division by gamma makes the output canonical: scaling either input
  // by a positive factor leaves (A, B, C, D) unchanged, and the product side
  // pins the overall scale.
  out.relation = rel;
  return out;
}

/// True when the two relations describe the same constraint (allowing the
/// i/j roles to be swapped). Coefficients compare with a mixed
/// absolute/relative tolerance.
inline bool relations_match(const ProductRelation& x, const ProductRelation& y,
                            double tol) {
  auto close = [tol](double u, double v) {
    return std::abs(u - v) <= tol * (1.0 + std::max(std::abs(u), std::abs(v)));
  };
  if (x.w != y.w || x.sense != y.sense) return false;
  if (!close(x.b, y.b) || !close(x.d, y.d)) return false;
  if (x.i == y.i && x.j == y.j && close(x.a, y.a) && close(x.c, y.c)) return true;
  if (x.i == y.j && x.j == y.i && close(x.a, y.c) && close(x.c, y.a)) return true;
  return false;
}

struct DetectedRelation {
  ProductRelation relation;
  std::string first_source;
  std::string second_source;
};

struct DetectionResult {
  std::vector<ProductRelation> relations;
  std::vector<DetectedRelation> detailed;
  long pairs_tried = 0;
  long pairs_accepted = 0;
};

/// Pairs candidates within each (x_i, w, x_j) key group and derives product
/// relations, dropping duplicates (up to positive scaling) and relations the
/// problem already states.
inline DetectionResult detect_implicit_products(const Problem& problem) {
  const CliqueStore cliques = mine_cliques(problem);
  const CandidateStore store = collect_candidates(problem, cliques);
  DetectionResult result;

  std::set<std::tuple<int, int, int>> keys;
  for (const auto& [key, list] : store.keyed) keys.insert(key);
  for (const auto& [kc0, list] : store.keyed_c0)
    for (const auto& [ktv, tlist] : store.two_var)
      if (ktv.first == kc0.second && ktv.second != kc0.first)
        keys.insert({kc0.first, kc0.second, ktv.second});

  std::vector<ProductRelation> existing = problem.relations;

  // Larger |a| first: those readings carry the more restrictive implication.
  auto rank = [](const CandidateRelation& c) {
    return std::make_tuple(-std::abs(c.a), static_cast<int>(c.source), c.row,
                           c.a, c.b, c.c, c.d);
  };

  for (const auto& key : keys) {
    const auto& [xi, wv, xj] = key;
    if (xi == wv || xi == xj || wv == xj) continue;

    std::vector<CandidateRelation> group;
    if (auto it = store.keyed.find(key); it != store.keyed.end())
      for (const CandidateRelation& c : it->second) group.push_back(c);
    if (auto it = store.keyed_c0.find({xi, wv}); it != store.keyed_c0.end())
      for (CandidateRelation c : it->second) {
        c.x_j = xj;
        group.push_back(c);
      }
    if (auto it = store.two_var.find({wv, xj}); it != store.two_var.end())
      for (CandidateRelation c : it->second) {
        c.x_i = xi;
        group.push_back(c);
      }
    if (auto it = store.global.find(wv); it != store.global.end())
      for (CandidateRelation c : it->second) {
        c.x_i = xi;
        c.x_j = xj;
        group.push_back(c);
      }
    std::stable_sort(group.begin(), group.end(),
                     [&](const CandidateRelation& u, const CandidateRelation& v) {
                       return rank(u) < rank(v);
                     });

    int tried = 0;
    for (std::size_t p = 0; p < group.size() && tried < 16; ++p) {
      for (std::size_t q = 0; q < group.size() && tried < 16; ++q) {
        if (p == q) continue;
        const CandidateRelation& r1 = group[p];
        const CandidateRelation& r2 = group[q];
        // structurally hopeless pairs are skipped without using up the cap
        if (r1.c == 0.0 && r2.c == 0.0) continue;
        if (r1.a == 0.0 && r2.a == 0.0) continue;
        ++tried;
        ++result.pairs_tried;
        DeriveResult derived = derive_product(r1, r2);
        if (!derived.relation) continue;
        bool duplicate = false;
        for (const ProductRelation& seen : existing)
          if (relations_match(*derived.relation, seen, 1e-9)) {
            duplicate = true;
            break;
          }
        if (duplicate) continue;
        existing.push_back(*derived.relation);
        result.relations.push_back(*derived.relation);
        result.detailed.push_back(
            {*derived.relation, r1.describe(problem), r2.describe(problem)});
        ++result.pairs_accepted;
      }
    }
  }
  return result;
}

}  // namespace rlt

#endif  // RLT_DETECT_HPP_
