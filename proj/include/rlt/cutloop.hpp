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

#ifndef RLT_CUTLOOP_HPP_
#define RLT_CUTLOOP_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rlt/detect.hpp"
#include "rlt/linearize.hpp"
#include "rlt/model.hpp"
#include "rlt/separate.hpp"
#include "rlt/simplex.hpp"

namespace rlt {

enum class RltMode { kOff, kErlt, kIerlt };

inline const char* to_string(RltMode m) {
  switch (m) {
    case RltMode::kOff: return "off";
    case RltMode::kErlt: return "erlt";
    default: return "ierlt";
  }
}

struct Settings {
  int max_unknown_terms = 20;
  int root_rounds = 10;
  int node_rounds = 1;
  int sep_frequency_nodes = 10;
  bool detect_implicit = false;
  bool use_marking = true;
  bool use_projection = true;
  RltMode rlt_mode = RltMode::kOff;
  double time_limit_s = kInf;
  int max_cuts_per_round = 100;
  long node_limit = 100000;
  // Measure and limit time with a work-based deterministic clock instead of
  // wall time (reproducible benchmark runs).
  bool deterministic_time = false;

  Settings normalized() const {
    Settings s = *this;
    if (s.rlt_mode == RltMode::kIerlt) s.detect_implicit = true;
    if (s.rlt_mode != RltMode::kIerlt) s.detect_implicit = false;
    return s;
  }
};

/// Work counters shared by the root loop and the tree search; also the basis
/// of the deterministic clock.
struct WorkCounters {
  long lp_iterations = 0;
  long lp_solves = 0;
  long sep_candidates = 0;
  long cuts_built = 0;
  long cuts_added = 0;
  long detect_pairs = 0;
  long nodes = 0;

  void add_separation(const SeparationStats& s) {
    sep_candidates += s.candidates_examined;
    cuts_built += s.cuts_built;
  }
};

/// Pseudo-seconds derived from work counters; fixed weights, so two runs of
/// the same job report identical times.
inline double deterministic_seconds(const WorkCounters& w) {
  return 2e-6 * w.lp_iterations + 1e-5 * w.lp_solves + 5e-7 * w.sep_candidates +
         2e-6 * w.cuts_built + 5e-7 * w.detect_pairs + 1e-6 * w.nodes;
}

/// Efficacy ranking: violation over coefficient norm, ties broken by
/// provenance so selection is reproducible.
inline std::vector<Cut> select_cuts(std::vector<Cut> cuts, int max_cuts) {
  auto efficacy = [](const Cut& c) {
    return c.violation_at / std::max(c.expr.coef_norm2(), 1e-12);
  };
  std::stable_sort(cuts.begin(), cuts.end(), [&](const Cut& a, const Cut& b) {
    double ea = efficacy(a), eb = efficacy(b);
    if (ea != eb) return ea > eb;
    return a.identity() < b.identity();
  });
  if (static_cast<int>(cuts.size()) > max_cuts) cuts.resize(max_cuts);
  return cuts;
}

struct RootReport {
  LpStatus lp_status = LpStatus::kOptimal;
  int error_round = -1;  // round whose LP failed, -1 if none
  std::vector<std::pair<int, double>> bound_trajectory;
  std::vector<int> cuts_added_per_round;
  double final_bound = -kInf;
  long lp_iterations = 0;
  double separation_seconds = 0.0;
  SeparationStats sep_stats;
  int relations_detected = 0;
  long detect_pairs = 0;

  double round0_bound() const {
    return bound_trajectory.empty() ? -kInf : bound_trajectory.front().second;
  }
};

namespace cutloop_detail {

struct RootState {
  Problem working;
  ProductIndex index;
  CliqueStore cliques;
  LpInstance lp;
  Basis basis;
  LpSolution solution;
  WorkCounters work;
};

inline void append_cut_rows(LpInstance& lp, const std::vector<Cut>& cuts) {
  for (const Cut& cut : cuts) {
    LpRow row;
    for (const auto& [var, coef] : cut.expr.terms()) row.coeffs[var] = coef;
    row.rhs = cut.rhs;
    lp.rows.push_back(std::move(row));
  }
}

/// Shared root-node machinery: detection (if requested), initial relaxation,
/// and up to root_rounds rounds of separate/select/add/resolve.
inline RootReport solve_root_impl(const Problem& problem, const Settings& settings_in,
                                  RootState& state) {
  const Settings settings = settings_in.normalized();
  RootReport report;

  state.working = problem;
  if (settings.detect_implicit) {
    DetectionResult detection = detect_implicit_products(problem);
    report.detect_pairs = detection.pairs_tried;
    state.work.detect_pairs += detection.pairs_tried;
    for (const ProductRelation& rel : detection.relations)
      state.working.relations.push_back(rel);
    report.relations_detected = static_cast<int>(detection.relations.size());
  }
  state.index = build_product_index(state.working);
  state.cliques = mine_cliques(state.working);
  state.lp = lp_from_problem(state.working, /*include_mccormick=*/true);

  LpOptions opts;
  opts.basis_out = &state.basis;
  state.solution = solve_lp(state.lp, opts);
  state.work.lp_iterations += state.solution.iterations;
  ++state.work.lp_solves;
  report.lp_iterations += state.solution.iterations;
  report.lp_status = state.solution.status;
  if (!state.solution.optimal()) {
    report.error_round = 0;
    return report;
  }
  report.bound_trajectory.emplace_back(0, state.solution.objective);
  report.final_bound = state.solution.objective;

  if (settings.rlt_mode == RltMode::kOff) return report;

  SeparationContext ctx{state.working, state.index, state.cliques,
                        settings.max_unknown_terms};
  const SeparationMode mode =
      settings.use_marking ? SeparationMode::kMarking : SeparationMode::kBaseline;
  for (int round = 1; round <= settings.root_rounds; ++round) {
    auto t0 = std::chrono::steady_clock::now();
    SeparationResult sep = separate_rlt(state.solution, mode,
                                        settings.use_projection, ctx);
    report.separation_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.sep_stats.candidates_examined += sep.stats.candidates_examined;
    report.sep_stats.cuts_built += sep.stats.cuts_built;
    report.sep_stats.cuts_kept += sep.stats.cuts_kept;
    report.sep_stats.linearization_failures += sep.stats.linearization_failures;
    report.sep_stats.unknown_capped += sep.stats.unknown_capped;
    report.sep_stats.projection_filtered += sep.stats.projection_filtered;
    state.work.add_separation(sep.stats);

    std::vector<Cut> chosen = select_cuts(std::move(sep.cuts), settings.max_cuts_per_round);
    if (chosen.empty()) break;
    append_cut_rows(state.lp, chosen);
    state.work.cuts_added += static_cast<long>(chosen.size());
    report.cuts_added_per_round.push_back(static_cast<int>(chosen.size()));

    Basis warm = state.basis;
    LpOptions ropts;
    ropts.warm = &warm;
    ropts.basis_out = &state.basis;
    state.solution = solve_lp(state.lp, ropts);
    state.work.lp_iterations += state.solution.iterations;
    ++state.work.lp_solves;
    report.lp_iterations += state.solution.iterations;
    if (!state.solution.optimal()) {
      report.lp_status = state.solution.status;
      report.error_round = round;
      return report;
    }
    report.bound_trajectory.emplace_back(round, state.solution.objective);
    report.final_bound = state.solution.objective;
  }
  return report;
}

}  // namespace cutloop_detail

/// Root cutting-plane loop: initial relaxation with envelope rows, then up
/// to root_rounds rounds of separation; stops early once no violated cut
/// remains.
inline RootReport solve_root(const Problem& problem, const Settings& settings) {
  cutloop_detail::RootState state;
  return cutloop_detail::solve_root_impl(problem, settings, state);
}

enum class SolveStatus { kOptimal, kTimeLimit, kNodeLimit, kGapLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kTimeLimit: return "time_limit";
    case SolveStatus::kNodeLimit: return "node_limit";
    default: return "gap_limit";
  }
}

struct SolveReport {
  SolveStatus status = SolveStatus::kOptimal;
  double primal = kInf;  // +inf if no incumbent (or proven infeasible)
  double dual = -kInf;
  double root_dual = -kInf;
  long nodes = 0;
  long lp_iterations = 0;
  double separation_seconds = 0.0;
  double wall_seconds = 0.0;
  double time_seconds = 0.0;  // deterministic or wall, per settings
  bool deterministic_time = false;
  int relations_detected = 0;
  long unresolved_nodes = 0;
  WorkCounters work;
  std::vector<double> incumbent;

  bool solved() const { return status == SolveStatus::kOptimal; }
};

namespace cutloop_detail {

struct Node {
  double bound;
  long id;
  std::vector<std::tuple<int, double, double>> fixings;
  Basis basis;

  bool operator<(const Node& other) const {
    return std::tie(bound, id) < std::tie(other.bound, other.id);
  }
};

inline bool relation_satisfied(const ProductRelation& rel,
                               const std::vector<double>& x, double tol) {
  const double value = rel.linear_side_value(x);
  const double prod = x[rel.i] * x[rel.j];
  switch (rel.sense) {
    case RelationSense::kLe: return value <= prod + tol;
    case RelationSense::kGe: return value >= prod - tol;
    default: return std::abs(value - prod) <= tol;
  }
}

}  // namespace cutloop_detail

/// Best-bound branch and bound on the binary variables. Product relations
/// are enforced by the relaxation rows, RLT cuts, and incumbent screening:
/// an integral LP solution violating a relation is rejected and an involved
/// binary is branched on. Cuts are globally valid and added to the shared
/// LP. Separation runs every sep_frequency_nodes-th node.
inline SolveReport branch_and_bound(const Problem& problem, const Settings& settings_in) {
  using cutloop_detail::Node;
  const Settings settings = settings_in.normalized();
  const auto wall0 = std::chrono::steady_clock::now();
  constexpr double kIntTol = 1e-6;
  constexpr double kProductCheckTol = 1e-6;

  SolveReport report;
  cutloop_detail::RootState state;
  RootReport root = cutloop_detail::solve_root_impl(problem, settings, state);
  report.relations_detected = root.relations_detected;
  report.separation_seconds = root.separation_seconds;
  report.nodes = 1;
  state.work.nodes = 1;

  double incumbent_obj = kInf;
  std::vector<double> incumbent;
  double unresolved_floor = kInf;  // dual cap from nodes pruned without proof
  long unresolved = 0;

  auto finish = [&](SolveStatus status, double dual) {
    report.status = status;
    report.dual = dual;
    report.unresolved_nodes = unresolved;
    report.lp_iterations = state.work.lp_iterations;
    report.work = state.work;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    report.deterministic_time = settings.deterministic_time;
    report.time_seconds = settings.deterministic_time
                              ? deterministic_seconds(state.work)
                              : report.wall_seconds;
    return report;
  };

  if (root.error_round >= 0) {
    if (root.lp_status == LpStatus::kInfeasible) {
      report.root_dual = kInf;
      return finish(SolveStatus::kOptimal, kInf);  // proven infeasible
    }
    report.root_dual = -kInf;
    return finish(SolveStatus::kGapLimit, -kInf);
  }
  report.root_dual = root.final_bound;

  const Problem& working = state.working;
  const int nvars = working.num_vars();
  SeparationContext ctx{working, state.index, state.cliques, settings.max_unknown_terms};
  const SeparationMode mode =
      settings.use_marking ? SeparationMode::kMarking : SeparationMode::kBaseline;

  std::set<Node> open;
  long next_node_id = 1;
  long expanded = 0;

  auto time_used = [&]() {
    return settings.deterministic_time
               ? deterministic_seconds(state.work)
               : std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
                     .count();
  };

  auto global_dual = [&]() {
    double d = std::min(incumbent_obj, unresolved_floor);
    for (const Node& n : open) d = std::min(d, n.bound);
    return d;
  };

  // Accepts integral LP solutions whose product relations all hold; returns
  // the binary to branch on otherwise (-1: accepted or unresolvable).
  auto screen_solution = [&](const LpSolution& sol,
                             const std::vector<std::tuple<int, double, double>>& fixings,
                             bool* accepted) {
    *accepted = false;
    auto is_fixed = [&](int v) {
      if (working.lb(v) == working.ub(v)) return true;
      for (const auto& [var, lo, hi] : fixings)
        if (var == v && lo == hi) return true;
      return false;
    };
    int most_fractional = -1;
    double best_dist = kIntTol;
    for (int v = 0; v < nvars; ++v) {
      if (!working.is_binary(v)) continue;
      double frac = std::abs(sol.x[v] - std::round(sol.x[v]));
      double dist = std::abs(sol.x[v] - 0.5);
      if (frac > kIntTol && (most_fractional < 0 || dist < best_dist)) {
        most_fractional = v;
        best_dist = dist;
      }
    }
    if (most_fractional >= 0) return most_fractional;
    bool violated = false;
    for (const ProductRelation& rel : working.relations) {
      if (cutloop_detail::relation_satisfied(rel, sol.x, kProductCheckTol)) continue;
      violated = true;
      for (int v : {rel.i, rel.j})
        if (working.is_binary(v) && !is_fixed(v)) return v;
    }
    // every violated relation has all involved binaries fixed: unresolvable
    *accepted = !violated;
    return -1;
  };

  // Root node outcome.
  {
    bool accepted = false;
    int branch_var = screen_solution(state.solution, {}, &accepted);
    if (accepted) {
      incumbent_obj = state.solution.objective;
      incumbent = state.solution.x;
      report.primal = incumbent_obj;
      report.incumbent = incumbent;
      return finish(SolveStatus::kOptimal, incumbent_obj);
    }
    if (branch_var < 0) {
      ++unresolved;
      report.unresolved_nodes = unresolved;
      return finish(SolveStatus::kGapLimit, state.solution.objective);
    }
    for (double value : {0.0, 1.0}) {
      Node child;
      child.bound = state.solution.objective;
      child.id = next_node_id++;
      child.fixings.emplace_back(branch_var, value, value);
      child.basis = state.basis;
      open.insert(std::move(child));
    }
  }

  while (!open.empty()) {
    if (expanded >= settings.node_limit) {
      report.primal = incumbent_obj;
      report.incumbent = incumbent;
      return finish(SolveStatus::kNodeLimit, global_dual());
    }
    if (time_used() > settings.time_limit_s) {
      report.primal = incumbent_obj;
      report.incumbent = incumbent;
      return finish(SolveStatus::kTimeLimit, global_dual());
    }

    Node node = *open.begin();
    open.erase(open.begin());
    if (node.bound >= incumbent_obj - 1e-9) continue;

    ++expanded;
    ++report.nodes;
    ++state.work.nodes;

    Basis warm = node.basis;
    LpOptions opts;
    opts.warm = &warm;
    opts.bound_overrides = &node.fixings;
    Basis node_basis;
    opts.basis_out = &node_basis;
    LpSolution sol = solve_lp(state.lp, opts);
    state.work.lp_iterations += sol.iterations;
    ++state.work.lp_solves;

    if (sol.status == LpStatus::kInfeasible) continue;
    if (!sol.optimal()) {  // numerical trouble: keep the bound, drop the node
      unresolved_floor = std::min(unresolved_floor, node.bound);
      ++unresolved;
      continue;
    }
    double bound = std::max(node.bound, sol.objective);
    if (bound >= incumbent_obj - 1e-9) continue;

    if (settings.rlt_mode != RltMode::kOff && settings.sep_frequency_nodes > 0 &&
        expanded % settings.sep_frequency_nodes == 0) {
      for (int round = 0; round < settings.node_rounds; ++round) {
        auto t0 = std::chrono::steady_clock::now();
        SeparationResult sep = separate_rlt(sol, mode, settings.use_projection, ctx);
        report.separation_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        state.work.add_separation(sep.stats);
        std::vector<Cut> chosen =
            select_cuts(std::move(sep.cuts), settings.max_cuts_per_round);
        if (chosen.empty()) break;
        cutloop_detail::append_cut_rows(state.lp, chosen);
        state.work.cuts_added += static_cast<long>(chosen.size());
        Basis rewarm = node_basis;
        LpOptions ropts;
        ropts.warm = &rewarm;
        ropts.bound_overrides = &node.fixings;
        ropts.basis_out = &node_basis;
        sol = solve_lp(state.lp, ropts);
        state.work.lp_iterations += sol.iterations;
        ++state.work.lp_solves;
        if (!sol.optimal()) break;
        bound = std::max(bound, sol.objective);
      }
      if (sol.status == LpStatus::kInfeasible) continue;
      if (!sol.optimal()) {
        unresolved_floor = std::min(unresolved_floor, bound);
        ++unresolved;
        continue;
      }
      if (bound >= incumbent_obj - 1e-9) continue;
    }

    bool accepted = false;
    int branch_var = screen_solution(sol, node.fixings, &accepted);
    if (accepted) {
      if (sol.objective < incumbent_obj - 1e-12) {
        incumbent_obj = sol.objective;
        incumbent = sol.x;
      }
      continue;
    }
    if (branch_var < 0) {
      unresolved_floor = std::min(unresolved_floor, bound);
      ++unresolved;
      continue;
    }
    for (double value : {0.0, 1.0}) {
      Node child;
      child.bound = bound;
      child.id = next_node_id++;
      child.fixings = node.fixings;
      child.fixings.emplace_back(branch_var, value, value);
      child.basis = node_basis;
      open.insert(std::move(child));
    }
  }

  report.primal = incumbent_obj;
  report.incumbent = incumbent;
  if (unresolved > 0 && unresolved_floor < incumbent_obj - 1e-9)
    return finish(SolveStatus::kGapLimit, std::min(unresolved_floor, incumbent_obj));
  return finish(SolveStatus::kOptimal, incumbent_obj);
}

}  // namespace rlt

#endif  // RLT_CUTLOOP_HPP_
