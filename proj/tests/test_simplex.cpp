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

#include <catch2/catch_amalgamated.hpp>

#include "rlt/simplex.hpp"
#include "test_helpers.hpp"

using namespace rlt;
using rlt_test::ProblemBuilder;

namespace {

LpInstance box_lp(const std::vector<std::pair<double, double>>& bounds,
                  const std::vector<double>& objective) {
  LpInstance lp;
  for (const auto& [lo, hi] : bounds) {
    lp.lower.push_back(lo);
    lp.upper.push_back(hi);
  }
  lp.objective = objective;
  return lp;
}

void add_le(LpInstance& lp, const std::map<int, double>& coeffs, double rhs) {
  LpRow row;
  row.coeffs = coeffs;
  row.rhs = rhs;
  lp.rows.push_back(std::move(row));
}

double row_activity(const LpRow& row, const std::vector<double>& x) {
  double act = 0.0;
  for (const auto& [var, coef] : row.coeffs) act += coef * x[var];
  return act;
}

LpInstance random_lp(rlt_test::Rng& rng) {
  const int n = rng.uniform_int(1, 6);
  const int m = rng.uniform_int(0, 8);
  std::vector<std::pair<double, double>> bounds;
  for (int v = 0; v < n; ++v) {
    double lo = rng.uniform(-3, 1);
    bounds.emplace_back(lo, lo + rng.uniform(0.1, 4));
  }
  std::vector<double> obj;
  for (int v = 0; v < n; ++v) obj.push_back(rng.uniform(-2, 2));
  LpInstance lp = box_lp(bounds, obj);
  // rows centered loosely on a random box point keep many instances feasible
  std::vector<double> anchor;
  for (int v = 0; v < n; ++v)
    anchor.push_back(rng.uniform(bounds[v].first, bounds[v].second));
  for (int r = 0; r < m; ++r) {
    std::map<int, double> coeffs;
    int nnz = rng.uniform_int(1, n);
    for (int k = 0; k < nnz; ++k) {
      int v = rng.uniform_int(0, n - 1);
      double c = rng.uniform(-2, 2);
      if (c != 0.0) coeffs[v] = c;
    }
    if (coeffs.empty()) continue;
    double act = 0.0;
    for (const auto& [v, c] : coeffs) act += c * anchor[v];
    add_le(lp, coeffs, act + rng.uniform(-0.5, 1.5));
  }
  return lp;
}

}  // namespace

TEST_CASE("unconstrained box: min -x over [0,1] is -1 at x=1", "[simplex]") {
  LpInstance lp = box_lp({{0, 1}}, {-1});
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  REQUIRE(sol.x[0] == Catch::Approx(1.0));
  REQUIRE(sol.objective == Catch::Approx(-1.0));
  REQUIRE(sol.at_upper[0]);
}

TEST_CASE("simple simplex vertex", "[simplex]") {
  LpInstance lp = box_lp({{0, 1}, {0, 1}}, {-1, -1});
  add_le(lp, {{0, 1.0}, {1, 1.0}}, 1.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  REQUIRE(sol.objective == Catch::Approx(-1.0));
  // optimal solutions are basic: at most (rows) variables strictly inside
  int interior = 0;
  for (int v = 0; v < 2; ++v)
    if (!sol.at_lower[v] && !sol.at_upper[v]) ++interior;
  REQUIRE(interior <= 1);
}

TEST_CASE("a contradictory constant row is infeasible", "[simplex]") {
  LpInstance lp = box_lp({{0, 1}}, {0});
  add_le(lp, {}, -1.0);  // 0 <= -1
  REQUIRE(solve_lp(lp).status == LpStatus::kInfeasible);
}

TEST_CASE("free variable with improving direction is unbounded", "[simplex]") {
  LpInstance lp = box_lp({{-kInf, kInf}}, {1});
  REQUIRE(solve_lp(lp).status == LpStatus::kUnbounded);
}

TEST_CASE("equality rows hold exactly", "[simplex]") {
  LpInstance lp = box_lp({{0, 2}, {0, 2}}, {1, 2});
  LpRow eq;
  eq.coeffs = {{0, 1.0}, {1, 1.0}};
  eq.rhs = 2.0;
  eq.equality = true;
  lp.rows.push_back(eq);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  REQUIRE(sol.x[0] + sol.x[1] == Catch::Approx(2.0));
  REQUIRE(sol.objective == Catch::Approx(2.0));  // all weight on the cheap column
}

TEST_CASE("random LPs match the vertex-enumeration oracle", "[simplex][property]") {
  rlt_test::Rng rng(20260809);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    LpInstance lp = random_lp(rng);
    LpSolution sol = solve_lp(lp);
    rlt_test::OracleResult oracle = rlt_test::enumerate_lp(lp);
    if (oracle.feasible) {
      ++feasible;
      INFO("trial " << trial);
      REQUIRE(sol.status == LpStatus::kOptimal);
      REQUIRE(sol.objective == Catch::Approx(oracle.objective).margin(1e-8));
      // basic solution: variables strictly inside their bounds never exceed rows
      int interior = 0;
      for (int v = 0; v < lp.num_cols(); ++v)
        if (!sol.at_lower[v] && !sol.at_upper[v]) ++interior;
      REQUIRE(interior <= static_cast<int>(lp.rows.size()));
      for (const LpRow& row : lp.rows) {
        double act = row_activity(row, sol.x);
        if (row.equality)
          REQUIRE(std::abs(act - row.rhs) <= 1e-9);
        else
          REQUIRE(act <= row.rhs + 1e-9);
      }
    } else {
      ++infeasible;
      REQUIRE(sol.status == LpStatus::kInfeasible);
    }
  }
  REQUIRE(feasible > 100);  // the generator must exercise the solver
  REQUIRE(infeasible > 0);
}

TEST_CASE("warm start over added rows reproduces the cold optimum", "[simplex]") {
  rlt_test::Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    LpInstance lp = random_lp(rng);
    Basis basis;
    LpOptions opts;
    opts.basis_out = &basis;
    LpSolution first = solve_lp(lp, opts);
    if (first.status != LpStatus::kOptimal) continue;

    // a valid-but-tightening row through a slightly shifted optimum
    std::map<int, double> coeffs;
    for (int v = 0; v < lp.num_cols(); ++v) coeffs[v] = rng.uniform(-1, 1);
    double act = 0.0;
    for (const auto& [v, c] : coeffs) act += c * first.x[v];
    std::vector<LpRow> added(1);
    added[0].coeffs = coeffs;
    added[0].rhs = act - 0.05;  // cuts off the current solution

    LpOptions warm_opts;
    warm_opts.warm = &basis;
    warm_opts.added_rows = &added;
    LpSolution warm = solve_lp(lp, warm_opts);

    LpInstance cold_lp = lp;
    cold_lp.rows.push_back(added[0]);
    LpSolution cold = solve_lp(cold_lp);

    REQUIRE(warm.status == cold.status);
    if (cold.status == LpStatus::kOptimal)
      REQUIRE(warm.objective == Catch::Approx(cold.objective).margin(1e-7));
  }
}

TEST_CASE("re-solving after a valid cut never lowers the minimum", "[simplex][property]") {
  rlt_test::Rng rng(4242);
  for (int trial = 0; trial < 40; ++trial) {
    LpInstance lp = random_lp(rng);
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::kOptimal) continue;
    std::map<int, double> coeffs;
    for (int v = 0; v < lp.num_cols(); ++v) {
      double c = rng.uniform(-1, 1);
      if (c != 0.0) coeffs[v] = c;
    }
    double act = 0.0;
    for (const auto& [v, c] : coeffs) act += c * sol.x[v];
    add_le(lp, coeffs, act);  // supported at the optimum, possibly binding
    LpSolution tightened = solve_lp(lp);
    REQUIRE(tightened.status == LpStatus::kOptimal);
    REQUIRE(tightened.objective >= sol.objective - 1e-8);
  }
}

TEST_CASE("lp_from_problem emits envelope rows for an explicit product", "[simplex]") {
  ProblemBuilder b;
  int x1 = b.var("x1", 0, 1);
  int x2 = b.var("x2", 0, 1);
  int w = b.var("w", -kInf, kInf);
  b.le_row({{x1, 1.0}, {x2, 1.0}}, 1.0);
  b.relation(x1, x2, w);
  Problem problem = b.build();

  LpInstance with = lp_from_problem(problem, true);
  LpInstance without = lp_from_problem(problem, false);
  REQUIRE(without.rows.size() == 1);
  REQUIRE(with.rows.size() == 5);  // original row + four envelope rows

  // unbounded partner: the rows referencing its upper bound are skipped
  ProblemBuilder b2;
  int y1 = b2.var("y1", 0, 1);
  int y2 = b2.var("y2", 0, kInf);
  int w2 = b2.var("w2", -kInf, kInf);
  b2.relation(y1, y2, w2);
  LpInstance partial = lp_from_problem(b2.build(), true);
  REQUIRE(partial.rows.size() == 2);
}

TEST_CASE("bound overrides act like node-local fixings", "[simplex]") {
  LpInstance lp = box_lp({{0, 1}, {0, 1}}, {-1, -1});
  add_le(lp, {{0, 1.0}, {1, 1.0}}, 1.5);
  std::vector<std::tuple<int, double, double>> fix = {{0, 0.0, 0.0}};
  LpOptions opts;
  opts.bound_overrides = &fix;
  LpSolution sol = solve_lp(lp, opts);
  REQUIRE(sol.status == LpStatus::kOptimal);
  REQUIRE(sol.x[0] == Catch::Approx(0.0));
  REQUIRE(sol.x[1] == Catch::Approx(1.0));
}

TEST_CASE("deterministic: identical inputs give identical runs", "[simplex]") {
  rlt_test::Rng rng(5);
  LpInstance lp = random_lp(rng);
  LpSolution a = solve_lp(lp);
  LpSolution b = solve_lp(lp);
  REQUIRE(a.status == b.status);
  REQUIRE(a.iterations == b.iterations);
  REQUIRE(a.x == b.x);
}
