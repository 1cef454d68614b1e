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

#include "rlt/bench.hpp"
#include "test_helpers.hpp"

using namespace rlt;

namespace {

const char* kProductInstance = R"({
  "version": 1,
  "variables": [
    {"name": "x1", "lb": 0, "ub": 1, "kind": "binary"},
    {"name": "x2", "lb": 0, "ub": 1},
    {"name": "w", "lb": -2, "ub": 2}
  ],
  "objective": {"coeffs": {"w": -1}},
  "rows": [
    {"rhs": 0, "coeffs": {"w": 1, "x1": -1}},
    {"rhs": 0, "coeffs": {"w": 1, "x2": -1}},
    {"rhs": 0, "coeffs": {"w": -1}},
    {"rhs": 1, "coeffs": {"w": -1, "x2": 1, "x1": 1}},
    {"rhs": 1, "coeffs": {"x1": 1, "x2": 1}}
  ]
})";

const char* kKnapsackInstance = R"({
  "version": 1,
  "variables": [
    {"name": "z1", "lb": 0, "ub": 1, "kind": "binary"},
    {"name": "z2", "lb": 0, "ub": 1, "kind": "binary"}
  ],
  "objective": {"coeffs": {"z1": -2, "z2": -1}},
  "rows": [{"rhs": 1.3, "coeffs": {"z1": 1, "z2": 1}}]
})";

BenchConfig small_config() {
  BenchConfig config;
  config.instances = {{"product", kProductInstance}, {"knapsack", kKnapsackInstance}};
  config.variants = {make_variant("off", true, true, 10, 1000),
                     make_variant("ierlt", true, true, 10, 1000)};
  return config;
}

double table_value(const Report& table, const std::string& section,
                   const std::string& k1, const std::string& k2, const std::string& k3,
                   const std::string& metric) {
  for (const auto& row : table.rows) {
    if (std::get<std::string>(row[0]) == section && std::get<std::string>(row[1]) == k1 &&
        std::get<std::string>(row[2]) == k2 && std::get<std::string>(row[3]) == k3 &&
        std::get<std::string>(row[4]) == metric)
      return std::get<double>(row[5]);
  }
  FAIL("row not found: " << section << "/" << k1 << "/" << k2 << "/" << k3 << "/"
                         << metric);
  return 0.0;
}

}  // namespace

TEST_CASE("shifted geometric mean", "[bench]") {
  REQUIRE(shifted_geomean({1.0, 9.0}, 1.0) ==
          Catch::Approx(std::sqrt(20.0) - 1.0).margin(1e-12));
  REQUIRE(shifted_geomean({3.0, 3.0, 3.0}, 17.0) == Catch::Approx(3.0));
  REQUIRE(shifted_geomean({9.0, 1.0}, 1.0) ==
          Catch::Approx(shifted_geomean({1.0, 9.0}, 1.0)));  // permutation
  REQUIRE_THROWS_AS(shifted_geomean({-1.0}, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(shifted_geomean({}, 1.0), std::invalid_argument);
}

TEST_CASE("relative bound difference", "[bench]") {
  BoundDiff d = relative_bound_diff(-1.0, -0.5);
  REQUIRE(d.value == Catch::Approx(-0.5));
  REQUIRE_FALSE(d.degenerate);
  REQUIRE(relative_bound_diff(2.5, 2.5).value == 0.0);
  BoundDiff degenerate = relative_bound_diff(0.0, 1.0);
  REQUIRE(degenerate.degenerate);
  REQUIRE(degenerate.value == Catch::Approx(1e9));
}

TEST_CASE("benchmark runs compute subsets and ratios", "[bench]") {
  BenchConfig config = small_config();
  BenchReport bench = run_benchmark(config);
  REQUIRE(bench.runs.size() == 4);
  REQUIRE_FALSE(bench.any_failed());

  Report table = bench_report_table(bench, config);
  REQUIRE(table_value(table, "subset", "off/ierlt", "All", "", "instances") == 2.0);
  REQUIRE(table_value(table, "subset", "off/ierlt", "All", "off", "solved") == 2.0);
  REQUIRE(table_value(table, "subset", "off/ierlt", "All", "ierlt", "solved") == 2.0);
  double rt = table_value(table, "subset", "off/ierlt", "All", "", "ratio_time");
  REQUIRE(rt > 0.0);

  // the knapsack has no products, so both variants solve it identically and
  // it is excluded from Affected
  long off_iters = bench.find("knapsack", "off")->report.lp_iterations;
  long ierlt_iters = bench.find("knapsack", "ierlt")->report.lp_iterations;
  REQUIRE(off_iters == ierlt_iters);
  double affected = table_value(table, "subset", "off/ierlt", "Affected", "", "instances");
  REQUIRE(affected <= 1.0);

  // the product instance shows the root-bound improvement under ierlt: the
  // detected relation substitutes into the knapsack row times x1 and proves
  // w <= 0, which is the integer optimum
  double off_root = bench.find("product", "off")->report.root_dual;
  double ierlt_root = bench.find("product", "ierlt")->report.root_dual;
  REQUIRE(off_root == Catch::Approx(-0.5).margin(1e-9));
  REQUIRE(ierlt_root == Catch::Approx(0.0).margin(1e-6));
  REQUIRE(bench.find("product", "ierlt")->report.primal ==
          Catch::Approx(bench.find("product", "off")->report.primal).margin(1e-6));
}

TEST_CASE("a broken instance is recorded as a fail, not a crash", "[bench]") {
  BenchConfig config = small_config();
  config.instances.push_back({"broken", "{this is not json"});
  BenchReport bench = run_benchmark(config);
  REQUIRE(bench.any_failed());
  REQUIRE(bench.find("broken", "off")->failed);
  REQUIRE_FALSE(bench.find("product", "off")->failed);
  Report table = bench_report_table(bench, config);
  // failed instances drop out of the comparison subsets
  REQUIRE(table_value(table, "subset", "off/ierlt", "All", "", "instances") == 2.0);
}

TEST_CASE("serial reruns are byte-identical", "[bench]") {
  BenchConfig config = small_config();
  std::string first = write_report(bench_report_table(run_benchmark(config), config),
                                   ReportFormat::kCsv);
  std::string second = write_report(bench_report_table(run_benchmark(config), config),
                                    ReportFormat::kCsv);
  REQUIRE(first == second);
  REQUIRE_FALSE(first.empty());
}

TEST_CASE("parallel mode matches serial results up to timing", "[bench]") {
  BenchConfig serial = small_config();
  BenchConfig parallel = small_config();
  parallel.serial = false;
  BenchReport a = run_benchmark(serial);
  BenchReport b = run_benchmark(parallel);
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t k = 0; k < a.runs.size(); ++k) {
    REQUIRE(a.runs[k].instance == b.runs[k].instance);
    REQUIRE(a.runs[k].variant == b.runs[k].variant);
    REQUIRE(a.runs[k].report.nodes == b.runs[k].report.nodes);
    REQUIRE(a.runs[k].report.primal ==
            Catch::Approx(b.runs[k].report.primal).margin(1e-9));
  }
}

TEST_CASE("instances timing out under both variants leave the brackets", "[bench]") {
  // hand-built runs: "slow" hits the time limit under both variants, "fast"
  // solves under both; only "fast" may appear in any [x, timelim] bracket
  BenchConfig config;
  config.instances = {{"fast", ""}, {"slow", ""}};
  config.variants = {make_variant("off", true, true, 1, 10),
                     make_variant("ierlt", true, true, 1, 10)};
  config.time_brackets = {0.0, 0.5};
  BenchReport bench;
  auto add_run = [&](const std::string& inst, const std::string& variant,
                     SolveStatus status, double time, long iters) {
    BenchRun run;
    run.instance = inst;
    run.variant = variant;
    run.report.status = status;
    run.report.time_seconds = time;
    run.report.nodes = 1;
    run.report.lp_iterations = iters;
    run.report.primal = 0;
    run.report.dual = 0;
    run.report.root_dual = -1;
    bench.runs.push_back(run);
  };
  add_run("fast", "off", SolveStatus::kOptimal, 0.9, 10);
  add_run("fast", "ierlt", SolveStatus::kOptimal, 0.2, 12);
  add_run("slow", "off", SolveStatus::kTimeLimit, 1.0, 50);
  add_run("slow", "ierlt", SolveStatus::kTimeLimit, 1.0, 60);
  Report table = bench_report_table(bench, config);
  REQUIRE(table_value(table, "subset", "off/ierlt", "All", "", "instances") == 2.0);
  REQUIRE(table_value(table, "subset", "off/ierlt", "[0,timelim]", "", "instances") ==
          1.0);
  REQUIRE(table_value(table, "subset", "off/ierlt", "[0.5,timelim]", "", "instances") ==
          1.0);
  REQUIRE(table_value(table, "subset", "off/ierlt", "All-optimal", "", "instances") ==
          1.0);
  // both instances differ in LP iterations, so Affected keeps them
  REQUIRE(table_value(table, "subset", "off/ierlt", "Affected", "", "instances") == 2.0);
}

TEST_CASE("config validation", "[bench]") {
  BenchConfig empty;
  REQUIRE_THROWS_AS(run_benchmark(empty), std::invalid_argument);
  REQUIRE_THROWS_AS(make_variant("bogus", true, true, 1, 1), std::invalid_argument);
}
