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

#ifndef RLT_BENCH_HPP_
#define RLT_BENCH_HPP_

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rlt/cutloop.hpp"
#include "rlt/instance_io.hpp"
#include "rlt/model.hpp"

namespace rlt {

/// exp(mean(ln(v + shift))) - shift.
inline double shifted_geomean(const std::vector<double>& values, double shift) {
  if (values.empty()) throw std::invalid_argument("shifted_geomean of empty list");
  if (shift <= 0.0) throw std::invalid_argument("shift must be positive");
  double sum = 0.0;
  for (double v : values) {
    if (v < 0.0) throw std::invalid_argument("negative value in shifted_geomean");
    sum += std::log(v + shift);
  }
  return std::exp(sum / static_cast<double>(values.size())) - shift;
}

struct BoundDiff {
  double value = 0.0;
  bool degenerate = false;  // |g1| below tolerance; value clamped
};

/// (g2 - g1) / g1, with a guarded denominator when g1 is (near) zero.
inline BoundDiff relative_bound_diff(double g1, double g2) {
  BoundDiff out;
  const double denom_tol = 1e-9;
  if (std::abs(g1) > denom_tol) {
    out.value = (g2 - g1) / g1;
    return out;
  }
  out.degenerate = true;
  out.value = (g2 - g1) / std::max(std::abs(g1), denom_tol);
  out.value = std::clamp(out.value, -1e9, 1e9);
  return out;
}

struct BenchVariant {
  std::string name;  // Off, ERLT, IERLT
  Settings settings;
};

inline BenchVariant make_variant(const std::string& name, bool marking, bool projection,
                                 double time_limit_s, long node_limit) {
  BenchVariant v;
  v.name = name;
  v.settings.use_marking = marking;
  v.settings.use_projection = projection;
  v.settings.time_limit_s = time_limit_s;
  v.settings.node_limit = node_limit;
  if (name == "Off" || name == "off")
    v.settings.rlt_mode = RltMode::kOff;
  else if (name == "ERLT" || name == "erlt")
    v.settings.rlt_mode = RltMode::kErlt;
  else if (name == "IERLT" || name == "ierlt")
    v.settings.rlt_mode = RltMode::kIerlt;
  else
    throw std::invalid_argument("unknown variant \"" + name + "\"");
  return v;
}

struct BenchConfig {
  std::vector<std::pair<std::string, std::string>> instances;  // (name, document text)
  std::vector<BenchVariant> variants;
  double shift_time = 1.0;
  double shift_nodes = 100.0;
  std::vector<double> time_brackets = {0.0, 0.1, 1.0, 10.0};
  unsigned seed = 0;
  bool serial = true;  // serial runs use the deterministic clock
};

struct BenchRun {
  std::string instance;
  std::string variant;
  bool failed = false;
  std::string error;
  SolveReport report;
};

struct BenchReport {
  std::vector<BenchRun> runs;
  const BenchRun* find(const std::string& instance, const std::string& variant) const {
    for (const BenchRun& r : runs)
      if (r.instance == instance && r.variant == variant) return &r;
    return nullptr;
  }
  bool any_failed() const {
    for (const BenchRun& r : runs)
      if (r.failed) return true;
    return false;
  }
};

/// Runs every (instance, variant) job. Serial mode processes jobs in order
/// and reports deterministic work-based times; otherwise instances run in
/// parallel and wall times are reported. Per-instance crashes are recorded
/// as failed runs, never aborting the batch.
inline BenchReport run_benchmark(const BenchConfig& config) {
  if (config.instances.empty())
    throw std::invalid_argument("benchmark needs at least one instance");
  if (config.variants.empty())
    throw std::invalid_argument("benchmark needs at least one variant");

  auto run_instance = [&](const std::pair<std::string, std::string>& inst) {
    std::vector<BenchRun> runs;
    for (const BenchVariant& variant : config.variants) {
      BenchRun run;
      run.instance = inst.first;
      run.variant = variant.name;
      try {
        Problem problem = parse_instance(inst.second);
        Settings settings = variant.settings;
        settings.deterministic_time = config.serial;
        run.report = branch_and_bound(problem, settings);
      } catch (const std::exception& e) {
        run.failed = true;
        run.error = e.what();
      }
      runs.push_back(std::move(run));
    }
    return runs;
  };

  BenchReport report;
  if (config.serial) {
    for (const auto& inst : config.instances)
      for (BenchRun& run : run_instance(inst)) report.runs.push_back(std::move(run));
  } else {
    std::vector<std::future<std::vector<BenchRun>>> jobs;
    jobs.reserve(config.instances.size());
    for (const auto& inst : config.instances)
      jobs.push_back(std::async(std::launch::async, run_instance, inst));
    for (auto& job : jobs)
      for (BenchRun& run : job.get()) report.runs.push_back(std::move(run));
  }
  // canonical order regardless of execution mode
  std::stable_sort(report.runs.begin(), report.runs.end(),
                   [](const BenchRun& a, const BenchRun& b) {
                     return std::tie(a.instance, a.variant) <
                            std::tie(b.instance, b.variant);
                   });
  return report;
}

namespace bench_detail {

struct PairData {
  std::vector<std::string> instances;  // both runs present and not failed
};

inline double sep_percent(const SolveReport& r) {
  // In deterministic mode the separation share is taken from the same
  // work-based clock as the total.
  double total = r.time_seconds;
  double sep = r.deterministic_time
                   ? 5e-7 * r.work.sep_candidates + 2e-6 * r.work.cuts_built
                   : r.separation_seconds;
  if (total <= 0.0) return 0.0;
  return std::clamp(100.0 * sep / total, 0.0, 100.0);
}

}  // namespace bench_detail

/// Root-loop trajectory as a report table. The round key is zero-padded so
/// the report's lexicographic row order matches the numeric one.
inline Report root_report_table(const RootReport& root) {
  Report table;
  table.columns = {"round", "dual_bound", "cuts_added"};
  for (std::size_t k = 0; k < root.bound_trajectory.size(); ++k) {
    const auto& [round, bound] = root.bound_trajectory[k];
    long long cuts = k < root.cuts_added_per_round.size()
                         ? root.cuts_added_per_round[k]
                         : 0;
    char key[16];
    std::snprintf(key, sizeof(key), "%04d", round);
    table.add_row({std::string(key), bound, cuts});
  }
  table.metadata["lp_iterations"] = std::to_string(root.lp_iterations);
  table.metadata["relations_detected"] = std::to_string(root.relations_detected);
  return table;
}

/// Flattens a benchmark into one long-format table:
///   section  k1        k2       k3       metric        value  text
///   run      instance  variant  -        time/nodes/..
///   subset   pair      subset   variant  sgm_time/...
///   rootdiff pair      bucket   side     count
///   septime  variant   -        -        mean_pct/...
inline Report bench_report_table(const BenchReport& bench, const BenchConfig& config) {
  Report table;
  table.columns = {"section", "k1", "k2", "k3", "metric", "value", "text"};
  auto num = [&](std::string section, std::string k1, std::string k2, std::string k3,
                 std::string metric, double value) {
    table.add_row({std::move(section), std::move(k1), std::move(k2), std::move(k3),
                   std::move(metric), value, std::string()});
  };
  auto txt = [&](std::string section, std::string k1, std::string k2, std::string k3,
                 std::string metric, std::string text) {
    table.add_row({std::move(section), std::move(k1), std::move(k2), std::move(k3),
                   std::move(metric), 0.0, std::move(text)});
  };

  for (const BenchRun& run : bench.runs) {
    if (run.failed) {
      txt("run", run.instance, run.variant, "", "status", "fail");
      txt("run", run.instance, run.variant, "", "error", run.error);
      continue;
    }
    const SolveReport& r = run.report;
    txt("run", run.instance, run.variant, "", "status", to_string(r.status));
    num("run", run.instance, run.variant, "", "solved", r.solved() ? 1 : 0);
    num("run", run.instance, run.variant, "", "time", r.time_seconds);
    num("run", run.instance, run.variant, "", "nodes", static_cast<double>(r.nodes));
    num("run", run.instance, run.variant, "", "lp_iterations",
        static_cast<double>(r.lp_iterations));
    num("run", run.instance, run.variant, "", "primal", r.primal);
    num("run", run.instance, run.variant, "", "dual", r.dual);
    num("run", run.instance, run.variant, "", "root_dual", r.root_dual);
    num("run", run.instance, run.variant, "", "sep_pct", bench_detail::sep_percent(r));
  }

  // pairwise comparisons in variant listing order
  for (std::size_t a = 0; a < config.variants.size(); ++a) {
    for (std::size_t b = a + 1; b < config.variants.size(); ++b) {
      const std::string va = config.variants[a].name;
      const std::string vb = config.variants[b].name;
      const std::string pair = va + "/" + vb;

      std::vector<std::string> common;
      for (const auto& [name, text] : config.instances) {
        const BenchRun* ra = bench.find(name, va);
        const BenchRun* rb = bench.find(name, vb);
        if (ra && rb && !ra->failed && !rb->failed) common.push_back(name);
      }

      struct Subset {
        std::string name;
        std::vector<std::string> members;
      };
      std::vector<Subset> subsets;
      subsets.push_back({"All", common});
      Subset affected{"Affected", {}};
      for (const auto& name : common)
        if (bench.find(name, va)->report.lp_iterations !=
            bench.find(name, vb)->report.lp_iterations)
          affected.members.push_back(name);
      subsets.push_back(std::move(affected));
      for (double x : config.time_brackets) {
        Subset bracket{"[" + io_detail::format_real(x) + ",timelim]", {}};
        for (const auto& name : common) {
          const SolveReport& ra = bench.find(name, va)->report;
          const SolveReport& rb = bench.find(name, vb)->report;
          bool slow_enough = ra.time_seconds >= x || rb.time_seconds >= x;
          bool some_solved = ra.solved() || rb.solved();
          if (slow_enough && some_solved) bracket.members.push_back(name);
        }
        subsets.push_back(std::move(bracket));
      }
      Subset all_opt{"All-optimal", {}};
      for (const auto& name : common)
        if (bench.find(name, va)->report.solved() && bench.find(name, vb)->report.solved())
          all_opt.members.push_back(name);
      subsets.push_back(std::move(all_opt));

      for (const Subset& subset : subsets) {
        num("subset", pair, subset.name, "", "instances",
            static_cast<double>(subset.members.size()));
        if (subset.members.empty()) continue;
        double sgm_time[2] = {0, 0}, sgm_nodes[2] = {0, 0};
        for (int side = 0; side < 2; ++side) {
          const std::string& variant = side == 0 ? va : vb;
          std::vector<double> times, nodes;
          long solved = 0;
          for (const auto& name : subset.members) {
            const SolveReport& r = bench.find(name, variant)->report;
            times.push_back(r.time_seconds);
            nodes.push_back(static_cast<double>(r.nodes));
            if (r.solved()) ++solved;
          }
          sgm_time[side] = shifted_geomean(times, config.shift_time);
          sgm_nodes[side] = shifted_geomean(nodes, config.shift_nodes);
          num("subset", pair, subset.name, variant, "solved", static_cast<double>(solved));
          num("subset", pair, subset.name, variant, "sgm_time", sgm_time[side]);
          num("subset", pair, subset.name, variant, "sgm_nodes", sgm_nodes[side]);
        }
        // aggregate-then-ratio: the ratio of the two means, not a mean of ratios
        num("subset", pair, subset.name, "", "ratio_time",
            sgm_time[1] / std::max(sgm_time[0], 1e-12));
        num("subset", pair, subset.name, "", "ratio_nodes",
            sgm_nodes[1] / std::max(sgm_nodes[0], 1e-12));
      }

      // root-bound difference histogram
      const char* bucket_names[4] = {"0.01-0.2", "0.2-0.5", "0.5-1.0", ">1.0"};
      long counts[4][2] = {};
      for (const auto& name : common) {
        double g1 = bench.find(name, va)->report.root_dual;
        double g2 = bench.find(name, vb)->report.root_dual;
        if (!is_finite(g1) || !is_finite(g2)) continue;
        BoundDiff diff = relative_bound_diff(g1, g2);
        double mag = std::abs(diff.value);
        int bucket = -1;
        if (mag >= 0.01 && mag < 0.2) bucket = 0;
        else if (mag >= 0.2 && mag < 0.5) bucket = 1;
        else if (mag >= 0.5 && mag <= 1.0) bucket = 2;
        else if (mag > 1.0) bucket = 3;
        if (bucket < 0) continue;
        int side = g2 > g1 ? 1 : 0;  // which variant has the better dual bound
        ++counts[bucket][side];
      }
      for (int bucketindex = 0; bucketindex < 4; ++bucketindex)
        for (int side = 0; side < 2; ++side)
          num("rootdiff", pair, bucket_names[bucketindex], side == 0 ? va : vb, "count",
              static_cast<double>(counts[bucketindex][side]));
    }
  }

  // separation-time share per variant
  for (const BenchVariant& variant : config.variants) {
    std::vector<double> pcts;
    long fails = 0;
    for (const BenchRun& run : bench.runs) {
      if (run.variant != variant.name) continue;
      if (run.failed) {
        ++fails;
        continue;
      }
      pcts.push_back(bench_detail::sep_percent(run.report));
    }
    num("septime", variant.name, "", "", "fail", static_cast<double>(fails));
    if (pcts.empty()) continue;
    double mean = 0, maxv = 0;
    long n5 = 0, n20 = 0, n50 = 0, n100 = 0;
    for (double p : pcts) {
      mean += p;
      maxv = std::max(maxv, p);
      if (p < 5.0) ++n5;
      else if (p < 20.0) ++n20;
      else if (p < 50.0) ++n50;
      else ++n100;
    }
    mean /= static_cast<double>(pcts.size());
    num("septime", variant.name, "", "", "mean_pct", mean);
    num("septime", variant.name, "", "", "max_pct", maxv);
    num("septime", variant.name, "", "", "n_lt5", static_cast<double>(n5));
    num("septime", variant.name, "", "", "n_5_20", static_cast<double>(n20));
    num("septime", variant.name, "", "", "n_20_50", static_cast<double>(n50));
    num("septime", variant.name, "", "", "n_50_100", static_cast<double>(n100));
  }

  table.metadata["seed"] = std::to_string(config.seed);
  table.metadata["serial"] = config.serial ? "1" : "0";
  table.metadata["generator"] = "rlt bench";
  return table;
}

}  // namespace rlt

#endif  // RLT_BENCH_HPP_
