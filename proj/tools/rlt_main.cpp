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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rlt/bench.hpp"
#include "rlt/cutloop.hpp"
#include "rlt/detect.hpp"
#include "rlt/instance_io.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string describe_relation(const rlt::Problem& problem, const rlt::ProductRelation& rel) {
  std::ostringstream out;
  auto term = [&](double coef, const std::string& name, bool first) {
    if (coef == 0.0) return std::string();
    std::ostringstream t;
    if (coef < 0.0)
      t << (first ? "-" : " - ");
    else if (!first)
      t << " + ";
    double mag = std::abs(coef);
    if (mag != 1.0) t << mag << "*";
    t << name;
    return t.str();
  };
  std::string s;
  s += term(rel.a, problem.var_name(rel.i), s.empty());
  s += term(rel.b, problem.var_name(rel.w), s.empty());
  s += term(rel.c, problem.var_name(rel.j), s.empty());
  if (rel.d != 0.0) {
    std::ostringstream t;
    t << (rel.d < 0.0 ? " - " : " + ") << std::abs(rel.d);
    s += t.str();
  }
  if (s.empty()) s = "0";
  const char* op = rel.sense == rlt::RelationSense::kLe
                       ? "<="
                       : rel.sense == rlt::RelationSense::kGe ? ">=" : "==";
  out << s << " " << op << " " << problem.var_name(rel.i) << "*"
      << problem.var_name(rel.j);
  return out.str();
}

rlt::Settings settings_for(const std::string& variant, bool marking, bool projection,
                           double time_limit, long node_limit) {
  rlt::BenchVariant v = rlt::make_variant(variant, marking, projection, time_limit,
                                          node_limit);
  return v.settings;
}

int cmd_detect(const std::string& path) {
  rlt::Problem problem = rlt::parse_instance(read_file(path));
  rlt::DetectionResult result = rlt::detect_implicit_products(problem);
  std::printf("%zu candidate pair(s) tried, %zu relation(s) derived\n",
              static_cast<std::size_t>(result.pairs_tried), result.relations.size());
  for (const rlt::DetectedRelation& det : result.detailed)
    std::printf("  %s    [from %s and %s]\n",
                describe_relation(problem, det.relation).c_str(),
                det.first_source.c_str(), det.second_source.c_str());
  return 0;
}

int cmd_root(const std::string& path, const std::string& variant, bool marking,
             bool projection, const std::string& out_path) {
  rlt::Problem problem = rlt::parse_instance(read_file(path));
  rlt::Settings settings = settings_for(variant, marking, projection, rlt::kInf, 0);
  rlt::RootReport report = rlt::solve_root(problem, settings);
  if (report.error_round >= 0) {
    std::printf("LP %s in round %d\n", rlt::to_string(report.lp_status),
                report.error_round);
    return 2;
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::fprintf(stderr, "cannot write %s\n", out_path.c_str());
      return 1;
    }
    out << rlt::write_report(rlt::root_report_table(report), rlt::ReportFormat::kCsv);
  }
  std::printf("round  dual_bound      cuts_added\n");
  for (std::size_t k = 0; k < report.bound_trajectory.size(); ++k) {
    const auto& [round, bound] = report.bound_trajectory[k];
    int cuts = k < report.cuts_added_per_round.size()
                   ? report.cuts_added_per_round[k]
                   : 0;
    std::printf("%5d  %-15.9g %d\n", round, bound, cuts);
  }
  std::printf("final dual bound: %.9g\n", report.final_bound);
  std::printf("lp iterations: %ld, relations detected: %d\n", report.lp_iterations,
              report.relations_detected);
  std::printf("separation: %ld candidates, %ld cuts built, %ld kept\n",
              report.sep_stats.candidates_examined, report.sep_stats.cuts_built,
              report.sep_stats.cuts_kept);
  return 0;
}

int cmd_bench(const std::string& dir, const std::string& variants_csv, bool marking,
              bool projection, double time_limit, long node_limit,
              const std::string& out_path, bool serial) {
  rlt::BenchConfig config;
  config.serial = serial;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > 9 && name.substr(name.size() - 9) == ".rlt.json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files)
    config.instances.emplace_back(file.filename().string(), read_file(file.string()));
  if (config.instances.empty()) {
    std::fprintf(stderr, "no .rlt.json instances in %s\n", dir.c_str());
    return 1;
  }

  std::stringstream names(variants_csv);
  std::string token;
  while (std::getline(names, token, ','))
    config.variants.push_back(
        rlt::make_variant(token, marking, projection, time_limit, node_limit));
  if (config.variants.size() < 2) {
    std::fprintf(stderr, "need at least two variants for ratio tables\n");
    return 1;
  }

  rlt::BenchReport bench = rlt::run_benchmark(config);
  rlt::Report table = rlt::bench_report_table(bench, config);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "cannot write %s\n", out_path.c_str());
    return 1;
  }
  out << rlt::write_report(table, rlt::ReportFormat::kCsv);
  out.close();

  long solved = 0, failed = 0;
  for (const rlt::BenchRun& run : bench.runs) {
    if (run.failed) ++failed;
    else if (run.report.solved()) ++solved;
  }
  std::printf("%zu runs: %ld solved, %ld failed; table written to %s\n",
              bench.runs.size(), solved, failed, out_path.c_str());
  return failed > 0 ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RLT cutting planes for explicit and implicit bilinear products"};
  app.require_subcommand(1);

  std::string detect_file;
  CLI::App* detect = app.add_subcommand("detect", "derive implicit product relations");
  detect->add_option("file", detect_file, "instance (.rlt.json)")->required();

  std::string root_file, root_variant = "ierlt", root_out;
  std::string root_marking = "on", root_projection = "on";
  CLI::App* root = app.add_subcommand("root", "run the root cutting-plane loop");
  root->add_option("file", root_file, "instance (.rlt.json)")->required();
  root->add_option("--variant", root_variant, "off, erlt or ierlt");
  root->add_option("--marking", root_marking, "on|off");
  root->add_option("--projection", root_projection, "on|off");
  root->add_option("--out", root_out, "also write the trajectory as CSV");

  std::string bench_dir, bench_variants = "off,ierlt", bench_out = "bench.csv";
  std::string bench_marking = "on", bench_projection = "on";
  double bench_time_limit = 10.0;
  long bench_node_limit = 10000;
  bool bench_serial = false;
  CLI::App* bench = app.add_subcommand("bench", "solve an instance directory under several settings");
  bench->add_option("--instances", bench_dir, "directory of .rlt.json files")->required();
  bench->add_option("--variants", bench_variants, "comma list: off,erlt,ierlt");
  bench->add_option("--marking", bench_marking, "on|off");
  bench->add_option("--projection", bench_projection, "on|off");
  bench->add_option("--time-limit", bench_time_limit, "per-run limit in seconds");
  bench->add_option("--node-limit", bench_node_limit, "per-run node limit");
  bench->add_option("--out", bench_out, "output CSV path");
  bench->add_flag("--serial", bench_serial, "run serially with deterministic times");

  CLI11_PARSE(app, argc, argv);

  try {
    if (detect->parsed()) return cmd_detect(detect_file);
    if (root->parsed())
      return cmd_root(root_file, root_variant, root_marking != "off",
                      root_projection != "off", root_out);
    if (bench->parsed())
      return cmd_bench(bench_dir, bench_variants, bench_marking != "off",
                       bench_projection != "off", bench_time_limit, bench_node_limit,
                       bench_out, bench_serial);
  } catch (const rlt::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
