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

#ifndef RLT_INSTANCE_IO_HPP_
#define RLT_INSTANCE_IO_HPP_

#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rlt/model.hpp"

namespace rlt {

/// Error raised by the instance reader; `path` points at the offending
/// document location (JSON-pointer style, or a parser position for syntax
/// errors).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

namespace io_detail {

using nlohmann::json;

inline double parse_extended(const json& j, const std::string& path) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw ParseError(path, "expected a number or \"inf\"/\"-inf\", got \"" + s + "\"");
  }
  if (!j.is_number()) throw ParseError(path, "expected a number");
  double v = j.get<double>();
  if (std::isnan(v)) throw ParseError(path, "NaN is not allowed");
  return v;
}

inline double parse_real(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a finite number");
  double v = j.get<double>();
  if (!is_finite(v)) throw ParseError(path, "expected a finite number");
  return v;
}

inline void check_fields(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
  for (const auto& [key, value] : obj.items())
    if (allowed.find(key) == allowed.end())
      throw ParseError(path + "/" + key, "unknown field");
}

/// 17 significant digits: enough for doubles to round-trip bit-exactly.
inline std::string format_real(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline json extended_to_json(double v) {
  if (v == kInf) return json("inf");
  if (v == -kInf) return json("-inf");
  return json(v);
}

}  // namespace io_detail

/// Reads a versioned JSON instance document (`.rlt.json`). The parse is
/// total: any error throws ParseError and no partial problem escapes.
inline Problem parse_instance(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  } catch (const json::exception& e) {
    throw ParseError("", e.what());
  }
  if (!doc.is_object()) throw ParseError("", "top level must be an object");
  io_detail::check_fields(doc, {"version", "variables", "objective", "rows", "products"}, "");

  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != 1)
    throw ParseError("/version", "unsupported or missing version (expected 1)");

  Problem problem;
  std::map<std::string, int> var_ids;

  const json& vars = doc.value("variables", json::array());
  if (!vars.is_array()) throw ParseError("/variables", "expected an array");
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const std::string path = "/variables/" + std::to_string(k);
    const json& jv = vars[k];
    if (!jv.is_object()) throw ParseError(path, "expected an object");
    io_detail::check_fields(jv, {"name", "lb", "ub", "kind"}, path);
    Variable v;
    if (!jv.contains("name") || !jv["name"].is_string())
      throw ParseError(path + "/name", "missing variable name");
    v.name = jv["name"].get<std::string>();
    if (var_ids.count(v.name))
      throw ParseError(path + "/name", "duplicate variable name \"" + v.name + "\"");
    v.lb = jv.contains("lb") ? io_detail::parse_extended(jv["lb"], path + "/lb") : -kInf;
    v.ub = jv.contains("ub") ? io_detail::parse_extended(jv["ub"], path + "/ub") : kInf;
    const std::string kind = jv.value("kind", "continuous");
    if (kind == "binary")
      v.kind = VarKind::kBinary;
    else if (kind == "continuous")
      v.kind = VarKind::kContinuous;
    else
      throw ParseError(path + "/kind", "unknown kind \"" + kind + "\"");
    v.id = static_cast<int>(problem.variables.size());
    var_ids[v.name] = v.id;
    problem.variables.push_back(std::move(v));
  }

  auto resolve = [&](const std::string& name, const std::string& path) {
    auto it = var_ids.find(name);
    if (it == var_ids.end())
      throw ParseError(path, "unknown variable \"" + name + "\"");
    return it->second;
  };

  if (doc.contains("objective")) {
    const json& obj = doc["objective"];
    const std::string path = "/objective";
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    io_detail::check_fields(obj, {"sense", "coeffs"}, path);
    if (obj.value("sense", "min") != "min")
      throw ParseError(path + "/sense", "only \"min\" is supported");
    const json coeffs = obj.value("coeffs", json::object());
    for (const auto& [name, jc] : coeffs.items())
      problem.objective.add_term(
          resolve(name, path + "/coeffs/" + name),
          io_detail::parse_real(jc, path + "/coeffs/" + name));
  }

  const json& rows = doc.value("rows", json::array());
  if (!rows.is_array()) throw ParseError("/rows", "expected an array");
  std::set<std::string> row_names;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::string path = "/rows/" + std::to_string(k);
    const json& jr = rows[k];
    if (!jr.is_object()) throw ParseError(path, "expected an object");
    io_detail::check_fields(jr, {"name", "lhs", "rhs", "coeffs"}, path);
    LinearRow row;
    row.id = static_cast<int>(problem.rows.size());
    row.name = jr.value("name", "r" + std::to_string(row.id));
    if (!row_names.insert(row.name).second)
      throw ParseError(path + "/name", "duplicate row name \"" + row.name + "\"");
    row.lhs = jr.contains("lhs") ? io_detail::parse_extended(jr["lhs"], path + "/lhs") : -kInf;
    row.rhs = jr.contains("rhs") ? io_detail::parse_extended(jr["rhs"], path + "/rhs") : kInf;
    const json row_coeffs = jr.value("coeffs", json::object());
    for (const auto& [name, jc] : row_coeffs.items()) {
      double coef = io_detail::parse_real(jc, path + "/coeffs/" + name);
      if (coef != 0.0) row.coeffs[resolve(name, path + "/coeffs/" + name)] = coef;
    }
    problem.rows.push_back(std::move(row));
  }

  const json& products = doc.value("products", json::array());
  if (!products.is_array()) throw ParseError("/products", "expected an array");
  for (std::size_t k = 0; k < products.size(); ++k) {
    const std::string path = "/products/" + std::to_string(k);
    const json& jp = products[k];
    if (!jp.is_object()) throw ParseError(path, "expected an object");
    io_detail::check_fields(jp, {"i", "j", "w", "A", "B", "C", "D", "sense"}, path);
    ProductRelation rel;
    for (const char* field : {"i", "j", "w"})
      if (!jp.contains(field) || !jp[field].is_string())
        throw ParseError(path + "/" + field, "missing variable name");
    rel.i = resolve(jp["i"].get<std::string>(), path + "/i");
    rel.j = resolve(jp["j"].get<std::string>(), path + "/j");
    rel.w = resolve(jp["w"].get<std::string>(), path + "/w");
    rel.a = jp.contains("A") ? io_detail::parse_real(jp["A"], path + "/A") : 0.0;
    rel.b = jp.contains("B") ? io_detail::parse_real(jp["B"], path + "/B") : 1.0;
    rel.c = jp.contains("C") ? io_detail::parse_real(jp["C"], path + "/C") : 0.0;
    rel.d = jp.contains("D") ? io_detail::parse_real(jp["D"], path + "/D") : 0.0;
    const std::string sense = jp.value("sense", "eq");
    if (sense == "le")
      rel.sense = RelationSense::kLe;
    else if (sense == "ge")
      rel.sense = RelationSense::kGe;
    else if (sense == "eq")
      rel.sense = RelationSense::kEq;
    else
      throw ParseError(path + "/sense", "unknown sense \"" + sense + "\"");
    problem.relations.push_back(rel);
  }

  ValidationReport issues = validate(problem);
  if (!issues.empty())
    throw ParseError("/" , issues.front().location + ": " + issues.front().message);
  return problem;
}

/// Writes a problem in the same document format parse_instance reads.
inline std::string write_instance(const Problem& problem) {
  using nlohmann::json;
  json doc;
  doc["version"] = 1;
  json vars = json::array();
  for (const Variable& v : problem.variables) {
    json jv;
    jv["name"] = v.name;
    jv["lb"] = io_detail::extended_to_json(v.lb);
    jv["ub"] = io_detail::extended_to_json(v.ub);
    jv["kind"] = v.kind == VarKind::kBinary ? "binary" : "continuous";
    vars.push_back(jv);
  }
  doc["variables"] = vars;
  json obj;
  obj["sense"] = "min";
  json coeffs = json::object();
  for (const auto& [var, coef] : problem.objective.terms())
    coeffs[problem.var_name(var)] = coef;
  obj["coeffs"] = coeffs;
  doc["objective"] = obj;
  json rows = json::array();
  for (const LinearRow& row : problem.rows) {
    json jr;
    jr["name"] = row.name;
    jr["lhs"] = io_detail::extended_to_json(row.lhs);
    jr["rhs"] = io_detail::extended_to_json(row.rhs);
    json rc = json::object();
    for (const auto& [var, coef] : row.coeffs) rc[problem.var_name(var)] = coef;
    jr["coeffs"] = rc;
    rows.push_back(jr);
  }
  doc["rows"] = rows;
  json products = json::array();
  for (const ProductRelation& rel : problem.relations) {
    json jp;
    jp["i"] = problem.var_name(rel.i);
    jp["j"] = problem.var_name(rel.j);
    jp["w"] = problem.var_name(rel.w);
    jp["A"] = rel.a;
    jp["B"] = rel.b;
    jp["C"] = rel.c;
    jp["D"] = rel.d;
    jp["sense"] = to_string(rel.sense);
    products.push_back(jp);
  }
  doc["products"] = products;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Tabular reports
// ---------------------------------------------------------------------------

using ReportValue = std::variant<std::string, long long, double>;

/// Rows of named, typed columns plus free-form metadata. Rows are emitted
/// sorted by their stringified cells so output never depends on insertion
/// order.
struct Report {
  std::vector<std::string> columns;
  std::vector<std::vector<ReportValue>> rows;
  std::map<std::string, std::string> metadata;

  void add_row(std::vector<ReportValue> row) {
    if (row.size() != columns.size())
      throw std::invalid_argument("report row width mismatch");
    rows.push_back(std::move(row));
  }
};

enum class ReportFormat { kCsv, kJson };

namespace io_detail {

inline std::string value_to_string(const ReportValue& v) {
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  if (std::holds_alternative<long long>(v))
    return std::to_string(std::get<long long>(v));
  return format_real(std::get<double>(v));
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::vector<std::vector<ReportValue>> sorted_rows(const Report& report) {
  std::vector<std::vector<ReportValue>> rows = report.rows;
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) {
                     for (std::size_t k = 0; k < a.size(); ++k) {
                       std::string sa = value_to_string(a[k]);
                       std::string sb = value_to_string(b[k]);
                       if (sa != sb) return sa < sb;
                     }
                     return false;
                   });
  return rows;
}

}  // namespace io_detail

inline std::string write_report(const Report& report, ReportFormat format) {
  const auto rows = io_detail::sorted_rows(report);
  if (format == ReportFormat::kCsv) {
    std::ostringstream out;
    for (std::size_t k = 0; k < report.columns.size(); ++k) {
      if (k) out << ',';
      out << io_detail::csv_escape(report.columns[k]);
    }
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) out << ',';
        out << io_detail::csv_escape(io_detail::value_to_string(row[k]));
      }
      out << '\n';
    }
    return out.str();
  }

  using nlohmann::json;
  json doc;
  doc["columns"] = report.columns;
  json jrows = json::array();
  for (const auto& row : rows) {
    json jrow = json::array();
    for (const auto& v : row) {
      if (std::holds_alternative<std::string>(v))
        jrow.push_back(std::get<std::string>(v));
      else if (std::holds_alternative<long long>(v))
        jrow.push_back(std::get<long long>(v));
      else
        jrow.push_back(std::get<double>(v));
    }
    jrows.push_back(jrow);
  }
  doc["rows"] = jrows;
  doc["metadata"] = report.metadata;
  return doc.dump(2) + "\n";
}

/// Inverse of write_report(kJson); value types are recovered from the JSON
/// types, so read(write(r)) == r for sorted reports.
inline Report read_report_json(const std::string& text) {
  using nlohmann::json;
  json doc = json::parse(text);
  Report report;
  report.columns = doc.at("columns").get<std::vector<std::string>>();
  for (const auto& jrow : doc.at("rows")) {
    std::vector<ReportValue> row;
    for (const auto& v : jrow) {
      if (v.is_string())
        row.emplace_back(v.get<std::string>());
      else if (v.is_number_integer())
        row.emplace_back(v.get<long long>());
      else
        row.emplace_back(v.get<double>());
    }
    report.rows.push_back(std::move(row));
  }
  for (const auto& [key, value] : doc.at("metadata").items())
    report.metadata[key] = value.get<std::string>();
  return report;
}

}  // namespace rlt

#endif  // RLT_INSTANCE_IO_HPP_
