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

#include "rlt/model.hpp"
#include "test_helpers.hpp"

using namespace rlt;
using rlt_test::ProblemBuilder;

TEST_CASE("validate accepts a well-formed two-variable problem", "[model]") {
  ProblemBuilder b;
  int x1 = b.var("x1", 0, 1);
  int x2 = b.var("x2", 0, 2);
  b.le_row({{x1, 1.0}, {x2, 1.0}}, 2.0);
  REQUIRE(validate(b.build()).empty());
}

TEST_CASE("validate flags a binary variable with ub = 2", "[model]") {
  ProblemBuilder b;
  b.var("z", 0, 2, VarKind::kBinary);
  ValidationReport report = validate(b.build());
  REQUIRE(report.size() == 1);
  REQUIRE(report[0].location == "variable z");
}

TEST_CASE("validate flags a relation with B = 0", "[model]") {
  ProblemBuilder b;
  int x1 = b.binary("x1");
  int x2 = b.var("x2", 0, 1);
  int w = b.var("w", 0, 1);
  b.relation(x1, x2, w, RelationSense::kEq, 0, 0, 0, 0);
  ValidationReport report = validate(b.build());
  REQUIRE(report.size() == 1);
  REQUIRE(report[0].message == "B = 0");
}

TEST_CASE("validate checks row sides and references", "[model]") {
  ProblemBuilder b;
  int x = b.var("x", 0, 1);
  b.row({{x, 1.0}}, kInf, -kInf);  // both sides infinite (swapped)
  REQUIRE_FALSE(validate(b.build()).empty());
}

TEST_CASE("product index of a single relation", "[model]") {
  ProblemBuilder b;
  int x1 = b.var("x1", 0, 1);
  int x2 = b.var("x2", 0, 1);
  int w = b.var("w", 0, 1);
  b.relation(x1, x2, w);
  ProductIndex index = build_product_index(b.build());
  REQUIRE(index.partners(x1) == std::vector<std::pair<int, int>>{{x2, 0}});
  REQUIRE(index.partners(x2) == std::vector<std::pair<int, int>>{{x1, 0}});
  REQUIRE(index.relations_of(x1, x2) == std::vector<int>{0});
  REQUIRE(index.relations_of(x2, x1) == std::vector<int>{0});
}

TEST_CASE("product index of an empty problem is empty", "[model]") {
  ProductIndex index = build_product_index(Problem{});
  REQUIRE(index.by_var.empty());
  REQUIRE(index.by_pair.empty());
}

TEST_CASE("two relations sharing a variable give two partner entries", "[model]") {
  ProblemBuilder b;
  int x1 = b.var("x1", 0, 1);
  int x2 = b.var("x2", 0, 1);
  int x3 = b.var("x3", 0, 1);
  int w1 = b.var("w1", 0, 1);
  int w2 = b.var("w2", 0, 1);
  b.relation(x1, x2, w1);
  b.relation(x1, x3, w2);
  ProductIndex index = build_product_index(b.build());
  REQUIRE(index.partners(x1).size() == 2);
  REQUIRE(index.partners(x2).size() == 1);
}

TEST_CASE("duplicate explicit relations are deduplicated and reported", "[model]") {
  ProblemBuilder b;
  int x1 = b.var("x1", 0, 1);
  int x2 = b.var("x2", 0, 1);
  int w = b.var("w", 0, 1);
  b.relation(x1, x2, w);
  b.relation(x2, x1, w);  // same relation, swapped roles
  ProductIndex index = build_product_index(b.build());
  REQUIRE(index.duplicates == std::vector<int>{1});
  REQUIRE(index.relations_of(x1, x2).size() == 1);
}

TEST_CASE("every relation appears exactly once per member variable", "[model]") {
  rlt_test::Rng rng(7);
  ProblemBuilder b;
  const int nvars = 6;
  std::vector<int> vars;
  for (int k = 0; k < nvars; ++k) vars.push_back(b.var("v" + std::to_string(k), 0, 1));
  std::vector<int> ws;
  for (int k = 0; k < 8; ++k) ws.push_back(b.var("w" + std::to_string(k), 0, 1));
  Problem base = b.build();
  for (int k = 0; k < 8; ++k) {
    ProductRelation rel;
    rel.i = vars[rng.uniform_int(0, nvars - 1)];
    rel.j = vars[rng.uniform_int(0, nvars - 1)];
    rel.w = ws[k];
    rel.b = rng.chance(0.5) ? 1.0 : 2.0;
    rel.d = rng.uniform(-1, 1);
    rel.sense = RelationSense::kEq;
    base.relations.push_back(rel);
  }
  ProductIndex index = build_product_index(base);
  for (std::size_t r = 0; r < base.relations.size(); ++r) {
    if (std::count(index.duplicates.begin(), index.duplicates.end(), static_cast<int>(r)))
      continue;
    const ProductRelation& rel = base.relations[r];
    for (int v : {rel.i, rel.j}) {
      long hits = 0;
      for (const auto& [partner, id] : index.partners(v))
        if (id == static_cast<int>(r)) ++hits;
      REQUIRE(hits == 1);
    }
    // round trip through the pair map
    const auto& ids = index.relations_of(rel.i, rel.j);
    REQUIRE(std::count(ids.begin(), ids.end(), static_cast<int>(r)) == 1);
  }
}
