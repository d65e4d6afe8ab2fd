// Copyright 2026 The dpsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <map>
#include <vector>

#include "catch2/catch_amalgamated.hpp"

#include "dpsynth/rng.hpp"
#include "dpsynth/table.hpp"
#include "test_util.hpp"

using namespace dpsynth;
using dpsynth::testing::make_codebook;
using dpsynth::testing::make_counts;
using dpsynth::testing::make_dataset;

TEST_CASE("codebook construction enforces its invariants") {
  CHECK(make_codebook({2, 3})->n_cells() == 6);
  CHECK(make_codebook({3, 4, 5})->n_cells() == 60);

  std::vector<Variable> one_cat{{"A", {"only"}}};
  CHECK_THROWS_AS(Codebook(one_cat), DataError);

  std::vector<Variable> dup{{"A", {"x", "x"}}};
  CHECK_THROWS_AS(Codebook(dup), DataError);

  CHECK_THROWS_AS(make_codebook({1000, 1000, 1000}), DataError);
  // Explicit override of the cell ceiling.
  CHECK(make_codebook({1000, 1000, 1000}, CellIndex{2'000'000'000})->n_cells() ==
        1'000'000'000ULL);
}

TEST_CASE("cell index is row-major mixed radix") {
  auto cb = make_codebook({2, 3});
  CHECK(cb->encode(LevelTuple{1, 2}) == 5);
  CHECK(cb->encode(LevelTuple{0, 0}) == 0);
  CHECK(cb->decode(5) == LevelTuple{1, 2});

  SECTION("out-of-range level names the variable") {
    try {
      cb->encode(LevelTuple{0, 3});
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("'B'") != std::string::npos);
    }
  }
}

TEST_CASE("encode/decode round-trips every cell of (3,4,5)") {
  auto cb = make_codebook({3, 4, 5});
  REQUIRE(cb->n_cells() == 60);
  for (CellIndex i = 0; i < 60; ++i)
    CHECK(cb->encode(cb->decode(i)) == i);
}

TEST_CASE("build_table counts records exactly") {
  auto data = make_dataset({2, 2}, {{0, 0}, {0, 1}, {1, 1}, {1, 1}});
  ContingencyTable t = build_table(data);
  CHECK(t.values() == std::vector<double>{1, 1, 0, 2});
  CHECK(t.total() == 4.0);

  Dataset empty;
  empty.codebook = make_codebook({2, 2});
  CHECK(build_table(empty).total() == 0.0);
}

TEST_CASE("build_table matches an associative-map counting oracle") {
  auto cb = make_codebook({3, 4});
  Dataset data;
  data.codebook = cb;
  RngStream rng(7, 0);
  std::map<std::pair<Level, Level>, double> oracle;
  for (int r = 0; r < 500; ++r) {
    Level a = static_cast<Level>(rng.below(3));
    Level b = static_cast<Level>(rng.below(4));
    data.append_record(LevelTuple{a, b});
    oracle[{a, b}] += 1.0;
  }
  ContingencyTable t = build_table(data);
  for (Level a = 0; a < 3; ++a)
    for (Level b = 0; b < 4; ++b) {
      auto it = oracle.find({a, b});
      double expected = it == oracle.end() ? 0.0 : it->second;
      CHECK(t.values()[cb->encode(LevelTuple{a, b})] == expected);
    }
}

TEST_CASE("build_table rejects records in structural zeros") {
  auto data = make_dataset({2, 2}, {{0, 0}, {1, 1}});
  CHECK_THROWS_AS(build_table(data, {3}), DataError);
  ContingencyTable ok = build_table(data, {1});
  CHECK(ok.is_structural_zero(1));
  CHECK(ok.n_free_cells() == 3);
}

TEST_CASE("marginalize projects counts and preserves totals") {
  ContingencyTable t = make_counts({2, 2}, {1, 1, 0, 2});
  MarginTable a = marginalize(t, MarginSpec{{0}});
  CHECK(a.values() == std::vector<double>{2, 2});

  MarginTable full = marginalize(t, MarginSpec{{0, 1}});
  CHECK(full.values() == t.values());
}

TEST_CASE("marginalize matches a nested-loop oracle on a 3-var table") {
  auto cb = make_codebook({3, 2, 4});
  ContingencyTable t(cb, TableMode::kCounts);
  RngStream rng(11, 0);
  for (auto& v : t.values()) v = static_cast<double>(rng.below(9));

  MarginTable got = marginalize(t, MarginSpec{{0, 2}});
  for (Level a = 0; a < 3; ++a)
    for (Level c = 0; c < 4; ++c) {
      double expect = 0;
      for (Level b = 0; b < 2; ++b)
        expect += t.values()[cb->encode(LevelTuple{a, b, c})];
      CHECK(got.values()[a * 4 + c] == expect);
    }
}

TEST_CASE("margin totals equal table totals for every spec") {
  auto cb = make_codebook({3, 2, 4});
  ContingencyTable t(cb, TableMode::kCounts);
  RngStream rng(13, 0);
  for (auto& v : t.values()) v = static_cast<double>(rng.below(20));
  for (std::size_t order = 1; order <= 3; ++order)
    for (const auto& spec : all_margins(*cb, order))
      CHECK(marginalize(t, spec).total() == t.total());
}

TEST_CASE("nested projection equals direct projection") {
  auto cb = make_codebook({3, 2, 4});
  ContingencyTable t(cb, TableMode::kCounts);
  RngStream rng(17, 0);
  for (auto& v : t.values()) v = static_cast<double>(rng.below(50));
  MarginTable ab = marginalize(t, MarginSpec{{0, 1}});
  MarginTable a_direct = marginalize(t, MarginSpec{{0}});
  MarginTable a_nested = marginalize(ab, MarginSpec{{0}});
  CHECK(a_nested.values() == a_direct.values());
}

TEST_CASE("all_margins enumerates combinations lexicographically") {
  CHECK(all_margins(*make_codebook({2, 2, 2, 2, 2}), 2).size() == 10);
  CHECK(all_margins(*make_codebook({2, 2, 2, 2, 2, 2, 2}), 3).size() == 35);

  auto full = all_margins(*make_codebook({2, 2, 2}), 3);
  REQUIRE(full.size() == 1);
  CHECK(full[0].variable_indices == std::vector<std::size_t>{0, 1, 2});

  auto pairs = all_margins(*make_codebook({2, 2, 2}), 2);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].variable_indices == std::vector<std::size_t>{0, 1});
  CHECK(pairs[1].variable_indices == std::vector<std::size_t>{0, 2});
  CHECK(pairs[2].variable_indices == std::vector<std::size_t>{1, 2});

  CHECK_THROWS_AS(all_margins(*make_codebook({2, 2}), 3), DataError);
  CHECK_THROWS_AS(all_margins(*make_codebook({2, 2}), 0), DataError);
}

TEST_CASE("margin multiplicity is the number of fitted margins") {
  auto specs = all_margins(*make_codebook({2, 2, 2, 2, 2}), 2);
  CHECK(margin_multiplicity(specs) == 10);
}

TEST_CASE("structural zeros project onto margins") {
  // Second column of a 2x2 table is structurally impossible.
  ContingencyTable t = make_counts({2, 2}, {3, 0, 1, 0}, {1, 3});
  MarginTable b = marginalize(t, MarginSpec{{1}});
  CHECK_FALSE(b.is_structural_zero(0));
  CHECK(b.is_structural_zero(1));
  MarginTable a = marginalize(t, MarginSpec{{0}});
  CHECK(a.n_structural_zeros() == 0);
}
