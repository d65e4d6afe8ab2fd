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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "catch2/catch_amalgamated.hpp"

#include "dpsynth/benchmark.hpp"
#include "dpsynth/binning.hpp"
#include "dpsynth/csv.hpp"
#include "test_util.hpp"

using namespace dpsynth;
using Catch::Approx;

namespace {

std::filesystem::path scratch() {
  auto dir = std::filesystem::path("harness_scratch");
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
  auto path = scratch() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

}  // namespace

TEST_CASE("load_csv infers categories in first-appearance order") {
  auto path = write_file("basic.csv", "A,B\na,x\na,y\nb,y\n");
  LoadedCsv loaded = load_csv(path);
  const Codebook& cb = *loaded.data.codebook;
  REQUIRE(cb.n_variables() == 2);
  CHECK(cb.variable(0).categories == std::vector<std::string>{"a", "b"});
  CHECK(cb.variable(1).categories == std::vector<std::string>{"x", "y"});
  REQUIRE(loaded.data.n_records() == 3);
  CHECK(loaded.data.record(0)[0] == 0);
  CHECK(loaded.data.record(2)[0] == 1);
}

TEST_CASE("empty data section requires a codebook") {
  auto path = write_file("header_only.csv", "A,B\n");
  CHECK_THROWS_AS(load_csv(path), DataError);

  LoadOptions options;
  options.codebook = dpsynth::testing::make_codebook({2, 2});
  auto path2 = write_file("header_only2.csv", "A,B\n");
  LoadedCsv loaded = load_csv(path2, options);
  CHECK(loaded.data.n_records() == 0);
}

TEST_CASE("missing values become an explicit MISSING category") {
  auto path = write_file("missing.csv", "A,B\na,NA\nb,\na,u\nNA,u\n");
  LoadedCsv loaded = load_csv(path);
  const Codebook& cb = *loaded.data.codebook;
  auto a_missing = cb.find_category(0, kMissingLabel);
  auto b_missing = cb.find_category(1, kMissingLabel);
  REQUIRE(a_missing.has_value());
  REQUIRE(b_missing.has_value());
  int a_count = 0, b_count = 0;
  for (std::size_t r = 0; r < loaded.data.n_records(); ++r) {
    if (loaded.data.record(r)[0] == *a_missing) ++a_count;
    if (loaded.data.record(r)[1] == *b_missing) ++b_count;
  }
  CHECK(a_count == 1);
  CHECK(b_count == 2);
}

TEST_CASE("ragged rows and unknown labels report the row number") {
  auto ragged = write_file("ragged.csv", "A,B\na,x\nb\n");
  try {
    load_csv(ragged);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }

  LoadOptions options;
  options.codebook = dpsynth::testing::make_codebook({2, 2});
  auto unknown = write_file("unknown.csv", "A,B\nA0,B1\nA9,B0\n");
  try {
    load_csv(unknown, options);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    CHECK(std::string(e.what()).find("A9") != std::string::npos);
  }
}

TEST_CASE("numeric columns are grouped into quantile classes") {
  std::string csv = "id,grp\n";
  for (int i = 1; i <= 100; ++i)
    csv += std::to_string(i) + (i % 2 ? ",m\n" : ",f\n");
  auto path = write_file("numeric.csv", csv);
  LoadedCsv loaded = load_csv(path);
  REQUIRE(loaded.binnings.size() == 1);
  CHECK(loaded.binnings[0].variable == "id");
  CHECK(loaded.binnings[0].boundaries == std::vector<double>{20, 40, 60, 80});
  const Codebook& cb = *loaded.data.codebook;
  REQUIRE(cb.cardinality(0) == 5);
  std::vector<int> counts(5, 0);
  for (std::size_t r = 0; r < 100; ++r) ++counts[loaded.data.record(r)[0]];
  for (int c : counts) CHECK(c == 20);
  // The two-level grp column stays categorical.
  CHECK(cb.variable(1).categories == std::vector<std::string>{"m", "f"});
}

TEST_CASE("bin_numeric core behavior") {
  std::vector<double> ascending(100);
  for (int i = 0; i < 100; ++i) ascending[i] = i + 1;
  BinnedColumn b = bin_numeric(ascending, 5);
  CHECK(b.boundaries == std::vector<double>{20, 40, 60, 80});
  std::vector<int> counts(5, 0);
  for (Level a : b.assignments) ++counts[a];
  for (int c : counts) CHECK(c == 20);
  // Boundary values land in the lower bin.
  CHECK(b.assignments[19] == 0);
  CHECK(b.assignments[20] == 1);

  std::vector<double> constant(50, 3.0);
  CHECK_THROWS_AS(bin_numeric(constant, 5), DataError);

  // Skewed but distinct: counts within 1 of n/5 when n is divisible by 5.
  RngStream rng(42, 0);
  std::vector<double> skewed(200);
  for (auto& v : skewed) v = std::exp(4.0 * rng.uniform01());
  BinnedColumn s = bin_numeric(skewed, 5);
  std::vector<int> sc(s.labels.size(), 0);
  for (Level a : s.assignments) ++sc[a];
  for (int c : sc) CHECK(std::abs(c - 40) <= 1);
}

TEST_CASE("codebook and structural-zero files parse") {
  auto cb_path = write_file("vars.cb",
                            "sex: male, female\n"
                            "work: yes, no, retired\n");
  Codebook cb = load_codebook_file(cb_path);
  REQUIRE(cb.n_variables() == 2);
  CHECK(cb.variable(0).name == "sex");
  CHECK(cb.cardinality(1) == 3);

  auto sz_path = write_file("zeros.txt", "male, retired\n");
  auto tuples = load_structural_zeros(sz_path, cb);
  REQUIRE(tuples.size() == 1);
  CHECK(tuples[0] == LevelTuple{0, 2});
  auto cells = encode_cells(cb, tuples);
  CHECK(cells == std::vector<CellIndex>{2});

  auto bad = write_file("bad.cb", "no colon here\n");
  CHECK_THROWS_AS(load_codebook_file(bad), DataError);
  auto bad_sz = write_file("bad_zeros.txt", "male, unknown\n");
  CHECK_THROWS_AS(load_structural_zeros(bad_sz, cb), DataError);
}

TEST_CASE("write_csv then load_csv round-trips a dataset") {
  auto data = dpsynth::testing::make_dataset(
      {2, 3}, {{0, 2}, {1, 0}, {0, 1}, {1, 2}});
  auto path = (scratch() / "roundtrip.csv").string();
  write_csv(data, path);
  LoadOptions options;
  options.codebook = data.codebook;
  LoadedCsv loaded = load_csv(path, options);
  CHECK(loaded.data.levels == data.levels);
}

TEST_CASE("benchmark generator reproduces the requested shape") {
  BenchmarkSpec spec;
  spec.cardinalities = {2, 5, 6, 4, 9};
  spec.n_records = 5000;
  spec.two_way_sd = 0.2;
  spec.seed = 7;
  BenchmarkData bench = generate_benchmark_data(spec);
  CHECK(bench.data.codebook->n_cells() == 2160);
  CHECK(bench.data.n_records() == 5000);
  CHECK(bench.parameters["n_cells"] == 2160);

  // Determinism: same spec, same records.
  BenchmarkData again = generate_benchmark_data(spec);
  CHECK(bench.data.levels == again.data.levels);
}

TEST_CASE("independence profile yields product margins") {
  BenchmarkSpec spec;
  spec.cardinalities = {3, 4};
  spec.n_records = 20000;
  spec.main_effect_sd = 0.4;
  spec.two_way_sd = 0.0;
  spec.seed = 11;
  BenchmarkData bench = generate_benchmark_data(spec);
  ContingencyTable t = build_table(bench.data);
  MarginTable a = marginalize(t, MarginSpec{{0}});
  MarginTable b = marginalize(t, MarginSpec{{1}});
  double n = t.total();
  for (Level i = 0; i < 3; ++i)
    for (Level j = 0; j < 4; ++j) {
      double joint = t.values()[i * 4 + j] / n;
      double prod = (a.values()[i] / n) * (b.values()[j] / n);
      CHECK(joint == Approx(prod).margin(0.02));
    }
}

TEST_CASE("planted three-way interaction matches its closed form") {
  BenchmarkSpec spec;
  spec.cardinalities = {2, 2, 2};
  spec.n_records = 20000;
  spec.main_effect_sd = 0.1;
  spec.two_way_sd = 0.1;
  spec.planted_three_way = PlantedThreeWay{{0, 1, 2}, 1.0};
  spec.seed = 13;
  BenchmarkData bench = generate_benchmark_data(spec);
  ContingencyTable t = build_table(bench.data);
  auto& cb = *bench.data.codebook;
  auto count = [&](Level a, Level b, Level c) {
    return t.values()[cb.encode(LevelTuple{a, b, c})];
  };
  auto log_or = [&](Level c) {
    return std::log(count(0, 0, c) * count(1, 1, c) /
                    (count(0, 1, c) * count(1, 0, c)));
  };
  double diff = log_or(1) - log_or(0);
  double se = 0;
  for (Level a = 0; a < 2; ++a)
    for (Level b = 0; b < 2; ++b)
      for (Level c = 0; c < 2; ++c) se += 1.0 / count(a, b, c);
  se = std::sqrt(se);
  CHECK(diff == Approx(1.0).margin(3 * se));

  // Ground truth carries the plant.
  CHECK(bench.parameters["planted_three_way"]["log_or_shift"] == 1.0);
}

TEST_CASE("benchmark input validation") {
  BenchmarkSpec bad;
  bad.cardinalities = {2};
  CHECK_THROWS_AS(generate_benchmark_data(bad), DataError);

  BenchmarkSpec non_binary;
  non_binary.cardinalities = {2, 3, 2};
  non_binary.planted_three_way = PlantedThreeWay{{0, 1, 2}, 1.0};
  CHECK_THROWS_AS(generate_benchmark_data(non_binary), DataError);
}

TEST_CASE("benchmark files are written and loadable") {
  BenchmarkSpec spec;
  spec.cardinalities = {2, 3};
  spec.n_records = 200;
  spec.seed = 3;
  BenchmarkData bench = generate_benchmark_data(spec);
  auto csv_path = (scratch() / "bench.csv").string();
  auto params_path = (scratch() / "bench.params.json").string();
  write_benchmark_files(bench, csv_path, params_path);
  LoadedCsv loaded = load_csv(csv_path);
  CHECK(loaded.data.n_records() == 200);
  std::ifstream params(params_path);
  REQUIRE(params.good());
  auto parsed = nlohmann::json::parse(params);
  CHECK(parsed["n_records"] == 200);
}
