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

// Seeded benchmark data: samples records from a log-linear joint with
// chosen main-effect, two-way, and three-way dispersion, plus an optional
// exactly planted three-way interaction on a binary triple. Used where a
// ground-truth generating model is needed.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dpsynth/codebook.hpp"
#include "dpsynth/csv.hpp"
#include "dpsynth/errors.hpp"
#include "dpsynth/rng.hpp"
#include "dpsynth/synth.hpp"
#include "dpsynth/table.hpp"

namespace dpsynth {

// A three-way interaction with a closed form: on three binary variables,
// log_or_shift is exactly the difference between the log odds ratio of the
// first pair at level 1 of the third variable and at level 0.
struct PlantedThreeWay {
  std::array<std::size_t, 3> variables;
  double log_or_shift = 0.0;
};

struct BenchmarkSpec {
  std::vector<std::size_t> cardinalities;
  std::uint64_t n_records = 5000;
  double main_effect_sd = 0.5;
  double two_way_sd = 0.0;    // 0 = independence between variables
  double three_way_sd = 0.0;  // general three-way roughness on all triples
  std::optional<PlantedThreeWay> planted_three_way;
  std::uint64_t seed = 0;
  CellIndex cell_ceiling = kDefaultCellCeiling;
};

struct BenchmarkData {
  Dataset data;
  std::vector<double> cell_probabilities;  // the generating joint
  nlohmann::json parameters;               // ground truth for oracles
};

inline BenchmarkData generate_benchmark_data(const BenchmarkSpec& spec) {
  if (spec.cardinalities.size() < 2)
    throw DataError("benchmark: need at least 2 variables");
  std::vector<Variable> variables(spec.cardinalities.size());
  for (std::size_t v = 0; v < spec.cardinalities.size(); ++v) {
    if (spec.cardinalities[v] < 2)
      throw DataError("benchmark: cardinalities must be at least 2");
    variables[v].name = "v" + std::to_string(v + 1);
    for (std::size_t c = 0; c < spec.cardinalities[v]; ++c)
      variables[v].categories.push_back("c" + std::to_string(c + 1));
  }
  auto codebook =
      std::make_shared<const Codebook>(variables, spec.cell_ceiling);
  const std::size_t n_vars = spec.cardinalities.size();
  const CellIndex k = codebook->n_cells();

  if (spec.planted_three_way) {
    for (std::size_t v : spec.planted_three_way->variables) {
      if (v >= n_vars)
        throw DataError("benchmark: planted interaction variable out of range");
      if (codebook->cardinality(v) != 2)
        throw DataError(
            "benchmark: planted three-way interaction needs binary variables");
    }
    auto t = spec.planted_three_way->variables;
    if (t[0] == t[1] || t[0] == t[2] || t[1] == t[2])
      throw DataError("benchmark: planted interaction variables must differ");
  }

  RngStream param_rng = RngStream(spec.seed, 0).substream(1);
  nlohmann::json params;
  params["cardinalities"] = spec.cardinalities;
  params["n_records"] = spec.n_records;
  params["seed"] = spec.seed;
  params["main_effect_sd"] = spec.main_effect_sd;
  params["two_way_sd"] = spec.two_way_sd;
  params["three_way_sd"] = spec.three_way_sd;
  params["n_cells"] = k;

  std::vector<std::vector<double>> main_effects(n_vars);
  for (std::size_t v = 0; v < n_vars; ++v) {
    main_effects[v].resize(spec.cardinalities[v]);
    for (double& u : main_effects[v])
      u = spec.main_effect_sd * param_rng.normal01();
  }
  params["main_effects"] = main_effects;

  struct PairTerm {
    std::size_t a, b;
    std::vector<double> weights;  // card_a x card_b, row-major
  };
  std::vector<PairTerm> pairs;
  if (spec.two_way_sd > 0) {
    for (std::size_t a = 0; a < n_vars; ++a)
      for (std::size_t b = a + 1; b < n_vars; ++b) {
        PairTerm term{a, b, {}};
        term.weights.resize(spec.cardinalities[a] * spec.cardinalities[b]);
        for (double& u : term.weights)
          u = spec.two_way_sd * param_rng.normal01();
        pairs.push_back(std::move(term));
      }
    auto& jp = params["two_way_effects"];
    for (const auto& t : pairs)
      jp.push_back({{"variables", {t.a, t.b}}, {"weights", t.weights}});
  }

  struct TripleTerm {
    std::size_t a, b, c;
    std::vector<double> weights;
  };
  std::vector<TripleTerm> triples;
  if (spec.three_way_sd > 0) {
    for (std::size_t a = 0; a < n_vars; ++a)
      for (std::size_t b = a + 1; b < n_vars; ++b)
        for (std::size_t c = b + 1; c < n_vars; ++c) {
          TripleTerm term{a, b, c, {}};
          term.weights.resize(spec.cardinalities[a] * spec.cardinalities[b] *
                              spec.cardinalities[c]);
          for (double& u : term.weights)
            u = spec.three_way_sd * param_rng.normal01();
          triples.push_back(std::move(term));
        }
  }
  if (spec.planted_three_way) {
    params["planted_three_way"] = {
        {"variables", spec.planted_three_way->variables},
        {"log_or_shift", spec.planted_three_way->log_or_shift}};
  }

  // Log weight per cell, walked with an odometer to avoid per-cell decode.
  std::vector<double> logw(k, 0.0);
  LevelTuple levels(n_vars, 0);
  for (CellIndex cell = 0; cell < k; ++cell) {
    double w = 0.0;
    for (std::size_t v = 0; v < n_vars; ++v) w += main_effects[v][levels[v]];
    for (const auto& t : pairs)
      w += t.weights[levels[t.a] * spec.cardinalities[t.b] + levels[t.b]];
    for (const auto& t : triples)
      w += t.weights[(levels[t.a] * spec.cardinalities[t.b] + levels[t.b]) *
                         spec.cardinalities[t.c] +
                     levels[t.c]];
    if (spec.planted_three_way) {
      // Sign pattern chosen so the log odds-ratio difference between the
      // two levels of the third variable is exactly log_or_shift.
      auto [a, b, c] = spec.planted_three_way->variables;
      int parity = (levels[a] + levels[b] + levels[c]) % 2 == 0 ? -1 : 1;
      w += parity * spec.planted_three_way->log_or_shift / 8.0;
    }
    logw[cell] = w;
    for (std::size_t v = n_vars; v-- > 0;) {
      if (++levels[v] < spec.cardinalities[v]) break;
      levels[v] = 0;
    }
  }

  double max_logw = logw[0];
  for (double w : logw) max_logw = std::max(max_logw, w);
  ContingencyTable probs(codebook, TableMode::kProbabilities);
  for (CellIndex i = 0; i < k; ++i)
    probs.values()[i] = std::exp(logw[i] - max_logw);
  double total = stable_sum(probs.values());
  if (!(total > 0) || !std::isfinite(total))
    throw DataError("benchmark: probability construction is infeasible");
  for (double& p : probs.values()) p /= total;

  RngStream sample_rng = RngStream(spec.seed, 0).substream(2);
  ContingencyTable counts =
      multinomial_sample(probs, spec.n_records, sample_rng);
  RngStream shuffle_rng = RngStream(spec.seed, 0).substream(3);

  BenchmarkData out;
  out.data = expand_to_records(counts, shuffle_rng);
  out.cell_probabilities = probs.values();
  out.parameters = std::move(params);
  return out;
}

inline void write_benchmark_files(const BenchmarkData& bench,
                                  const std::string& csv_path,
                                  const std::string& params_path) {
  write_csv(bench.data, csv_path);
  std::ofstream out(params_path);
  if (!out) throw DataError("cannot write '" + params_path + "'");
  out << bench.parameters.dump(2) << '\n';
}

}  // namespace dpsynth
