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

// The noise half of the pipeline: prior spreading, Laplace perturbation,
// clamping, and rescaling that turn exact counts into probability tables.
//
// Privacy accounting. One individual changes exactly one cell of the full
// cross-tabulation by 1, so the saturated mechanism has sensitivity 1 and
// Laplace scale 1/epsilon gives epsilon-DP. For the margin mechanism the
// same individual changes one cell in each of the M fitted margins; scale
// M/epsilon per margin spends epsilon/M on each, and sequential composition
// over the M margins totals epsilon.

#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dpsynth/errors.hpp"
#include "dpsynth/rng.hpp"
#include "dpsynth/table.hpp"

namespace dpsynth {

enum class SynthMethod { kCatall, kIpf };

inline const char* to_string(SynthMethod m) {
  return m == SynthMethod::kCatall ? "catall" : "ipf";
}

// Shared surface of ContingencyTable and MarginTable that the noise steps
// operate on.
template <typename T>
concept TableLike = requires(T table, const T ctable, CellIndex i) {
  { ctable.values() } -> std::convertible_to<const std::vector<double>&>;
  { table.values() } -> std::convertible_to<std::vector<double>&>;
  { ctable.mode() } -> std::same_as<TableMode>;
  { ctable.provenance() } -> std::same_as<Provenance>;
  { ctable.is_structural_zero(i) } -> std::same_as<bool>;
  { ctable.n_free_cells() } -> std::same_as<CellIndex>;
};

struct NoiseConfig {
  std::optional<double> epsilon;  // absent = non-DP run, no noise step
  double nprior = 1.0;            // total pseudo-count spread over free cells
  double clamp_floor = 0.0;       // replacement for negative noisy counts
  std::size_t margin_multiplicity = 1;  // M, margins fitted to each cell
};

// Spreads a total pseudo-count of `nprior` evenly over the cells that are
// not structural zeros. The table total increases by exactly nprior.
template <TableLike T>
T add_prior(const T& counts, double nprior) {
  if (counts.mode() != TableMode::kCounts)
    throw DataError("add_prior expects a counts table");
  if (nprior < 0) throw DataError("nprior must be non-negative");
  if (counts.n_free_cells() == 0)
    throw DataError("add_prior: every cell is a structural zero");
  T out = counts;
  if (nprior == 0) return out;
  double share = nprior / static_cast<double>(counts.n_free_cells());
  auto& v = out.values();
  for (CellIndex i = 0; i < v.size(); ++i)
    if (!out.is_structural_zero(i)) v[i] += share;
  return out;
}

// Laplace dispersion for the chosen mechanism: 1/epsilon for the saturated
// table, M/epsilon per margin for the margin mechanism.
inline double laplace_scale(SynthMethod method, double epsilon,
                            std::size_t margin_count = 1) {
  if (!(epsilon > 0)) throw DataError("epsilon must be positive");
  if (method == SynthMethod::kCatall) return 1.0 / epsilon;
  if (margin_count < 1)
    throw DataError("margin mechanism needs at least one margin");
  return static_cast<double>(margin_count) / epsilon;
}

// Adds i.i.d. Laplace(0, scale) noise to every free cell. Structural zeros
// are left untouched. The result is tagged noisy; between this step and
// clamp_rescale the values are raw noisy counts and may be negative.
template <TableLike T>
T perturb(const T& table, double scale, RngStream& rng) {
  if (!(scale > 0)) throw DataError("laplace scale must be positive");
  T out = table;
  auto& v = out.values();
  for (CellIndex i = 0; i < v.size(); ++i)
    if (!out.is_structural_zero(i)) v[i] += rng.laplace(scale);
  out.set_provenance(Provenance::kNoisy);
  return out;
}

// Replaces values below the clamp floor on free cells, zeroes structural
// zeros, and rescales to a probability table. Throws DegenerateTableError
// when no mass survives clamping.
template <TableLike T>
T clamp_rescale(const T& table, double clamp_floor = 0.0) {
  if (clamp_floor < 0) throw DataError("clamp floor must be non-negative");
  T out = table;
  auto& v = out.values();
  for (CellIndex i = 0; i < v.size(); ++i)
    v[i] = out.is_structural_zero(i) ? 0.0 : std::max(v[i], clamp_floor);
  double total = stable_sum(v);
  if (!(total > 0))
    throw DegenerateTableError(
        "degenerate noisy table: no mass left after clamping");
  for (double& x : v) x /= total;
  out.set_mode(TableMode::kProbabilities);
  return out;
}

// Budget split for the margin mechanism: epsilon/M per margin.
inline std::vector<double> per_margin_epsilons(double epsilon,
                                               std::size_t n_margins) {
  if (!(epsilon > 0)) throw DataError("epsilon must be positive");
  if (n_margins < 1) throw DataError("need at least one margin");
  return std::vector<double>(n_margins,
                             epsilon / static_cast<double>(n_margins));
}

// Sequential composition: budgets spent on the same data add up.
inline double sequential_composition(std::span<const double> epsilons) {
  return stable_sum(epsilons);
}

// Parallel composition: disjoint strata cost the maximum, not the sum.
inline double parallel_composition(std::span<const double> epsilons) {
  double max_eps = 0.0;
  for (double e : epsilons) max_eps = std::max(max_eps, e);
  return max_eps;
}

}  // namespace dpsynth
