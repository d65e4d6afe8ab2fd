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

// Iterative proportional fitting of a joint probability table to a set of
// target margins.
//
// Each sweep cycles over the targets in the order supplied and multiplies
// every cell by target/projection for its margin cell; cells whose current
// projection is zero are left at zero. The stopping rule is the maximum
// absolute cell change across one full sweep. Noisy targets are usually
// mutually incompatible, so the fit may stop at the iteration cap without
// converging; the result is still renormalized to a valid probability
// table and the residual margin discrepancy is reported, never thrown.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dpsynth/errors.hpp"
#include "dpsynth/table.hpp"

namespace dpsynth {

struct IpfTargets {
  std::vector<MarginTable> margins;

  void validate(const Codebook& codebook) const {
    if (margins.empty()) throw DataError("ipf: no target margins");
    std::vector<bool> covered(codebook.n_variables(), false);
    for (std::size_t t = 0; t < margins.size(); ++t) {
      const MarginTable& m = margins[t];
      if (!(m.codebook() == codebook))
        throw DataError("ipf: target margin built on a different codebook");
      if (m.mode() != TableMode::kProbabilities)
        throw DataError("ipf: target margin '" + m.spec().label(codebook) +
                        "' is not in probabilities mode");
      if (std::abs(m.total() - 1.0) > 1e-9)
        throw DataError("ipf: target margin '" + m.spec().label(codebook) +
                        "' does not sum to 1");
      for (std::size_t u = 0; u < t; ++u)
        if (margins[u].spec() == m.spec())
          throw DataError("ipf: duplicate target margin '" +
                          m.spec().label(codebook) + "'");
      for (std::size_t v : m.spec().variable_indices) covered[v] = true;
    }
    for (std::size_t v = 0; v < covered.size(); ++v)
      if (!covered[v])
        throw DataError("ipf: variable '" + codebook.variable(v).name +
                        "' is not covered by any target margin");
  }

  Provenance provenance() const {
    Provenance p = Provenance::kOriginal;
    for (const auto& m : margins) p = combine(p, m.provenance());
    return p;
  }
};

struct IpfResult {
  ContingencyTable fitted;
  int iterations = 0;
  bool converged = false;
  // L-infinity distance between the fitted projections and their targets
  // at exit; near zero for compatible targets, the honest residual when
  // the noisy targets cannot be reconciled.
  double max_margin_discrepancy = 0.0;
};

// Uniform probability over the free cells, zero on structural zeros: the
// maximum-entropy starting table.
inline ContingencyTable default_init(CodebookPtr codebook,
                                     std::vector<CellIndex> structural_zeros = {}) {
  ContingencyTable init(std::move(codebook), TableMode::kProbabilities,
                        std::move(structural_zeros));
  if (init.n_free_cells() == 0)
    throw DataError("default_init: every cell is a structural zero");
  double p = 1.0 / static_cast<double>(init.n_free_cells());
  auto& v = init.values();
  for (CellIndex i = 0; i < v.size(); ++i)
    if (!init.is_structural_zero(i)) v[i] = p;
  return init;
}

inline IpfResult ipf_fit(const ContingencyTable& init,
                         const IpfTargets& targets, double tol = 1e-8,
                         int max_iter = 5000) {
  if (!(tol > 0)) throw DataError("ipf: tol must be positive");
  if (max_iter < 1) throw DataError("ipf: max_iter must be at least 1");
  if (init.mode() != TableMode::kProbabilities)
    throw DataError("ipf: init table must be in probabilities mode");
  targets.validate(init.codebook());
  const auto& iv = init.values();
  for (CellIndex i = 0; i < iv.size(); ++i)
    if (!init.is_structural_zero(i) && !(iv[i] > 0))
      throw DataError("ipf: init must be strictly positive on free cells");

  const CellIndex k = init.n_cells();
  const std::size_t n_targets = targets.margins.size();

  // Per-target margin-cell index of every full cell, precomputed once so a
  // sweep is two gather passes per target.
  if (static_cast<std::uint64_t>(k) * n_targets >
      (std::uint64_t{1} << 31))
    throw DataError(
        "ipf: margin index cache would exceed memory budget; reduce the "
        "table size or the number of margins");
  std::vector<std::vector<std::uint32_t>> cell_to_margin(n_targets);
  std::vector<CellIndex> margin_sizes(n_targets);
  for (std::size_t t = 0; t < n_targets; ++t) {
    detail::MarginProjection proj(init.codebook(),
                                  targets.margins[t].spec());
    margin_sizes[t] = proj.margin_cells;
    cell_to_margin[t].resize(k);
    for (CellIndex i = 0; i < k; ++i)
      cell_to_margin[t][i] = static_cast<std::uint32_t>(proj.margin_index(i));
  }

  IpfResult result{init, 0, false, 0.0};
  std::vector<double>& w = result.fitted.values();
  std::vector<double> previous(w);
  std::vector<double> projection;
  std::vector<double> factor;

  for (int iter = 1; iter <= max_iter; ++iter) {
    previous = w;
    for (std::size_t t = 0; t < n_targets; ++t) {
      const auto& idx = cell_to_margin[t];
      const auto& target = targets.margins[t].values();
      projection.assign(margin_sizes[t], 0.0);
      for (CellIndex i = 0; i < k; ++i) projection[idx[i]] += w[i];
      factor.resize(margin_sizes[t]);
      for (CellIndex j = 0; j < margin_sizes[t]; ++j)
        factor[j] = projection[j] > 0 ? target[j] / projection[j] : 0.0;
      for (CellIndex i = 0; i < k; ++i) w[i] *= factor[idx[i]];
    }
    double max_change = 0.0;
    for (CellIndex i = 0; i < k; ++i)
      max_change = std::max(max_change, std::abs(w[i] - previous[i]));
    result.iterations = iter;
    if (max_change <= tol) {
      result.converged = true;
      break;
    }
  }

  // Incompatible targets can leave total mass away from 1; the sampler
  // downstream needs a distribution either way.
  double total = stable_sum(w);
  if (total > 0)
    for (double& x : w) x /= total;

  double discrepancy = 0.0;
  for (std::size_t t = 0; t < n_targets; ++t) {
    const auto& idx = cell_to_margin[t];
    const auto& target = targets.margins[t].values();
    projection.assign(margin_sizes[t], 0.0);
    for (CellIndex i = 0; i < k; ++i) projection[idx[i]] += w[i];
    for (CellIndex j = 0; j < margin_sizes[t]; ++j)
      discrepancy = std::max(discrepancy, std::abs(projection[j] - target[j]));
  }
  result.max_margin_discrepancy = discrepancy;
  result.fitted.set_provenance(
      combine(init.provenance(), targets.provenance()));
  return result;
}

}  // namespace dpsynth
