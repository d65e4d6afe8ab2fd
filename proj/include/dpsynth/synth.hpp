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

// End-to-end synthesis pipelines.
//
//   catall: add prior -> [Laplace at 1/eps] -> clamp+rescale ->
//           multinomial sample -> expand to records
//   ipf:    per margin: project -> prior -> [Laplace at M/eps] ->
//           clamp+rescale; then fit the joint by IPF and sample as above.
//
// Once noise has been added, every later stage sees only noisy objects;
// the provenance tag on the sampled table records this and is checked by
// the interface audit test.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpsynth/codebook.hpp"
#include "dpsynth/errors.hpp"
#include "dpsynth/ipf.hpp"
#include "dpsynth/noise.hpp"
#include "dpsynth/rng.hpp"
#include "dpsynth/table.hpp"

namespace dpsynth {

enum class SampleSizeMode { kFixedN, kPoissonN };

// Which margins the ipf method fits. Defaults to all two-way interactions.
struct MarginSelection {
  enum class Kind { kAllTwoWay, kAllOrderR, kExplicit };
  Kind kind = Kind::kAllTwoWay;
  std::size_t order = 2;
  std::vector<MarginSpec> explicit_specs;

  std::vector<MarginSpec> resolve(const Codebook& codebook) const {
    switch (kind) {
      case Kind::kAllTwoWay:
        return all_margins(codebook, 2);
      case Kind::kAllOrderR:
        return all_margins(codebook, order);
      case Kind::kExplicit:
        for (const auto& spec : explicit_specs) spec.validate(codebook);
        return explicit_specs;
    }
    throw DataError("unknown margin selection");
  }
};

struct SynthesisConfig {
  SynthMethod method = SynthMethod::kCatall;
  std::optional<double> epsilon;  // absent = non-DP
  double nprior = 1.0;
  MarginSelection margins;
  double clamp_floor = 0.0;
  double ipf_tol = 1e-8;
  int ipf_max_iter = 5000;
  SampleSizeMode sample_size = SampleSizeMode::kFixedN;
  std::uint64_t seed = 0;
  int replications = 10;

  bool is_dp() const { return epsilon.has_value(); }
};

struct SynthProvenance {
  SynthMethod method = SynthMethod::kCatall;
  std::optional<double> epsilon;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  Provenance table_provenance = Provenance::kOriginal;
  bool ipf_converged = true;
  int ipf_iterations = 0;
  double ipf_max_margin_discrepancy = 0.0;
  std::vector<std::string> warnings;
};

struct SynthDataset {
  Dataset data;
  SynthProvenance provenance;
};

namespace detail {

// Fixed substream slots so every random decision has its own stream and
// the pipeline stays deterministic regardless of execution order.
constexpr std::uint64_t kNoiseSub = 1;
constexpr std::uint64_t kSampleSizeSub = 2;
constexpr std::uint64_t kMultinomialSub = 3;
constexpr std::uint64_t kShuffleSub = 4;

inline std::uint64_t round_count(double total, const char* what) {
  if (total < 0 || std::abs(total - std::round(total)) > 1e-6)
    throw DataError(std::string(what) + ": expected integer counts");
  return static_cast<std::uint64_t>(std::llround(total));
}

}  // namespace detail

// Draws Multinomial(n, probs) counts by sequential conditional binomials
// over the cells: O(k + n) expected time, exact distribution. The counts
// always sum to exactly n.
inline ContingencyTable multinomial_sample(const ContingencyTable& probs,
                                           std::uint64_t n, RngStream& rng) {
  if (probs.mode() != TableMode::kProbabilities)
    throw DataError("multinomial_sample expects a probability table");
  const auto& p = probs.values();
  const CellIndex k = p.size();
  ContingencyTable out(probs.codebook_ptr(), TableMode::kCounts,
                       probs.structural_zero_cells());
  out.set_provenance(probs.provenance());
  // Backward suffix sums make the conditional probability of the last
  // positive cell exactly 1, so the remainder is always placed.
  std::vector<double> suffix(k + 1, 0.0);
  for (CellIndex i = k; i-- > 0;) suffix[i] = suffix[i + 1] + p[i];
  std::uint64_t remaining = n;
  for (CellIndex i = 0; i < k && remaining > 0; ++i) {
    if (!(suffix[i] > 0)) break;
    double q = p[i] / suffix[i];
    std::uint64_t c = rng.binomial(remaining, q > 1.0 ? 1.0 : q);
    out.values()[i] = static_cast<double>(c);
    remaining -= c;
  }
  return out;
}

// Expands integer cell counts into microdata rows, then applies a seeded
// uniform shuffle so record order carries no information about cell order.
inline Dataset expand_to_records(const ContingencyTable& counts,
                                 RngStream& rng) {
  if (counts.mode() != TableMode::kCounts)
    throw DataError("expand_to_records expects a counts table");
  const auto& v = counts.values();
  std::uint64_t total = 0;
  for (CellIndex i = 0; i < v.size(); ++i)
    total += detail::round_count(v[i], "expand_to_records");
  Dataset data;
  data.codebook = counts.codebook_ptr();
  const std::size_t width = counts.codebook().n_variables();
  data.levels.reserve(total * width);
  LevelTuple levels(width);
  for (CellIndex i = 0; i < v.size(); ++i) {
    auto c = static_cast<std::uint64_t>(std::llround(v[i]));
    if (c == 0) continue;
    counts.codebook().decode(i, levels);
    for (std::uint64_t r = 0; r < c; ++r) data.append_record(levels);
  }
  shuffle_rows(data.levels, width, rng);
  return data;
}

namespace detail {

inline std::uint64_t draw_sample_size(const ContingencyTable& data,
                                      const SynthesisConfig& config,
                                      const RngStream& stream) {
  std::uint64_t n = round_count(data.total(), "synthesis");
  if (config.sample_size == SampleSizeMode::kPoissonN) {
    RngStream rng = stream.substream(kSampleSizeSub);
    n = rng.poisson(static_cast<double>(n));
  }
  return n;
}

inline SynthDataset sample_and_expand(const ContingencyTable& probs,
                                      std::uint64_t n,
                                      const SynthesisConfig& config,
                                      const RngStream& stream) {
  RngStream sample_rng = stream.substream(kMultinomialSub);
  ContingencyTable counts = multinomial_sample(probs, n, sample_rng);
  RngStream shuffle_rng = stream.substream(kShuffleSub);
  Dataset records = expand_to_records(counts, shuffle_rng);
  SynthProvenance prov;
  prov.method = config.method;
  prov.epsilon = config.epsilon;
  prov.seed = stream.seed();
  prov.stream_id = stream.stream_id();
  prov.table_provenance = probs.provenance();
  return SynthDataset{std::move(records), std::move(prov)};
}

}  // namespace detail

// Saturated-model synthesis from the full cross-tabulation.
inline SynthDataset synth_catall(const ContingencyTable& data,
                                 const SynthesisConfig& config,
                                 const RngStream& stream) {
  if (data.mode() != TableMode::kCounts)
    throw DataError("synth_catall expects a counts table");
  ContingencyTable working = add_prior(data, config.nprior);
  if (config.is_dp()) {
    double scale = laplace_scale(SynthMethod::kCatall, *config.epsilon);
    RngStream noise_rng = stream.substream(detail::kNoiseSub);
    working = perturb(working, scale, noise_rng);
  }
  ContingencyTable probs = clamp_rescale(working, config.clamp_floor);
  std::uint64_t n = detail::draw_sample_size(data, config, stream);
  return detail::sample_and_expand(probs, n, config, stream);
}

// Margin-model synthesis: noisy margins reconciled by IPF, then sampled.
inline SynthDataset synth_ipf(const ContingencyTable& data,
                              const SynthesisConfig& config,
                              const RngStream& stream) {
  if (data.mode() != TableMode::kCounts)
    throw DataError("synth_ipf expects a counts table");
  std::vector<MarginSpec> specs = config.margins.resolve(data.codebook());
  if (specs.empty()) throw DataError("synth_ipf: empty margin set");
  std::vector<bool> covered(data.codebook().n_variables(), false);
  for (const auto& spec : specs)
    for (std::size_t v : spec.variable_indices) covered[v] = true;
  for (std::size_t v = 0; v < covered.size(); ++v)
    if (!covered[v])
      throw DataError("synth_ipf: margin set does not cover variable '" +
                      data.codebook().variable(v).name + "'");

  double scale = 0.0;
  if (config.is_dp())
    scale = laplace_scale(SynthMethod::kIpf, *config.epsilon,
                          margin_multiplicity(specs));
  RngStream noise_root = stream.substream(detail::kNoiseSub);

  IpfTargets targets;
  targets.margins.reserve(specs.size());
  for (std::size_t m = 0; m < specs.size(); ++m) {
    MarginTable margin = marginalize(data, specs[m]);
    margin = add_prior(margin, config.nprior);
    if (config.is_dp()) {
      RngStream margin_rng = noise_root.substream(m);
      margin = perturb(margin, scale, margin_rng);
    }
    try {
      margin = clamp_rescale(margin, config.clamp_floor);
    } catch (const DegenerateTableError&) {
      throw DegenerateTableError("degenerate noisy margin '" +
                                 specs[m].label(data.codebook()) +
                                 "': no mass left after clamping");
    }
    targets.margins.push_back(std::move(margin));
  }

  ContingencyTable init =
      default_init(data.codebook_ptr(), data.structural_zero_cells());
  IpfResult fit =
      ipf_fit(init, targets, config.ipf_tol, config.ipf_max_iter);

  std::uint64_t n = detail::draw_sample_size(data, config, stream);
  SynthDataset out = detail::sample_and_expand(fit.fitted, n, config, stream);
  out.provenance.ipf_converged = fit.converged;
  out.provenance.ipf_iterations = fit.iterations;
  out.provenance.ipf_max_margin_discrepancy = fit.max_margin_discrepancy;
  return out;
}

inline SynthDataset synthesize(const ContingencyTable& data,
                               const SynthesisConfig& config,
                               const RngStream& stream) {
  return config.method == SynthMethod::kCatall
             ? synth_catall(data, config, stream)
             : synth_ipf(data, config, stream);
}

struct StratifiedResult {
  SynthDataset synthetic;
  // Parallel composition over strata: each stratum is synthesized at the
  // configured epsilon, and one person appears in exactly one stratum, so
  // the overall budget is the maximum, i.e. the configured epsilon itself.
  std::optional<double> effective_epsilon;
};

// Synthesizes each level of the stratum variable independently and
// concatenates the results with the stratum label reattached. Structural
// zeros, when given, are level tuples over the remaining variables and
// apply identically within every stratum.
inline StratifiedResult stratified_synth(
    const Dataset& data, std::size_t stratum_var,
    const SynthesisConfig& config, const RngStream& stream,
    const std::vector<LevelTuple>& structural_zeros = {}) {
  const Codebook& codebook = *data.codebook;
  if (stratum_var >= codebook.n_variables())
    throw DataError("stratum variable index out of range");

  std::vector<Variable> rest;
  for (std::size_t v = 0; v < codebook.n_variables(); ++v)
    if (v != stratum_var) rest.push_back(codebook.variable(v));
  auto sub_codebook =
      std::make_shared<const Codebook>(rest, codebook.cell_ceiling());
  std::vector<CellIndex> sz_cells;
  for (const auto& tuple : structural_zeros)
    sz_cells.push_back(sub_codebook->encode(tuple));

  const std::size_t width = codebook.n_variables();
  const std::size_t n_strata = codebook.cardinality(stratum_var);
  std::vector<Dataset> strata(n_strata);
  for (auto& s : strata) s.codebook = sub_codebook;
  LevelTuple rest_levels(width - 1);
  for (std::size_t r = 0; r < data.n_records(); ++r) {
    auto rec = data.record(r);
    std::size_t out_pos = 0;
    for (std::size_t v = 0; v < width; ++v)
      if (v != stratum_var) rest_levels[out_pos++] = rec[v];
    strata[rec[stratum_var]].append_record(rest_levels);
  }

  SynthDataset combined;
  combined.data.codebook = data.codebook;
  combined.provenance.method = config.method;
  combined.provenance.epsilon = config.epsilon;
  combined.provenance.seed = stream.seed();
  combined.provenance.stream_id = stream.stream_id();
  LevelTuple full(width);
  for (std::size_t s = 0; s < n_strata; ++s) {
    if (strata[s].n_records() == 0) {
      combined.provenance.warnings.push_back(
          "stratum '" + codebook.variable(stratum_var).categories[s] +
          "' is empty; skipped");
      continue;
    }
    ContingencyTable table = build_table(strata[s], sz_cells);
    SynthDataset part = synthesize(table, config, stream.substream(s));
    for (std::size_t r = 0; r < part.data.n_records(); ++r) {
      auto rec = part.data.record(r);
      std::size_t in_pos = 0;
      for (std::size_t v = 0; v < width; ++v)
        full[v] = (v == stratum_var) ? static_cast<Level>(s) : rec[in_pos++];
      combined.data.append_record(full);
    }
    combined.provenance.table_provenance =
        combine(combined.provenance.table_provenance,
                part.provenance.table_provenance);
    combined.provenance.ipf_converged &= part.provenance.ipf_converged;
    combined.provenance.ipf_iterations = std::max(
        combined.provenance.ipf_iterations, part.provenance.ipf_iterations);
    combined.provenance.ipf_max_margin_discrepancy =
        std::max(combined.provenance.ipf_max_margin_discrepancy,
                 part.provenance.ipf_max_margin_discrepancy);
  }
  return StratifiedResult{std::move(combined), config.epsilon};
}

}  // namespace dpsynth
