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

// Dense contingency tables over a codebook's cell space, margins, and the
// projection machinery shared by the synthesis and metrics code.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpsynth/codebook.hpp"
#include "dpsynth/errors.hpp"

namespace dpsynth {

enum class TableMode { kCounts, kProbabilities };

// Tracks whether a table has passed through the noise step. Everything
// derived from a noisy object stays noisy; the synthesis pipelines assert
// this tag on sampler inputs so no DP run can silently re-touch exact data.
enum class Provenance { kOriginal, kNoisy };

inline Provenance combine(Provenance a, Provenance b) {
  return (a == Provenance::kNoisy || b == Provenance::kNoisy)
             ? Provenance::kNoisy
             : Provenance::kOriginal;
}

// Kahan-compensated sum; keeps totals accurate enough that unit-sum checks
// hold to 1e-12 even on large tables.
inline double stable_sum(std::span<const double> values) {
  double sum = 0.0, carry = 0.0;
  for (double v : values) {
    double y = v - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

namespace detail {

inline std::vector<std::uint8_t> mask_from_cells(
    CellIndex n_cells, std::span<const CellIndex> cells,
    const char* what) {
  if (cells.empty()) return {};
  std::vector<std::uint8_t> mask(n_cells, 0);
  for (CellIndex c : cells) {
    if (c >= n_cells)
      throw DataError(std::string(what) + ": cell index " +
                      std::to_string(c) + " out of range");
    mask[c] = 1;
  }
  return mask;
}

}  // namespace detail

class ContingencyTable {
 public:
  ContingencyTable(CodebookPtr codebook, TableMode mode,
                   std::vector<CellIndex> structural_zeros = {})
      : codebook_(std::move(codebook)), mode_(mode) {
    if (!codebook_) throw DataError("table requires a codebook");
    values_.assign(codebook_->n_cells(), 0.0);
    sz_mask_ = detail::mask_from_cells(codebook_->n_cells(), structural_zeros,
                                       "structural zeros");
    for (std::uint8_t m : sz_mask_) n_sz_ += m;
  }

  const Codebook& codebook() const { return *codebook_; }
  const CodebookPtr& codebook_ptr() const { return codebook_; }
  CellIndex n_cells() const { return values_.size(); }

  TableMode mode() const { return mode_; }
  void set_mode(TableMode m) { mode_ = m; }
  Provenance provenance() const { return provenance_; }
  void set_provenance(Provenance p) { provenance_ = p; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool is_structural_zero(CellIndex i) const {
    return !sz_mask_.empty() && sz_mask_[i] != 0;
  }
  CellIndex n_structural_zeros() const { return n_sz_; }
  CellIndex n_free_cells() const { return n_cells() - n_sz_; }
  std::vector<CellIndex> structural_zero_cells() const {
    std::vector<CellIndex> cells;
    cells.reserve(n_sz_);
    for (CellIndex i = 0; i < sz_mask_.size(); ++i)
      if (sz_mask_[i]) cells.push_back(i);
    return cells;
  }

  double total() const { return stable_sum(values_); }

  // Invariant check for tables at rest (intermediate noisy vectors are
  // allowed to hold negatives until clamp_rescale).
  void check_valid(double unit_tol = 1e-9) const {
    for (CellIndex i = 0; i < values_.size(); ++i) {
      if (!(values_[i] >= 0.0))
        throw DataError("table cell " + std::to_string(i) + " is negative");
      if (is_structural_zero(i) && values_[i] != 0.0)
        throw DataError("structural-zero cell " + std::to_string(i) +
                        " is non-zero");
    }
    if (mode_ == TableMode::kProbabilities &&
        std::abs(total() - 1.0) > unit_tol)
      throw DataError("probability table does not sum to 1");
  }

 private:
  CodebookPtr codebook_;
  TableMode mode_;
  Provenance provenance_ = Provenance::kOriginal;
  std::vector<double> values_;
  std::vector<std::uint8_t> sz_mask_;
  CellIndex n_sz_ = 0;
};

// A subset of codebook variables, kept strictly increasing.
struct MarginSpec {
  std::vector<std::size_t> variable_indices;

  std::size_t order() const { return variable_indices.size(); }

  void validate(const Codebook& codebook) const {
    if (variable_indices.empty()) throw DataError("margin spec is empty");
    for (std::size_t i = 0; i < variable_indices.size(); ++i) {
      if (variable_indices[i] >= codebook.n_variables())
        throw DataError("margin spec references variable index " +
                        std::to_string(variable_indices[i]) +
                        " beyond the codebook");
      if (i > 0 && variable_indices[i] <= variable_indices[i - 1])
        throw DataError("margin spec indices must be strictly increasing");
    }
  }

  std::string label(const Codebook& codebook) const {
    std::string out;
    for (std::size_t i = 0; i < variable_indices.size(); ++i) {
      if (i > 0) out += '*';
      out += codebook.variable(variable_indices[i]).name;
    }
    return out;
  }

  bool operator==(const MarginSpec& other) const {
    return variable_indices == other.variable_indices;
  }
  bool operator<(const MarginSpec& other) const {
    return variable_indices < other.variable_indices;
  }
};

class MarginTable {
 public:
  MarginTable(CodebookPtr codebook, MarginSpec spec, TableMode mode)
      : codebook_(std::move(codebook)), spec_(std::move(spec)), mode_(mode) {
    if (!codebook_) throw DataError("margin table requires a codebook");
    spec_.validate(*codebook_);
    cards_.reserve(spec_.order());
    CellIndex cells = 1;
    for (std::size_t v : spec_.variable_indices) {
      cards_.push_back(codebook_->cardinality(v));
      cells *= codebook_->cardinality(v);
    }
    values_.assign(cells, 0.0);
  }

  const Codebook& codebook() const { return *codebook_; }
  const CodebookPtr& codebook_ptr() const { return codebook_; }
  const MarginSpec& spec() const { return spec_; }
  std::span<const std::size_t> cardinalities() const { return cards_; }
  CellIndex n_cells() const { return values_.size(); }

  TableMode mode() const { return mode_; }
  void set_mode(TableMode m) { mode_ = m; }
  Provenance provenance() const { return provenance_; }
  void set_provenance(Provenance p) { provenance_ = p; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool is_structural_zero(CellIndex i) const {
    return !sz_mask_.empty() && sz_mask_[i] != 0;
  }
  CellIndex n_structural_zeros() const { return n_sz_; }
  CellIndex n_free_cells() const { return n_cells() - n_sz_; }
  void set_structural_zero_mask(std::vector<std::uint8_t> mask) {
    if (!mask.empty() && mask.size() != values_.size())
      throw DataError("structural-zero mask size mismatch");
    sz_mask_ = std::move(mask);
    n_sz_ = 0;
    for (std::uint8_t m : sz_mask_) n_sz_ += m;
  }

  double total() const { return stable_sum(values_); }

 private:
  CodebookPtr codebook_;
  MarginSpec spec_;
  TableMode mode_;
  Provenance provenance_ = Provenance::kOriginal;
  std::vector<std::size_t> cards_;
  std::vector<double> values_;
  std::vector<std::uint8_t> sz_mask_;
  CellIndex n_sz_ = 0;
};

namespace detail {

// Per-variable (full-table stride, cardinality, margin stride) triples used
// to map a full cell index onto its margin cell index.
struct MarginProjection {
  struct Term {
    CellIndex stride;
    CellIndex card;
    CellIndex margin_stride;
  };
  std::vector<Term> terms;
  CellIndex margin_cells = 1;

  MarginProjection(const Codebook& codebook, const MarginSpec& spec) {
    spec.validate(codebook);
    terms.resize(spec.order());
    CellIndex mstride = 1;
    for (std::size_t i = spec.order(); i-- > 0;) {
      std::size_t v = spec.variable_indices[i];
      terms[i] = {codebook.stride(v), codebook.cardinality(v), mstride};
      mstride *= codebook.cardinality(v);
    }
    margin_cells = mstride;
  }

  CellIndex margin_index(CellIndex cell) const {
    CellIndex idx = 0;
    for (const Term& t : terms)
      idx += ((cell / t.stride) % t.card) * t.margin_stride;
    return idx;
  }
};

}  // namespace detail

// Tabulates records into exact cell counts. Records that land in a
// structural-zero cell are rejected.
inline ContingencyTable build_table(const Dataset& data,
                                    std::vector<CellIndex> structural_zeros = {}) {
  ContingencyTable table(data.codebook, TableMode::kCounts,
                         std::move(structural_zeros));
  for (std::size_t r = 0; r < data.n_records(); ++r) {
    CellIndex cell = data.codebook->encode(data.record(r));
    if (table.is_structural_zero(cell))
      throw DataError("record " + std::to_string(r + 1) +
                      " falls in a structural-zero cell");
    table.values()[cell] += 1.0;
  }
  return table;
}

// Projects a table onto a margin. Margin cells whose every contributing
// full-table cell is a structural zero inherit the structural-zero mark.
inline MarginTable marginalize(const ContingencyTable& table,
                               const MarginSpec& spec) {
  detail::MarginProjection proj(table.codebook(), spec);
  MarginTable margin(table.codebook_ptr(), spec, table.mode());
  margin.set_provenance(table.provenance());
  auto& out = margin.values();
  const auto& in = table.values();
  if (table.n_structural_zeros() == 0) {
    for (CellIndex i = 0; i < in.size(); ++i)
      out[proj.margin_index(i)] += in[i];
  } else {
    std::vector<CellIndex> free_cells(out.size(), 0);
    for (CellIndex i = 0; i < in.size(); ++i) {
      CellIndex j = proj.margin_index(i);
      out[j] += in[i];
      if (!table.is_structural_zero(i)) ++free_cells[j];
    }
    std::vector<std::uint8_t> mask(out.size(), 0);
    bool any = false;
    for (CellIndex j = 0; j < out.size(); ++j) {
      if (free_cells[j] == 0) {
        mask[j] = 1;
        any = true;
      }
    }
    if (any) margin.set_structural_zero_mask(std::move(mask));
  }
  return margin;
}

// Margin-of-margin projection; `sub` must select a subset of the parent's
// variables (indices refer to the original codebook).
inline MarginTable marginalize(const MarginTable& parent,
                               const MarginSpec& sub) {
  sub.validate(parent.codebook());
  std::vector<std::size_t> positions;
  for (std::size_t v : sub.variable_indices) {
    auto it = std::find(parent.spec().variable_indices.begin(),
                        parent.spec().variable_indices.end(), v);
    if (it == parent.spec().variable_indices.end())
      throw DataError("sub-margin variable not present in parent margin");
    positions.push_back(static_cast<std::size_t>(
        it - parent.spec().variable_indices.begin()));
  }
  MarginTable out(parent.codebook_ptr(), sub, parent.mode());
  out.set_provenance(parent.provenance());
  // Strides within the parent's own cell space.
  std::vector<CellIndex> parent_strides(parent.spec().order());
  CellIndex stride = 1;
  for (std::size_t i = parent.spec().order(); i-- > 0;) {
    parent_strides[i] = stride;
    stride *= parent.cardinalities()[i];
  }
  std::vector<CellIndex> out_strides(positions.size());
  CellIndex ostride = 1;
  for (std::size_t i = positions.size(); i-- > 0;) {
    out_strides[i] = ostride;
    ostride *= parent.cardinalities()[positions[i]];
  }
  std::vector<CellIndex> free_cells(out.n_cells(), 0);
  for (CellIndex c = 0; c < parent.n_cells(); ++c) {
    CellIndex j = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      std::size_t p = positions[i];
      j += ((c / parent_strides[p]) % parent.cardinalities()[p]) *
           out_strides[i];
    }
    out.values()[j] += parent.values()[c];
    if (!parent.is_structural_zero(c)) ++free_cells[j];
  }
  if (parent.n_structural_zeros() > 0) {
    std::vector<std::uint8_t> mask(out.n_cells(), 0);
    bool any = false;
    for (CellIndex j = 0; j < out.n_cells(); ++j)
      if (free_cells[j] == 0) mask[j] = 1, any = true;
    if (any) out.set_structural_zero_mask(std::move(mask));
  }
  return out;
}

// All C(v, order) margins of the given order, lexicographic.
inline std::vector<MarginSpec> all_margins(const Codebook& codebook,
                                           std::size_t order) {
  std::size_t v = codebook.n_variables();
  if (order < 1 || order > v)
    throw DataError("margin order " + std::to_string(order) +
                    " out of range for " + std::to_string(v) + " variables");
  std::vector<MarginSpec> specs;
  std::vector<std::size_t> combo(order);
  for (std::size_t i = 0; i < order; ++i) combo[i] = i;
  while (true) {
    specs.push_back(MarginSpec{combo});
    std::size_t i = order;
    while (i-- > 0) {
      if (combo[i] != i + v - order) break;
      if (i == 0) return specs;
    }
    ++combo[i];
    for (std::size_t j = i + 1; j < order; ++j) combo[j] = combo[j - 1] + 1;
  }
}

// Number of fitted margins any one record contributes a count to. Every
// record lands in exactly one cell of every fitted margin, so the maximum
// over cells of the number of margins touching that cell is simply the
// size of the margin set (for all-two-way on v variables this is C(v,2)).
inline std::size_t margin_multiplicity(std::span<const MarginSpec> margins) {
  return margins.size();
}

}  // namespace dpsynth
