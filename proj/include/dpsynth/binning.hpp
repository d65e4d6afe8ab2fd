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

// Quantile grouping of numeric columns into categorical classes.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "dpsynth/codebook.hpp"
#include "dpsynth/errors.hpp"

namespace dpsynth {

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

struct BinnedColumn {
  std::vector<Level> assignments;     // bin index per input value
  std::vector<double> boundaries;     // strictly increasing cut points
  std::vector<std::string> labels;    // one label per bin
};

// Equal-count (quantile) bins. Values equal to a boundary fall in the
// lower bin. Duplicate cut points caused by heavy ties are merged, so the
// number of bins can be smaller than requested.
inline BinnedColumn bin_numeric(std::span<const double> values,
                                int classes = 5) {
  if (classes < 2) throw DataError("bin_numeric: need at least 2 classes");
  if (values.empty()) throw DataError("bin_numeric: empty column");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] != sorted[i - 1]) ++distinct;
  if (distinct < static_cast<std::size_t>(classes))
    throw DataError("bin_numeric: column has " + std::to_string(distinct) +
                    " distinct values, fewer than " +
                    std::to_string(classes) +
                    " classes; use fewer classes");

  BinnedColumn out;
  const std::size_t n = sorted.size();
  for (int j = 1; j < classes; ++j) {
    std::size_t pos = n * static_cast<std::size_t>(j) /
                      static_cast<std::size_t>(classes);
    double cut = sorted[pos == 0 ? 0 : pos - 1];
    // Duplicate cuts from ties are merged; a cut at the maximum would
    // leave an empty top bin, so it is skipped too.
    if ((out.boundaries.empty() || cut > out.boundaries.back()) &&
        cut < sorted.back())
      out.boundaries.push_back(cut);
  }
  if (out.boundaries.empty()) {
    // Mass piled up at the top; split just below the maximum.
    auto it = std::lower_bound(sorted.begin(), sorted.end(), sorted.back());
    out.boundaries.push_back(*std::prev(it));
  }

  const std::size_t n_bins = out.boundaries.size() + 1;
  out.labels.reserve(n_bins);
  out.labels.push_back("<=" + detail::format_double(out.boundaries[0]));
  for (std::size_t b = 1; b < out.boundaries.size(); ++b)
    out.labels.push_back("(" + detail::format_double(out.boundaries[b - 1]) +
                         ".." + detail::format_double(out.boundaries[b]) +
                         "]");
  out.labels.push_back(">" + detail::format_double(out.boundaries.back()));

  out.assignments.reserve(values.size());
  for (double v : values) {
    auto it =
        std::lower_bound(out.boundaries.begin(), out.boundaries.end(), v);
    out.assignments.push_back(
        static_cast<Level>(it - out.boundaries.begin()));
  }
  return out;
}

}  // namespace dpsynth
