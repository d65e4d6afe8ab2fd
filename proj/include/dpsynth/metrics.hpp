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

// Disclosure-risk and utility measures for synthetic categorical data.
//
// Disclosure: p1 is the percent of original records that are unique
// (singleton cells), p0 the percent of empty cells, ru the percent of
// records whose cell is a singleton in both the original and the synthetic
// table (replicated uniques). ru <= p1 by construction, and ru as a
// percent of p1 is the headline risk ratio.
//
// Utility: per margin m, pMSE_m = sum_j (y_j - s_j)^2 / ((y_j + s_j)/2)
// over cells with y_j + s_j > 0, standardized by the chi-square-style
// degrees of freedom (occupied cells - 1) so a correct generative model
// scores about 1.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dpsynth/errors.hpp"
#include "dpsynth/table.hpp"

namespace dpsynth {

struct DisclosureReport {
  double p1 = 0.0;  // % unique records in the original (per N)
  double p0 = 0.0;  // % empty cells in the cross-tabulation (per k)
  double ru = 0.0;  // % replicated uniques (per N)
  std::optional<double> ru_pct_of_p1;  // absent when p1 == 0
};

inline DisclosureReport disclosure(const ContingencyTable& orig,
                                   const ContingencyTable& synth) {
  if (!(orig.codebook() == synth.codebook()))
    throw DataError("disclosure: codebook mismatch");
  if (orig.mode() != TableMode::kCounts ||
      synth.mode() != TableMode::kCounts)
    throw DataError("disclosure: expects counts tables");
  const auto& y = orig.values();
  const auto& s = synth.values();
  std::uint64_t n_records = 0, unique = 0, empty = 0, replicated = 0;
  for (CellIndex i = 0; i < y.size(); ++i) {
    n_records += static_cast<std::uint64_t>(y[i]);
    if (y[i] == 0.0) ++empty;
    if (y[i] == 1.0) {
      ++unique;
      if (s[i] == 1.0) ++replicated;
    }
  }
  if (n_records == 0) throw DataError("disclosure: original table is empty");
  DisclosureReport report;
  report.p1 = 100.0 * static_cast<double>(unique) / n_records;
  report.p0 = 100.0 * static_cast<double>(empty) / y.size();
  report.ru = 100.0 * static_cast<double>(replicated) / n_records;
  if (report.p1 > 0)
    report.ru_pct_of_p1 = 100.0 * report.ru / report.p1;
  return report;
}

inline double margin_pmse(const MarginTable& y, const MarginTable& s) {
  if (!(y.spec() == s.spec()) || !(y.codebook() == s.codebook()))
    throw DataError("margin_pmse: margin spec mismatch");
  const auto& yv = y.values();
  const auto& sv = s.values();
  double sum = 0.0, carry = 0.0;
  for (CellIndex j = 0; j < yv.size(); ++j) {
    double denom = (yv[j] + sv[j]) / 2.0;
    if (!(denom > 0)) continue;
    double d = yv[j] - sv[j];
    double term = d * d / denom;
    double t = sum + (term - carry);
    carry = (t - sum) - (term - carry);
    sum = t;
  }
  return sum;
}

// Degrees of freedom for comparing two samples over a margin: cells with
// any data in either table, minus one. Empty cells carry no information.
inline long pmse_degrees_of_freedom(const MarginTable& y,
                                    const MarginTable& s) {
  if (!(y.spec() == s.spec()))
    throw DataError("degrees of freedom: margin spec mismatch");
  long occupied = 0;
  for (CellIndex j = 0; j < y.values().size(); ++j)
    if (y.values()[j] + s.values()[j] > 0) ++occupied;
  return occupied - 1;
}

inline double standardized_utility(double pmse, long df) {
  if (df < 1) throw DataError("standardized utility needs df >= 1");
  if (pmse < 0) throw DataError("pMSE cannot be negative");
  return pmse / static_cast<double>(df);
}

// Rule-of-thumb reading of a standardized utility value: below 10 the
// synthetic data agree well with the original, below 30 they are still
// generally usable, above that utility is poor.
inline const char* utility_grade(double u) {
  if (u < 10.0) return "useful";
  if (u < 30.0) return "usable";
  return "poor";
}

struct MarginUtility {
  MarginSpec spec;
  double pmse = 0.0;
  long df = 0;
  double u = 0.0;
};

struct UtilityReport {
  std::size_t order = 0;
  std::vector<MarginUtility> per_margin;
  double mean_u = 0.0;
  MarginUtility worst;
};

inline UtilityReport utility_summary(const ContingencyTable& orig,
                                     const ContingencyTable& synth,
                                     std::size_t order) {
  if (!(orig.codebook() == synth.codebook()))
    throw DataError("utility_summary: codebook mismatch");
  UtilityReport report;
  report.order = order;
  std::vector<double> us;
  for (const MarginSpec& spec : all_margins(orig.codebook(), order)) {
    MarginTable y = marginalize(orig, spec);
    MarginTable s = marginalize(synth, spec);
    MarginUtility mu;
    mu.spec = spec;
    mu.pmse = margin_pmse(y, s);
    mu.df = pmse_degrees_of_freedom(y, s);
    // pMSE of 0 means the margins agree exactly; a margin that occupies a
    // single cell (df 0) can only disagree under Poisson sample sizes, in
    // which case the statistic is reported against one degree of freedom.
    mu.u = mu.pmse == 0.0 ? 0.0
                          : mu.pmse / static_cast<double>(std::max(mu.df,
                                                                   1L));
    us.push_back(mu.u);
    report.per_margin.push_back(std::move(mu));
  }
  report.mean_u = stable_sum(us) / static_cast<double>(us.size());
  report.worst = *std::max_element(
      report.per_margin.begin(), report.per_margin.end(),
      [](const MarginUtility& a, const MarginUtility& b) { return a.u < b.u; });
  return report;
}

// Structured text serialization: one margin per row (spec, pMSE, df, U).
inline void write_utility_report(std::ostream& out, const Codebook& codebook,
                                 const UtilityReport& report) {
  out << "margin,pmse,df,U\n";
  for (const auto& mu : report.per_margin)
    out << mu.spec.label(codebook) << ',' << mu.pmse << ',' << mu.df << ','
        << mu.u << '\n';
  out << "mean_U," << report.mean_u << '\n';
  out << "worst_margin," << report.worst.spec.label(codebook) << ','
      << report.worst.u << '\n';
  out << "grade," << utility_grade(report.mean_u) << '\n';
}

}  // namespace dpsynth
