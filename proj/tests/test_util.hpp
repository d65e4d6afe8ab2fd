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

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dpsynth/codebook.hpp"
#include "dpsynth/table.hpp"

namespace dpsynth::testing {

// Codebook with variables A, B, C, ... and categories a0, a1, ...
inline CodebookPtr make_codebook(const std::vector<std::size_t>& cards,
                                 CellIndex ceiling = kDefaultCellCeiling) {
  std::vector<Variable> vars(cards.size());
  for (std::size_t v = 0; v < cards.size(); ++v) {
    vars[v].name = std::string(1, static_cast<char>('A' + v));
    for (std::size_t c = 0; c < cards[v]; ++c)
      vars[v].categories.push_back(vars[v].name + std::to_string(c));
  }
  return std::make_shared<const Codebook>(vars, ceiling);
}

inline ContingencyTable make_counts(const std::vector<std::size_t>& cards,
                                    const std::vector<double>& values,
                                    std::vector<CellIndex> sz = {}) {
  ContingencyTable t(make_codebook(cards), TableMode::kCounts, std::move(sz));
  t.values() = values;
  return t;
}

inline Dataset make_dataset(const std::vector<std::size_t>& cards,
                            const std::vector<LevelTuple>& records) {
  Dataset d;
  d.codebook = make_codebook(cards);
  for (const auto& r : records) d.append_record(r);
  return d;
}

}  // namespace dpsynth::testing
