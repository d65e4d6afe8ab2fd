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

// Codebook: the ordered list of categorical variables that defines a
// mixed-radix cell space. Cell indices are row-major (the last variable
// varies fastest), so encode/decode are exact inverses over [0, k).

#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dpsynth/errors.hpp"

namespace dpsynth {

using Level = std::uint32_t;
using CellIndex = std::uint64_t;
using LevelTuple = std::vector<Level>;

// Tables above this many cells are refused unless the caller raises the
// ceiling explicitly.
constexpr CellIndex kDefaultCellCeiling = 100'000'000;

struct Variable {
  std::string name;
  std::vector<std::string> categories;
};

class Codebook {
 public:
  explicit Codebook(std::vector<Variable> variables,
                    CellIndex cell_ceiling = kDefaultCellCeiling)
      : variables_(std::move(variables)), cell_ceiling_(cell_ceiling) {
    if (variables_.empty())
      throw DataError("codebook must define at least one variable");
    std::unordered_set<std::string> names;
    for (const auto& var : variables_) {
      if (!names.insert(var.name).second)
        throw DataError("duplicate variable name '" + var.name + "'");
      if (var.categories.size() < 2)
        throw DataError("variable '" + var.name +
                        "' has fewer than 2 categories");
      if (var.categories.size() >
          static_cast<std::size_t>(std::numeric_limits<Level>::max()))
        throw DataError("variable '" + var.name + "' has too many categories");
      std::unordered_set<std::string> labels;
      for (const auto& cat : var.categories) {
        if (!labels.insert(cat).second)
          throw DataError("variable '" + var.name +
                          "' has duplicate category '" + cat + "'");
      }
    }
    n_cells_ = 1;
    for (const auto& var : variables_) {
      CellIndex card = var.categories.size();
      if (n_cells_ > cell_ceiling_ / card)
        throw DataError(
            "cross-tabulation exceeds the cell ceiling of " +
            std::to_string(cell_ceiling_) +
            " cells; drop variables or raise the ceiling explicitly");
      n_cells_ *= card;
    }
    strides_.resize(variables_.size());
    CellIndex stride = 1;
    for (std::size_t v = variables_.size(); v-- > 0;) {
      strides_[v] = stride;
      stride *= variables_[v].categories.size();
    }
    label_index_.resize(variables_.size());
    for (std::size_t v = 0; v < variables_.size(); ++v) {
      for (Level l = 0; l < variables_[v].categories.size(); ++l)
        label_index_[v].emplace(variables_[v].categories[l], l);
    }
  }

  std::size_t n_variables() const { return variables_.size(); }
  const Variable& variable(std::size_t v) const { return variables_[v]; }
  const std::vector<Variable>& variables() const { return variables_; }
  std::size_t cardinality(std::size_t v) const {
    return variables_[v].categories.size();
  }
  CellIndex n_cells() const { return n_cells_; }
  CellIndex stride(std::size_t v) const { return strides_[v]; }
  CellIndex cell_ceiling() const { return cell_ceiling_; }

  // Row-major mixed-radix index of a level tuple.
  CellIndex encode(std::span<const Level> levels) const {
    if (levels.size() != variables_.size())
      throw DataError("record has " + std::to_string(levels.size()) +
                      " levels, codebook has " +
                      std::to_string(variables_.size()) + " variables");
    CellIndex index = 0;
    for (std::size_t v = 0; v < variables_.size(); ++v) {
      if (levels[v] >= variables_[v].categories.size())
        throw DataError("level " + std::to_string(levels[v]) +
                        " out of range for variable '" + variables_[v].name +
                        "'");
      index = index * variables_[v].categories.size() + levels[v];
    }
    return index;
  }

  void decode(CellIndex cell, std::span<Level> out) const {
    for (std::size_t v = variables_.size(); v-- > 0;) {
      CellIndex card = variables_[v].categories.size();
      out[v] = static_cast<Level>(cell % card);
      cell /= card;
    }
  }

  LevelTuple decode(CellIndex cell) const {
    LevelTuple levels(variables_.size());
    decode(cell, levels);
    return levels;
  }

  std::optional<std::size_t> find_variable(const std::string& name) const {
    for (std::size_t v = 0; v < variables_.size(); ++v)
      if (variables_[v].name == name) return v;
    return std::nullopt;
  }

  std::optional<Level> find_category(std::size_t v,
                                     const std::string& label) const {
    auto it = label_index_[v].find(label);
    if (it == label_index_[v].end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const Codebook& other) const {
    if (variables_.size() != other.variables_.size()) return false;
    for (std::size_t v = 0; v < variables_.size(); ++v) {
      if (variables_[v].name != other.variables_[v].name ||
          variables_[v].categories != other.variables_[v].categories)
        return false;
    }
    return true;
  }

 private:
  std::vector<Variable> variables_;
  CellIndex cell_ceiling_;
  CellIndex n_cells_ = 0;
  std::vector<CellIndex> strides_;
  std::vector<std::unordered_map<std::string, Level>> label_index_;
};

using CodebookPtr = std::shared_ptr<const Codebook>;

// Record-level categorical data: fixed-width rows of levels over one
// codebook, stored flat.
struct Dataset {
  CodebookPtr codebook;
  std::vector<Level> levels;

  std::size_t n_records() const {
    return codebook ? levels.size() / codebook->n_variables() : 0;
  }
  std::span<const Level> record(std::size_t i) const {
    std::size_t w = codebook->n_variables();
    return {levels.data() + i * w, w};
  }
  void append_record(std::span<const Level> rec) {
    levels.insert(levels.end(), rec.begin(), rec.end());
  }
};

}  // namespace dpsynth
