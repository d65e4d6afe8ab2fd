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

// Data ingestion: comma-delimited files with a header row, codebook files,
// and structural-zero lists.
//
// Missing values (empty fields or NA) become an explicit MISSING category,
// keeping the cell space total. Without a fixed codebook, categories are
// ordered by first appearance; numeric columns (every non-missing value
// parses as a number) with more distinct values than the class count are
// grouped into quantile classes.

#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "dpsynth/binning.hpp"
#include "dpsynth/codebook.hpp"
#include "dpsynth/errors.hpp"
#include "dpsynth/table.hpp"

namespace dpsynth {

inline constexpr const char* kMissingLabel = "MISSING";

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, delim)) out.push_back(trim(field));
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

inline bool parse_full_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + s.size();
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace detail

struct LoadOptions {
  CodebookPtr codebook;          // fixed codebook; disables inference
  int bin_classes = 5;           // classes for numeric grouping
  bool auto_bin_numeric = true;  // group numeric columns automatically
  CellIndex cell_ceiling = kDefaultCellCeiling;
};

struct ColumnBinning {
  std::string variable;
  std::vector<double> boundaries;
};

struct LoadedCsv {
  Dataset data;
  std::vector<ColumnBinning> binnings;
};

inline LoadedCsv load_csv(const std::string& path,
                          const LoadOptions& options = {}) {
  auto lines = detail::read_lines(path);
  if (lines.empty()) throw DataError("'" + path + "': empty file");
  auto header = detail::split(lines[0], ',');
  if (header.empty()) throw DataError("'" + path + "': empty header row");
  const std::size_t width = header.size();

  // Raw cells, with missing values already mapped to the MISSING label.
  std::vector<std::vector<std::string>> columns(width);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (detail::trim(lines[r]).empty()) continue;
    auto fields = detail::split(lines[r], ',');
    if (fields.size() != width)
      throw DataError("'" + path + "' row " + std::to_string(r + 1) +
                      ": has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(width));
    for (std::size_t c = 0; c < width; ++c) {
      const std::string& f = fields[c];
      columns[c].push_back(f.empty() || f == "NA" ? kMissingLabel : f);
    }
  }
  const std::size_t n_rows = columns[0].size();

  LoadedCsv out;
  if (options.codebook) {
    const Codebook& codebook = *options.codebook;
    if (codebook.n_variables() != width)
      throw DataError("'" + path + "': header has " + std::to_string(width) +
                      " columns, codebook has " +
                      std::to_string(codebook.n_variables()) + " variables");
    for (std::size_t c = 0; c < width; ++c)
      if (header[c] != codebook.variable(c).name)
        throw DataError("'" + path + "': column '" + header[c] +
                        "' does not match codebook variable '" +
                        codebook.variable(c).name + "'");
    out.data.codebook = options.codebook;
    out.data.levels.reserve(n_rows * width);
    for (std::size_t r = 0; r < n_rows; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        auto level = codebook.find_category(c, columns[c][r]);
        if (!level)
          throw DataError("'" + path + "' row " + std::to_string(r + 2) +
                          ": unknown category '" + columns[c][r] +
                          "' for variable '" + header[c] + "'");
        out.data.levels.push_back(*level);
      }
    }
    return out;
  }

  // Infer the codebook column by column.
  std::vector<Variable> variables(width);
  std::vector<std::vector<Level>> coded(width);
  for (std::size_t c = 0; c < width; ++c) {
    variables[c].name = header[c];
    const auto& col = columns[c];

    bool numeric = n_rows > 0;
    std::vector<double> numbers;
    numbers.reserve(col.size());
    for (const auto& cell : col) {
      if (cell == kMissingLabel) continue;
      double v;
      if (!detail::parse_full_double(cell, v)) {
        numeric = false;
        break;
      }
      numbers.push_back(v);
    }
    std::size_t distinct = 0;
    if (numeric && !numbers.empty()) {
      std::vector<double> uniq(numbers);
      std::sort(uniq.begin(), uniq.end());
      distinct = static_cast<std::size_t>(
          std::unique(uniq.begin(), uniq.end()) - uniq.begin());
    }

    if (options.auto_bin_numeric && numeric &&
        distinct > static_cast<std::size_t>(options.bin_classes)) {
      BinnedColumn binned = bin_numeric(numbers, options.bin_classes);
      variables[c].categories = binned.labels;
      bool has_missing = numbers.size() < col.size();
      Level missing_level = static_cast<Level>(binned.labels.size());
      if (has_missing) variables[c].categories.push_back(kMissingLabel);
      coded[c].reserve(col.size());
      std::size_t next = 0;
      for (const auto& cell : col)
        coded[c].push_back(cell == kMissingLabel
                               ? missing_level
                               : binned.assignments[next++]);
      out.binnings.push_back({header[c], binned.boundaries});
    } else {
      std::unordered_map<std::string, Level> index;
      coded[c].reserve(col.size());
      for (const auto& cell : col) {
        auto [it, inserted] =
            index.emplace(cell, static_cast<Level>(index.size()));
        if (inserted) variables[c].categories.push_back(cell);
        coded[c].push_back(it->second);
      }
    }
  }
  if (n_rows == 0)
    throw DataError("'" + path +
                    "': no data rows; a codebook file is required to define "
                    "the cell space");

  out.data.codebook =
      std::make_shared<const Codebook>(variables, options.cell_ceiling);
  out.data.levels.reserve(n_rows * width);
  for (std::size_t r = 0; r < n_rows; ++r)
    for (std::size_t c = 0; c < width; ++c)
      out.data.levels.push_back(coded[c][r]);
  return out;
}

// Codebook file: one variable per line, `name: cat1, cat2, ...`.
inline Codebook load_codebook_file(
    const std::string& path, CellIndex cell_ceiling = kDefaultCellCeiling) {
  auto lines = detail::read_lines(path);
  std::vector<Variable> variables;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = detail::trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    std::size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw DataError("'" + path + "' line " + std::to_string(i + 1) +
                      ": expected 'name: cat1, cat2, ...'");
    Variable var;
    var.name = detail::trim(line.substr(0, colon));
    var.categories = detail::split(line.substr(colon + 1), ',');
    variables.push_back(std::move(var));
  }
  return Codebook(variables, cell_ceiling);
}

// Structural-zero file: one level tuple per line, comma-separated category
// labels in codebook variable order.
inline std::vector<LevelTuple> load_structural_zeros(
    const std::string& path, const Codebook& codebook) {
  auto lines = detail::read_lines(path);
  std::vector<LevelTuple> tuples;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = detail::trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    auto labels = detail::split(line, ',');
    if (labels.size() != codebook.n_variables())
      throw DataError("'" + path + "' line " + std::to_string(i + 1) +
                      ": expected " + std::to_string(codebook.n_variables()) +
                      " labels");
    LevelTuple tuple(labels.size());
    for (std::size_t v = 0; v < labels.size(); ++v) {
      auto level = codebook.find_category(v, labels[v]);
      if (!level)
        throw DataError("'" + path + "' line " + std::to_string(i + 1) +
                        ": unknown category '" + labels[v] +
                        "' for variable '" + codebook.variable(v).name + "'");
      tuple[v] = *level;
    }
    tuples.push_back(std::move(tuple));
  }
  return tuples;
}

inline std::vector<CellIndex> encode_cells(
    const Codebook& codebook, const std::vector<LevelTuple>& tuples) {
  std::vector<CellIndex> cells;
  cells.reserve(tuples.size());
  for (const auto& tuple : tuples) cells.push_back(codebook.encode(tuple));
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

inline void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  const Codebook& codebook = *data.codebook;
  for (std::size_t v = 0; v < codebook.n_variables(); ++v) {
    if (v > 0) out << ',';
    out << codebook.variable(v).name;
  }
  out << '\n';
  for (std::size_t r = 0; r < data.n_records(); ++r) {
    auto rec = data.record(r);
    for (std::size_t v = 0; v < rec.size(); ++v) {
      if (v > 0) out << ',';
      out << codebook.variable(v).categories[rec[v]];
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing '" + path + "'");
}

}  // namespace dpsynth
