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

// Experiment orchestration: epsilon sweeps times replications over one
// dataset, aggregated into arm-level and replication-level reports plus
// plot data of ru as a percent of p1 against log10(epsilon).
//
// Random streams are keyed by (method, epsilon, replication), never by
// execution order, so adding or removing an arm leaves every other arm's
// numbers untouched, and rerunning a plan reproduces its output byte for
// byte.
//
// The worst three-way margin is chosen once, from the non-DP arm of the
// margin method, and that margin identity is held fixed across all arms so
// the damage done by noise can be separated from the damage done by an
// incompatible generative model.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dpsynth/csv.hpp"
#include "dpsynth/errors.hpp"
#include "dpsynth/metrics.hpp"
#include "dpsynth/synth.hpp"

namespace dpsynth {

struct ExperimentPlan {
  std::string dataset_path;
  std::optional<std::string> codebook_path;
  std::optional<std::string> structural_zeros_path;
  std::vector<SynthMethod> methods = {SynthMethod::kIpf};
  std::vector<double> epsilon_grid = {0.01, 0.1, 0.5, 1.0, 2.0, 10.0};
  bool include_non_dp = true;
  int replications = 10;
  std::uint64_t seed = 1;
  std::optional<std::string> stratify_by;
  double nprior = 1.0;
  double clamp_floor = 0.0;
  std::string margins = "two-way";  // two-way | order:<r> | file:<path>
  double ipf_tol = 1e-8;
  int ipf_max_iter = 5000;
  SampleSizeMode sample_size = SampleSizeMode::kFixedN;
  int bin_classes = 5;
  std::string dataset_label;  // defaults to the dataset file stem
  bool emit_svg = true;

  void validate() const {
    if (dataset_path.empty()) throw DataError("plan: dataset is required");
    if (methods.empty()) throw DataError("plan: at least one method");
    for (double e : epsilon_grid)
      if (!(e > 0)) throw DataError("plan: epsilon grid values must be > 0");
    if (replications < 1) throw DataError("plan: replications must be >= 1");
    if (epsilon_grid.empty() && !include_non_dp)
      throw DataError("plan: no arms to run");
  }
};

// Resolves a margins field ("two-way", "order:<r>", "file:<path>") against
// a codebook. Margin files list one margin per line as comma-separated
// variable names.
inline MarginSelection resolve_margin_selection(const std::string& text,
                                                const Codebook& codebook) {
  MarginSelection selection;
  if (text.empty() || text == "two-way") {
    selection.kind = MarginSelection::Kind::kAllTwoWay;
    return selection;
  }
  if (text.rfind("order:", 0) == 0) {
    selection.kind = MarginSelection::Kind::kAllOrderR;
    try {
      selection.order = std::stoul(text.substr(6));
    } catch (const std::exception&) {
      throw DataError("margins: bad order in '" + text + "'");
    }
    return selection;
  }
  if (text.rfind("file:", 0) == 0) {
    selection.kind = MarginSelection::Kind::kExplicit;
    auto lines = detail::read_lines(text.substr(5));
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::string line = detail::trim(lines[i]);
      if (line.empty() || line[0] == '#') continue;
      MarginSpec spec;
      for (const std::string& name : detail::split(line, ',')) {
        auto v = codebook.find_variable(name);
        if (!v)
          throw DataError("margins file line " + std::to_string(i + 1) +
                          ": unknown variable '" + name + "'");
        spec.variable_indices.push_back(*v);
      }
      std::sort(spec.variable_indices.begin(), spec.variable_indices.end());
      spec.validate(codebook);
      selection.explicit_specs.push_back(std::move(spec));
    }
    if (selection.explicit_specs.empty())
      throw DataError("margins file is empty");
    return selection;
  }
  throw DataError("margins: expected 'two-way', 'order:<r>' or 'file:<path>',"
                  " got '" + text + "'");
}

inline ExperimentPlan parse_plan_text(const std::string& text) {
  ExperimentPlan plan;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto parse_bool = [&](const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw DataError("plan line " + std::to_string(line_no) +
                    ": expected true/false, got '" + v + "'");
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw DataError("plan line " + std::to_string(line_no) +
                      ": expected 'key = value'");
    std::string key = detail::trim(trimmed.substr(0, eq));
    std::string value = detail::trim(trimmed.substr(eq + 1));
    try {
      if (key == "dataset") plan.dataset_path = value;
      else if (key == "codebook") plan.codebook_path = value;
      else if (key == "structural_zeros") plan.structural_zeros_path = value;
      else if (key == "methods") {
        plan.methods.clear();
        for (const auto& m : detail::split(value, ',')) {
          if (m == "catall") plan.methods.push_back(SynthMethod::kCatall);
          else if (m == "ipf") plan.methods.push_back(SynthMethod::kIpf);
          else throw DataError("unknown method '" + m + "'");
        }
      } else if (key == "epsilons") {
        plan.epsilon_grid.clear();
        if (!value.empty())
          for (const auto& e : detail::split(value, ','))
            plan.epsilon_grid.push_back(std::stod(e));
      } else if (key == "include_non_dp") {
        plan.include_non_dp = parse_bool(value);
      } else if (key == "replications") {
        plan.replications = std::stoi(value);
      } else if (key == "seed") {
        plan.seed = std::stoull(value);
      } else if (key == "stratify_by") {
        plan.stratify_by = value;
      } else if (key == "nprior") {
        plan.nprior = std::stod(value);
      } else if (key == "clamp_floor") {
        plan.clamp_floor = std::stod(value);
      } else if (key == "margins") {
        plan.margins = value;
      } else if (key == "ipf_tol") {
        plan.ipf_tol = std::stod(value);
      } else if (key == "ipf_max_iter") {
        plan.ipf_max_iter = std::stoi(value);
      } else if (key == "sample_size") {
        if (value == "fixed") plan.sample_size = SampleSizeMode::kFixedN;
        else if (value == "poisson")
          plan.sample_size = SampleSizeMode::kPoissonN;
        else throw DataError("sample_size must be fixed or poisson");
      } else if (key == "bin_classes") {
        plan.bin_classes = std::stoi(value);
      } else if (key == "dataset_label") {
        plan.dataset_label = value;
      } else if (key == "emit_svg") {
        plan.emit_svg = parse_bool(value);
      } else {
        throw DataError("unknown key '" + key + "'");
      }
    } catch (const DataError&) {
      throw;
    } catch (const std::exception&) {
      throw DataError("plan line " + std::to_string(line_no) +
                      ": bad value '" + value + "' for key '" + key + "'");
    }
  }
  plan.validate();
  if (plan.dataset_label.empty())
    plan.dataset_label =
        std::filesystem::path(plan.dataset_path).stem().string();
  return plan;
}

inline ExperimentPlan load_plan(const std::string& path) {
  auto lines = detail::read_lines(path);
  std::string text;
  for (const auto& l : lines) {
    text += l;
    text += '\n';
  }
  return parse_plan_text(text);
}

struct ReplicationOutcome {
  SynthMethod method = SynthMethod::kCatall;
  std::optional<double> epsilon;
  int replication = 0;
  bool failed = false;
  std::string note;
  double p0 = 0, p1 = 0, ru = 0;
  std::optional<double> ru_pct_of_p1;
  double two_way_u = 0;
  std::optional<double> three_way_u;
  std::optional<double> worst_three_way_u;  // at the fixed margin
  bool ipf_converged = true;
  int ipf_iterations = 0;
};

struct ArmSummary {
  SynthMethod method = SynthMethod::kCatall;
  std::optional<double> epsilon;
  int replications = 0;
  int completed = 0;
  int ipf_nonconverged = 0;
  double p0 = 0, p1 = 0;
  std::optional<double> mean_ru;
  std::optional<double> mean_ru_pct_of_p1;
  std::optional<double> mean_two_way_u;
  std::optional<double> mean_three_way_u;
  std::optional<double> mean_worst_three_way_u;
};

struct AggregateReport {
  std::string dataset_label;
  std::uint64_t n_records = 0;
  CellIndex n_cells = 0;
  std::string worst_three_way_margin;  // fixed margin identity, "" if none
  std::vector<ArmSummary> arms;
  std::vector<ReplicationOutcome> replication_log;
  bool emit_svg = true;
};

namespace detail {

struct ArmDef {
  SynthMethod method;
  std::optional<double> epsilon;
};

inline std::uint64_t arm_stream_key(const ArmDef& arm) {
  std::uint64_t eps_bits =
      arm.epsilon ? std::bit_cast<std::uint64_t>(*arm.epsilon)
                  : 0xFFFFFFFFFFFFFFFFULL;
  std::uint64_t method_tag =
      arm.method == SynthMethod::kCatall ? 0x6361746111ULL : 0x69706622ULL;
  return mix64(eps_bits ^ mix64(method_tag));
}

inline double mean_of(const std::vector<double>& xs) {
  return stable_sum(xs) / static_cast<double>(xs.size());
}

}  // namespace detail

inline AggregateReport run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  LoadOptions load_options;
  load_options.bin_classes = plan.bin_classes;
  if (plan.codebook_path)
    load_options.codebook = std::make_shared<const Codebook>(
        load_codebook_file(*plan.codebook_path));
  LoadedCsv loaded = load_csv(plan.dataset_path, load_options);
  const Dataset& data = loaded.data;
  const Codebook& codebook = *data.codebook;

  std::optional<std::size_t> stratum_var;
  if (plan.stratify_by) {
    stratum_var = codebook.find_variable(*plan.stratify_by);
    if (!stratum_var)
      throw DataError("stratify_by: unknown variable '" + *plan.stratify_by +
                      "'");
  }

  // Structural zeros: tuples over all variables, or over the remaining
  // variables when stratifying.
  std::vector<LevelTuple> sz_tuples;
  std::vector<CellIndex> sz_cells;
  CodebookPtr synth_codebook = data.codebook;
  if (stratum_var) {
    std::vector<Variable> rest;
    for (std::size_t v = 0; v < codebook.n_variables(); ++v)
      if (v != *stratum_var) rest.push_back(codebook.variable(v));
    synth_codebook =
        std::make_shared<const Codebook>(rest, codebook.cell_ceiling());
  }
  if (plan.structural_zeros_path) {
    sz_tuples =
        load_structural_zeros(*plan.structural_zeros_path, *synth_codebook);
    if (!stratum_var) sz_cells = encode_cells(codebook, sz_tuples);
  }

  ContingencyTable orig = build_table(data);
  const auto n_records = static_cast<std::uint64_t>(orig.total());
  const bool have_three_way = codebook.n_variables() >= 3;

  SynthesisConfig base_config;
  base_config.nprior = plan.nprior;
  base_config.clamp_floor = plan.clamp_floor;
  base_config.margins = resolve_margin_selection(plan.margins, *synth_codebook);
  base_config.ipf_tol = plan.ipf_tol;
  base_config.ipf_max_iter = plan.ipf_max_iter;
  base_config.sample_size = plan.sample_size;
  base_config.seed = plan.seed;
  base_config.replications = plan.replications;

  std::vector<detail::ArmDef> arms;
  for (SynthMethod method : plan.methods) {
    if (plan.include_non_dp) arms.push_back({method, std::nullopt});
    for (double e : plan.epsilon_grid) arms.push_back({method, e});
  }

  ContingencyTable synth_for_table(data.codebook, TableMode::kCounts);
  RngStream base(plan.seed, 0);

  struct RepDetail {
    ReplicationOutcome outcome;
    std::vector<double> three_way_us;  // per margin, all_margins order
  };
  std::vector<std::vector<RepDetail>> details(arms.size());

  for (std::size_t a = 0; a < arms.size(); ++a) {
    const auto& arm = arms[a];
    SynthesisConfig config = base_config;
    config.method = arm.method;
    config.epsilon = arm.epsilon;
    RngStream arm_stream = base.substream(detail::arm_stream_key(arm));
    for (int rep = 0; rep < plan.replications; ++rep) {
      RepDetail det;
      det.outcome.method = arm.method;
      det.outcome.epsilon = arm.epsilon;
      det.outcome.replication = rep + 1;
      RngStream rep_stream =
          arm_stream.substream(static_cast<std::uint64_t>(rep));
      try {
        SynthDataset synth;
        if (stratum_var) {
          synth = stratified_synth(data, *stratum_var, config, rep_stream,
                                   sz_tuples)
                      .synthetic;
        } else {
          ContingencyTable table =
              sz_cells.empty() ? orig : build_table(data, sz_cells);
          synth = synthesize(table, config, rep_stream);
        }
        ContingencyTable synth_table = build_table(synth.data);
        DisclosureReport d = disclosure(orig, synth_table);
        det.outcome.p0 = d.p0;
        det.outcome.p1 = d.p1;
        det.outcome.ru = d.ru;
        det.outcome.ru_pct_of_p1 = d.ru_pct_of_p1;
        det.outcome.two_way_u = utility_summary(orig, synth_table, 2).mean_u;
        if (have_three_way) {
          UtilityReport three = utility_summary(orig, synth_table, 3);
          det.outcome.three_way_u = three.mean_u;
          for (const auto& mu : three.per_margin)
            det.three_way_us.push_back(mu.u);
        }
        det.outcome.ipf_converged = synth.provenance.ipf_converged;
        det.outcome.ipf_iterations = synth.provenance.ipf_iterations;
      } catch (const DegenerateTableError& e) {
        det.outcome.failed = true;
        det.outcome.note = e.what();
      }
      details[a].push_back(std::move(det));
    }
  }

  // Fix the worst three-way margin from the selection arm: the non-DP arm
  // of the margin method when present, otherwise the weakest-noise arm.
  AggregateReport report;
  report.dataset_label = plan.dataset_label;
  report.n_records = n_records;
  report.n_cells = codebook.n_cells();
  report.emit_svg = plan.emit_svg;
  std::size_t fixed_margin_index = 0;
  bool have_fixed_margin = false;
  if (have_three_way) {
    std::size_t best_arm = 0;
    bool found = false;
    auto prefer = [&](SynthMethod m) {
      for (std::size_t a = 0; a < arms.size() && !found; ++a)
        if (arms[a].method == m && !arms[a].epsilon) {
          best_arm = a;
          found = true;
        }
    };
    prefer(SynthMethod::kIpf);
    if (!found) prefer(SynthMethod::kCatall);
    if (!found) {
      double best_eps = -1;
      for (std::size_t a = 0; a < arms.size(); ++a) {
        bool right_method = arms[a].method == SynthMethod::kIpf ||
                            std::none_of(arms.begin(), arms.end(),
                                         [](const detail::ArmDef& d) {
                                           return d.method == SynthMethod::kIpf;
                                         });
        if (right_method && arms[a].epsilon && *arms[a].epsilon > best_eps) {
          best_eps = *arms[a].epsilon;
          best_arm = a;
          found = true;
        }
      }
    }
    if (found) {
      std::vector<double> margin_sums;
      int used = 0;
      for (const auto& det : details[best_arm]) {
        if (det.outcome.failed) continue;
        if (margin_sums.empty()) margin_sums.assign(det.three_way_us.size(), 0);
        for (std::size_t m = 0; m < det.three_way_us.size(); ++m)
          margin_sums[m] += det.three_way_us[m];
        ++used;
      }
      if (used > 0 && !margin_sums.empty()) {
        fixed_margin_index = static_cast<std::size_t>(
            std::max_element(margin_sums.begin(), margin_sums.end()) -
            margin_sums.begin());
        have_fixed_margin = true;
        report.worst_three_way_margin =
            all_margins(codebook, 3)[fixed_margin_index].label(codebook);
      }
    }
  }

  for (std::size_t a = 0; a < arms.size(); ++a) {
    ArmSummary summary;
    summary.method = arms[a].method;
    summary.epsilon = arms[a].epsilon;
    summary.replications = plan.replications;
    std::vector<double> ru, rup, u2, u3, uw;
    for (auto& det : details[a]) {
      if (have_fixed_margin && !det.outcome.failed)
        det.outcome.worst_three_way_u = det.three_way_us[fixed_margin_index];
      report.replication_log.push_back(det.outcome);
      if (det.outcome.failed) continue;
      ++summary.completed;
      if (!det.outcome.ipf_converged) ++summary.ipf_nonconverged;
      summary.p0 = det.outcome.p0;
      summary.p1 = det.outcome.p1;
      ru.push_back(det.outcome.ru);
      if (det.outcome.ru_pct_of_p1) rup.push_back(*det.outcome.ru_pct_of_p1);
      u2.push_back(det.outcome.two_way_u);
      if (det.outcome.three_way_u) u3.push_back(*det.outcome.three_way_u);
      if (det.outcome.worst_three_way_u)
        uw.push_back(*det.outcome.worst_three_way_u);
    }
    if (!ru.empty()) summary.mean_ru = detail::mean_of(ru);
    if (!rup.empty()) summary.mean_ru_pct_of_p1 = detail::mean_of(rup);
    if (!u2.empty()) summary.mean_two_way_u = detail::mean_of(u2);
    if (!u3.empty()) summary.mean_three_way_u = detail::mean_of(u3);
    if (!uw.empty()) summary.mean_worst_three_way_u = detail::mean_of(uw);
    report.arms.push_back(std::move(summary));
  }
  return report;
}

namespace detail {

inline std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

inline std::string fmt_opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

inline void write_figure_svg(const std::string& path,
                             const std::string& title,
                             const std::vector<std::pair<double, double>>& pts) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  const double w = 640, h = 420, ml = 60, mr = 20, mt = 40, mb = 50;
  double xmin = -2.2, xmax = 3.2, ymax = 10;
  for (const auto& [x, y] : pts) {
    xmin = std::min(xmin, x - 0.2);
    xmax = std::max(xmax, x + 0.2);
    ymax = std::max(ymax, y * 1.1);
  }
  auto sx = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  auto sy = [&](double y) { return h - mb - y / ymax * (h - mt - mb); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" "
         "font-size=\"14\">"
      << title << "</text>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">log10(epsilon)  "
         "(non-DP at 3)</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 "
         "16 "
      << (mt + h - mb) / 2 << ")\">ru as % of p1</text>\n";
  if (!pts.empty()) {
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" "
           "points=\"";
    for (const auto& [x, y] : pts) out << sx(x) << ',' << sy(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : pts) {
      out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y)
          << "\" r=\"3.5\" fill=\"steelblue\"/>\n";
      out << "<text x=\"" << sx(x) << "\" y=\"" << h - mb + 16
          << "\" text-anchor=\"middle\" font-size=\"10\">" << format_double(x)
          << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace detail

inline void emit_reports(const AggregateReport& report,
                         const std::string& outdir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw DataError("cannot create output directory '" + outdir + "'");

  {
    std::ofstream out(fs::path(outdir) / "arms.csv");
    if (!out) throw DataError("cannot write arms.csv in '" + outdir + "'");
    out << "dataset,method,epsilon,replications,completed,ipf_nonconverged,"
           "p0,p1,ru,ru_pct_of_p1,two_way_utility,three_way_utility,"
           "worst_three_way_utility,worst_three_way_margin\n";
    for (const auto& arm : report.arms) {
      out << report.dataset_label << ',' << to_string(arm.method) << ','
          << (arm.epsilon ? detail::format_double(*arm.epsilon)
                          : std::string("non-dp"))
          << ',' << arm.replications << ',' << arm.completed << ','
          << arm.ipf_nonconverged << ',' << detail::format_double(arm.p0)
          << ',' << detail::format_double(arm.p1) << ','
          << detail::fmt_opt(arm.mean_ru) << ','
          << detail::fmt_opt(arm.mean_ru_pct_of_p1) << ','
          << detail::fmt_opt(arm.mean_two_way_u) << ','
          << detail::fmt_opt(arm.mean_three_way_u) << ','
          << detail::fmt_opt(arm.mean_worst_three_way_u) << ','
          << report.worst_three_way_margin << '\n';
    }
    if (!out) throw DataError("failed writing arms.csv");
  }

  {
    std::ofstream out(fs::path(outdir) / "replications.csv");
    if (!out)
      throw DataError("cannot write replications.csv in '" + outdir + "'");
    out << "dataset,method,epsilon,replication,status,ru,ru_pct_of_p1,"
           "two_way_utility,three_way_utility,worst_three_way_utility,"
           "ipf_converged,ipf_iterations,note\n";
    for (const auto& rep : report.replication_log) {
      out << report.dataset_label << ',' << to_string(rep.method) << ','
          << (rep.epsilon ? detail::format_double(*rep.epsilon)
                          : std::string("non-dp"))
          << ',' << rep.replication << ','
          << (rep.failed ? "degenerate" : "ok") << ',';
      if (!rep.failed) {
        out << detail::format_double(rep.ru) << ','
            << detail::fmt_opt(rep.ru_pct_of_p1) << ','
            << detail::format_double(rep.two_way_u) << ','
            << detail::fmt_opt(rep.three_way_u) << ','
            << detail::fmt_opt(rep.worst_three_way_u) << ','
            << (rep.ipf_converged ? "true" : "false") << ','
            << rep.ipf_iterations << ',';
      } else {
        out << ",,,,,,,";
      }
      out << detail::csv_safe(rep.note) << '\n';
    }
    if (!out) throw DataError("failed writing replications.csv");
  }

  // Figure data per method: ru as a % of p1 against log10(epsilon), DP
  // arms in increasing epsilon, the non-DP arm last at abscissa 3 (the
  // fixed plotting convention; note that an "equivalent" epsilon of 100
  // would sit at log10(100) = 2).
  std::vector<SynthMethod> methods;
  for (const auto& arm : report.arms)
    if (std::find(methods.begin(), methods.end(), arm.method) == methods.end())
      methods.push_back(arm.method);
  for (SynthMethod method : methods) {
    std::vector<const ArmSummary*> dp_arms;
    const ArmSummary* non_dp = nullptr;
    for (const auto& arm : report.arms) {
      if (arm.method != method) continue;
      if (arm.epsilon) dp_arms.push_back(&arm);
      else non_dp = &arm;
    }
    std::sort(dp_arms.begin(), dp_arms.end(),
              [](const ArmSummary* a, const ArmSummary* b) {
                return *a->epsilon < *b->epsilon;
              });
    std::string stem = std::string("figure1_") + to_string(method);
    std::ofstream out(fs::path(outdir) / (stem + ".csv"));
    if (!out) throw DataError("cannot write figure data in '" + outdir + "'");
    out << "# non_dp_abscissa = 3\n";
    out << "dataset,log10_epsilon,ru_pct_of_p1\n";
    std::vector<std::pair<double, double>> pts;
    auto emit_row = [&](double x, const std::optional<double>& v) {
      out << report.dataset_label << ',' << detail::format_double(x) << ','
          << detail::fmt_opt(v) << '\n';
      if (v) pts.emplace_back(x, *v);
    };
    for (const ArmSummary* arm : dp_arms)
      emit_row(std::log10(*arm->epsilon), arm->mean_ru_pct_of_p1);
    if (non_dp) emit_row(3.0, non_dp->mean_ru_pct_of_p1);
    if (!out) throw DataError("failed writing figure data");
    if (report.emit_svg)
      detail::write_figure_svg(
          (fs::path(outdir) / (stem + ".svg")).string(),
          report.dataset_label + " (" + to_string(method) + ")", pts);
  }
}

}  // namespace dpsynth
