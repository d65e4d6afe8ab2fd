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

// Command-line front end.
//
//   dpsynth synth       synthesize one dataset
//   dpsynth experiment  run an epsilon sweep from a plan file
//   dpsynth metrics     disclosure and utility of a synthetic dataset
//   dpsynth generate    seeded benchmark data from a log-linear model
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 degenerate
// synthesis (epsilon too small for the table).

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dpsynth/dpsynth.hpp"

namespace {

using namespace dpsynth;

struct SynthArgs {
  std::string input;
  std::string codebook;
  std::string structural_zeros;
  std::string method = "catall";
  double epsilon = 0;
  bool has_epsilon = false;
  double nprior = 1.0;
  std::string margins = "two-way";
  double clamp_floor = 0.0;
  double ipf_tol = 1e-8;
  int ipf_max_iter = 5000;
  std::string sample_size = "fixed";
  std::string stratify_by;
  std::uint64_t seed = 1;
  int bin_classes = 5;
  bool no_bin = false;
  std::string out;
};

LoadedCsv load_input(const std::string& input, const std::string& codebook,
                     int bin_classes, bool no_bin) {
  LoadOptions options;
  options.bin_classes = bin_classes;
  options.auto_bin_numeric = !no_bin;
  if (!codebook.empty())
    options.codebook =
        std::make_shared<const Codebook>(load_codebook_file(codebook));
  return load_csv(input, options);
}

int run_synth(const SynthArgs& args) {
  LoadedCsv loaded =
      load_input(args.input, args.codebook, args.bin_classes, args.no_bin);
  const Dataset& data = loaded.data;

  SynthesisConfig config;
  config.method =
      args.method == "catall" ? SynthMethod::kCatall : SynthMethod::kIpf;
  if (args.has_epsilon) config.epsilon = args.epsilon;
  config.nprior = args.nprior;
  config.clamp_floor = args.clamp_floor;
  config.ipf_tol = args.ipf_tol;
  config.ipf_max_iter = args.ipf_max_iter;
  config.sample_size = args.sample_size == "poisson"
                           ? SampleSizeMode::kPoissonN
                           : SampleSizeMode::kFixedN;
  config.seed = args.seed;

  RngStream stream(args.seed, 0);
  SynthDataset result;
  std::optional<double> effective_epsilon = config.epsilon;
  if (!args.stratify_by.empty()) {
    auto var = data.codebook->find_variable(args.stratify_by);
    if (!var)
      throw DataError("unknown stratify variable '" + args.stratify_by + "'");
    std::vector<Variable> rest;
    for (std::size_t v = 0; v < data.codebook->n_variables(); ++v)
      if (v != *var) rest.push_back(data.codebook->variable(v));
    Codebook sub(rest, data.codebook->cell_ceiling());
    std::vector<LevelTuple> sz;
    if (!args.structural_zeros.empty())
      sz = load_structural_zeros(args.structural_zeros, sub);
    config.margins = resolve_margin_selection(args.margins, sub);
    StratifiedResult stratified =
        stratified_synth(data, *var, config, stream, sz);
    result = std::move(stratified.synthetic);
    effective_epsilon = stratified.effective_epsilon;
  } else {
    std::vector<CellIndex> sz_cells;
    if (!args.structural_zeros.empty())
      sz_cells = encode_cells(
          *data.codebook,
          load_structural_zeros(args.structural_zeros, *data.codebook));
    config.margins = resolve_margin_selection(args.margins, *data.codebook);
    ContingencyTable table = build_table(data, sz_cells);
    result = synthesize(table, config, stream);
  }

  write_csv(result.data, args.out);
  for (const auto& warning : result.provenance.warnings)
    std::cerr << "warning: " << warning << '\n';
  std::cout << "records=" << result.data.n_records() << '\n';
  std::cout << "method=" << to_string(config.method) << '\n';
  std::cout << "epsilon="
            << (effective_epsilon ? std::to_string(*effective_epsilon)
                                  : std::string("non-dp"))
            << '\n';
  if (config.method == SynthMethod::kIpf)
    std::cout << "ipf_converged="
              << (result.provenance.ipf_converged ? "true" : "false") << '\n'
              << "ipf_iterations=" << result.provenance.ipf_iterations << '\n';
  std::cout << "out=" << args.out << '\n';
  return 0;
}

int run_metrics(const std::string& original, const std::string& synthetic,
                std::size_t order, const std::string& codebook,
                int bin_classes, bool no_bin) {
  LoadedCsv orig = load_input(original, codebook, bin_classes, no_bin);
  LoadOptions synth_options;
  synth_options.codebook = orig.data.codebook;
  LoadedCsv synth = load_csv(synthetic, synth_options);

  ContingencyTable orig_table = build_table(orig.data);
  ContingencyTable synth_table = build_table(synth.data);
  DisclosureReport d = disclosure(orig_table, synth_table);
  std::cout << "n_original=" << orig.data.n_records() << '\n'
            << "n_synthetic=" << synth.data.n_records() << '\n'
            << "cells=" << orig.data.codebook->n_cells() << '\n'
            << "p1=" << d.p1 << '\n'
            << "p0=" << d.p0 << '\n'
            << "ru=" << d.ru << '\n'
            << "ru_pct_of_p1="
            << (d.ru_pct_of_p1 ? std::to_string(*d.ru_pct_of_p1)
                               : std::string("NA"))
            << '\n';
  UtilityReport u = utility_summary(orig_table, synth_table, order);
  write_utility_report(std::cout, *orig.data.codebook, u);
  return 0;
}

int run_experiment_cmd(const std::string& plan_path, const std::string& out) {
  ExperimentPlan plan = load_plan(plan_path);
  AggregateReport report = run_experiment(plan);
  emit_reports(report, out);
  std::cout << "dataset=" << report.dataset_label << '\n'
            << "arms=" << report.arms.size() << '\n'
            << "out=" << out << '\n';
  return 0;
}

struct GenerateArgs {
  std::string cards;
  std::uint64_t n = 5000;
  std::uint64_t seed = 0;
  double main_sd = 0.5;
  double two_way_sd = 0.0;
  double three_way_sd = 0.0;
  std::string planted_vars;
  double planted_log_or = 0.0;
  std::string out;
  std::string params;
};

int run_generate(const GenerateArgs& args) {
  BenchmarkSpec spec;
  for (const auto& c : detail::split(args.cards, ','))
    spec.cardinalities.push_back(std::stoul(c));
  spec.n_records = args.n;
  spec.seed = args.seed;
  spec.main_effect_sd = args.main_sd;
  spec.two_way_sd = args.two_way_sd;
  spec.three_way_sd = args.three_way_sd;
  if (!args.planted_vars.empty()) {
    auto parts = detail::split(args.planted_vars, ',');
    if (parts.size() != 3)
      throw DataError("--planted-vars needs exactly 3 variable indices");
    PlantedThreeWay planted;
    for (int i = 0; i < 3; ++i)
      planted.variables[i] = std::stoul(parts[i]);
    planted.log_or_shift = args.planted_log_or;
    spec.planted_three_way = planted;
  }
  BenchmarkData bench = generate_benchmark_data(spec);
  std::string params_path =
      args.params.empty() ? args.out + ".params.json" : args.params;
  write_benchmark_files(bench, args.out, params_path);
  std::cout << "records=" << bench.data.n_records() << '\n'
            << "cells=" << bench.data.codebook->n_cells() << '\n'
            << "out=" << args.out << '\n'
            << "params=" << params_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentially private synthesis of categorical microdata"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "synthesize one dataset");
  synth_cmd->add_option("--input", synth_args.input, "input CSV")->required();
  synth_cmd->add_option("--codebook", synth_args.codebook, "codebook file");
  synth_cmd->add_option("--structural-zeros", synth_args.structural_zeros,
                        "structural-zero file");
  synth_cmd->add_option("--method", synth_args.method, "catall or ipf")
      ->check(CLI::IsMember({"catall", "ipf"}));
  auto* eps_opt = synth_cmd->add_option("--epsilon", synth_args.epsilon,
                                        "privacy budget; omit for non-DP");
  synth_cmd->add_option("--nprior", synth_args.nprior, "total prior count");
  synth_cmd->add_option("--margins", synth_args.margins,
                        "two-way | order:<r> | file:<path>");
  synth_cmd->add_option("--clamp-floor", synth_args.clamp_floor,
                        "replacement for negative noisy counts");
  synth_cmd->add_option("--ipf-tol", synth_args.ipf_tol, "ipf tolerance");
  synth_cmd->add_option("--ipf-max-iter", synth_args.ipf_max_iter,
                        "ipf iteration cap");
  synth_cmd->add_option("--sample-size", synth_args.sample_size,
                        "fixed or poisson")
      ->check(CLI::IsMember({"fixed", "poisson"}));
  synth_cmd->add_option("--stratify-by", synth_args.stratify_by,
                        "stratum variable name");
  synth_cmd->add_option("--seed", synth_args.seed, "random seed");
  synth_cmd->add_option("--bin-classes", synth_args.bin_classes,
                        "classes for numeric grouping");
  synth_cmd->add_flag("--no-bin", synth_args.no_bin,
                      "disable numeric grouping");
  synth_cmd->add_option("--out", synth_args.out, "output CSV")->required();

  std::string metrics_original, metrics_synthetic, metrics_codebook;
  std::size_t metrics_order = 2;
  int metrics_bin_classes = 5;
  bool metrics_no_bin = false;
  auto* metrics_cmd =
      app.add_subcommand("metrics", "disclosure and utility report");
  metrics_cmd->add_option("--original", metrics_original, "original CSV")
      ->required();
  metrics_cmd->add_option("--synthetic", metrics_synthetic, "synthetic CSV")
      ->required();
  metrics_cmd->add_option("--order", metrics_order, "margin order");
  metrics_cmd->add_option("--codebook", metrics_codebook, "codebook file");
  metrics_cmd->add_option("--bin-classes", metrics_bin_classes,
                          "classes for numeric grouping");
  metrics_cmd->add_flag("--no-bin", metrics_no_bin,
                        "disable numeric grouping");

  std::string experiment_plan, experiment_out;
  auto* experiment_cmd =
      app.add_subcommand("experiment", "run an epsilon-sweep plan");
  experiment_cmd->add_option("--plan", experiment_plan, "plan file")
      ->required();
  experiment_cmd->add_option("--out", experiment_out, "output directory")
      ->required();

  GenerateArgs generate_args;
  auto* generate_cmd =
      app.add_subcommand("generate", "generate benchmark data");
  generate_cmd
      ->add_option("--cards", generate_args.cards,
                   "comma-separated cardinalities, e.g. 2,5,6,4,9")
      ->required();
  generate_cmd->add_option("--n", generate_args.n, "number of records");
  generate_cmd->add_option("--seed", generate_args.seed, "random seed");
  generate_cmd->add_option("--main-sd", generate_args.main_sd,
                           "main-effect dispersion");
  generate_cmd->add_option("--two-way-sd", generate_args.two_way_sd,
                           "two-way interaction dispersion");
  generate_cmd->add_option("--three-way-sd", generate_args.three_way_sd,
                           "three-way interaction dispersion");
  generate_cmd->add_option("--planted-vars", generate_args.planted_vars,
                           "three binary variable indices, e.g. 0,1,2");
  generate_cmd->add_option("--planted-log-or", generate_args.planted_log_or,
                           "log odds-ratio shift of the planted interaction");
  generate_cmd->add_option("--out", generate_args.out, "output CSV")
      ->required();
  generate_cmd->add_option("--params", generate_args.params,
                           "ground-truth parameter file (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth_cmd->parsed()) {
      synth_args.has_epsilon = eps_opt->count() > 0;
      return run_synth(synth_args);
    }
    if (metrics_cmd->parsed())
      return run_metrics(metrics_original, metrics_synthetic, metrics_order,
                         metrics_codebook, metrics_bin_classes,
                         metrics_no_bin);
    if (experiment_cmd->parsed())
      return run_experiment_cmd(experiment_plan, experiment_out);
    if (generate_cmd->parsed()) return run_generate(generate_args);
  } catch (const DegenerateTableError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
