/*
 * Copyright 2026 The fuseval authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fuseval/chunkops.hpp"
#include "fuseval/csv.hpp"
#include "fuseval/decision.hpp"
#include "fuseval/errors.hpp"
#include "fuseval/fusion.hpp"
#include "fuseval/pipeline.hpp"
#include "fuseval/reliability.hpp"
#include "fuseval/scorelog.hpp"
#include "fuseval/svg.hpp"
#include "fuseval/synthgen.hpp"

namespace {

using namespace fuseval;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitFit = 3;
constexpr int kExitInternal = 4;

std::ifstream open_input(const std::string& path, const std::string& context) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("file_not_found",
                          context + ": file not found (" + path + ")");
  }
  return in;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("io_error",
                          "cannot open " + path.string() + " for writing");
  }
  out << content;
}

// Declared modality order = order of first appearance in the scores file.
std::vector<Modality> infer_modalities(const std::string& scores_path) {
  std::ifstream in = open_input(scores_path, "chunk scores");
  CsvReader reader(in, "chunk scores");
  std::vector<std::string> fields;
  if (!reader.next(fields)) {
    throw ValidationError("empty_file", "chunk scores: empty file");
  }
  std::vector<Modality> modalities;
  while (reader.next(fields)) {
    if (fields.size() < 2) continue;  // the parser proper reports this
    Modality m{fields[1]};
    bool known = false;
    for (const Modality& seen : modalities) {
      if (seen == m) {
        known = true;
        break;
      }
    }
    if (!known) modalities.push_back(std::move(m));
  }
  if (modalities.empty()) {
    throw ValidationError("empty_file", "chunk scores: no data rows");
  }
  return modalities;
}

struct DatasetArgs {
  std::string scores_path;
  std::string labels_path;
  std::string splits_path;
  std::vector<std::string> modality_names;
  int phq8_threshold = kDefaultPhq8Threshold;
};

void add_dataset_options(CLI::App* cmd, DatasetArgs& args) {
  cmd->add_option("--scores", args.scores_path,
                  "Chunk scores CSV (patient_id,modality,chunk_index,score"
                  "[,start_s,duration_s])")
      ->required();
  cmd->add_option("--labels", args.labels_path,
                  "Labels CSV (patient_id,phq8[,label])")
      ->required();
  cmd->add_option("--splits", args.splits_path,
                  "Splits CSV (patient_id,split with split in {fit,test})")
      ->required();
  cmd->add_option("--modalities", args.modality_names,
                  "Declared modality order (default: order of first "
                  "appearance in the scores file)")
      ->delimiter(',');
  cmd->add_option("--phq8-threshold", args.phq8_threshold,
                  "Depression cutoff: label = 1 iff phq8 > threshold")
      ->capture_default_str()
      ->check(CLI::Range(0, kPhq8Max - 1));
}

ValidatedDataset load_dataset(const DatasetArgs& args) {
  std::vector<Modality> modalities;
  if (args.modality_names.empty()) {
    modalities = infer_modalities(args.scores_path);
  } else {
    for (const std::string& name : args.modality_names) {
      modalities.push_back(Modality{name});
    }
  }
  std::ifstream scores_in = open_input(args.scores_path, "chunk scores");
  std::vector<ChunkScore> chunks =
      parse_chunk_scores(scores_in, modalities, "chunk scores");
  std::ifstream labels_in = open_input(args.labels_path, "labels");
  std::vector<LabelRecord> labels =
      parse_labels(labels_in, args.phq8_threshold, "labels");
  std::ifstream splits_in = open_input(args.splits_path, "splits");
  std::vector<SplitAssignment> splits = parse_splits(splits_in, "splits");
  return ValidatedDataset::validate(std::move(chunks), std::move(labels),
                                    std::move(splits), std::move(modalities));
}

// patient_id,score,label rows for the standalone dca / calibration commands.
struct Predictions {
  std::vector<std::string> patient_ids;
  std::vector<double> scores;
  std::vector<int> labels;
};

Predictions parse_predictions(std::istream& in, const std::string& context) {
  CsvReader reader(in, context);
  reader.expect_header("patient_id,score,label");
  Predictions preds;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() != 3) {
      reader.fail("bad_field_count", "expected 3 fields, got " +
                                         std::to_string(fields.size()));
    }
    double score = reader.parse_double(fields[1], "score");
    if (!(score >= 0.0 && score <= 1.0)) {
      reader.fail("score_out_of_range", "score outside [0, 1]");
    }
    int label = reader.parse_int(fields[2], "label");
    if (label != 0 && label != 1) {
      reader.fail("bad_label", "label must be 0 or 1");
    }
    preds.patient_ids.push_back(fields[0]);
    preds.scores.push_back(score);
    preds.labels.push_back(label);
  }
  if (preds.scores.empty()) {
    reader.fail("empty_file", "no data rows");
  }
  return preds;
}

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// ---------------------------------------------------------------------------
// validate

struct ValidateArgs {
  DatasetArgs dataset;
};

int run_validate(const ValidateArgs& args) {
  ValidatedDataset dataset = load_dataset(args.dataset);
  const DatasetSummary& s = dataset.summary();
  std::cout << "patients: " << s.n_patients << " (" << s.n_positive
            << " depressed, " << s.n_negative << " control)\n";
  std::cout << "prevalence: " << two_decimals(s.prevalence) << '\n';
  std::cout << "splits: fit " << s.n_fit << ", test " << s.n_test << '\n';
  for (const ModalityChunkCount& mc : s.chunks_per_modality) {
    std::cout << "chunks[" << mc.modality.name << "]: " << mc.n_chunks << '\n';
  }
  for (const std::string& warning : s.warnings) {
    std::cout << "warning: " << warning << '\n';
  }
  std::cout << "ok\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string out_dir;
  std::string scenario = "default";
  long n_patients = -1;
  double prevalence = -1.0;
  std::uint64_t seed = 7;
  int chunks_min = -1;
  int chunks_max = -1;
  std::vector<std::string> modality_specs;
};

SynthConfig build_synth_config(const SynthArgs& args) {
  SynthConfig config;
  if (args.scenario == "default") {
    config = default_scenario(args.seed);
  } else if (args.scenario == "complementary") {
    config = complementary_scenario(args.seed);
  } else {
    throw ValidationError("bad_synth_config", "unknown scenario '" +
                                                  args.scenario + "'");
  }
  config.seed = args.seed;
  if (args.n_patients >= 0) config.n_patients = args.n_patients;
  if (args.prevalence >= 0.0) config.prevalence = args.prevalence;
  if (args.chunks_min >= 0) config.chunks_per_patient.min_chunks = args.chunks_min;
  if (args.chunks_max >= 0) config.chunks_per_patient.max_chunks = args.chunks_max;
  if (!args.modality_specs.empty()) {
    config.modalities.clear();
    for (const std::string& spec : args.modality_specs) {
      std::vector<std::string> parts = split(spec, ':');
      if (parts.size() != 3 || parts[0].empty()) {
        throw ValidationError("bad_synth_config",
                              "modality spec must be NAME:SIGNAL:NOISE, got '" +
                                  spec + "'");
      }
      ModalityProfile profile;
      profile.modality.name = parts[0];
      try {
        profile.signal = std::stod(parts[1]);
        profile.noise = std::stod(parts[2]);
      } catch (const std::exception&) {
        throw ValidationError("bad_synth_config",
                              "non-numeric field in modality spec '" + spec +
                                  "'");
      }
      config.modalities.push_back(std::move(profile));
    }
  }
  return config;
}

int run_synth(const SynthArgs& args) {
  SynthConfig config = build_synth_config(args);
  SynthCohort cohort = generate_cohort(config);

  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);

  std::ostringstream scores;
  write_chunk_scores(scores, cohort.chunks);
  write_file(dir / "scores.csv", scores.str());
  std::ostringstream labels;
  write_labels(labels, cohort.labels);
  write_file(dir / "labels.csv", labels.str());
  std::ostringstream splits;
  write_splits(splits, cohort.splits);
  write_file(dir / "splits.csv", splits.str());

  long n_pos = 0;
  for (const LabelRecord& rec : cohort.labels) n_pos += rec.label;
  std::cout << "wrote " << (dir / "scores.csv").string() << " ("
            << cohort.chunks.size() << " rows)\n";
  std::cout << "wrote " << (dir / "labels.csv").string() << " ("
            << cohort.labels.size() << " rows)\n";
  std::cout << "wrote " << (dir / "splits.csv").string() << " ("
            << cohort.splits.size() << " rows)\n";
  std::cout << "patients: " << cohort.labels.size() << " (" << n_pos
            << " depressed)\n";
  std::cout << "seed: " << config.seed << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  DatasetArgs dataset;
  std::string out_dir;
  EvaluateOptions options;
  std::vector<std::string> configuration_specs;  // "all" or audio+text forms
};

nlohmann::ordered_json effective_config_json(const EvaluateArgs& args) {
  nlohmann::ordered_json j;
  j["scores"] = args.dataset.scores_path;
  j["labels"] = args.dataset.labels_path;
  j["splits"] = args.dataset.splits_path;
  j["out"] = args.out_dir;
  j["phq8_threshold"] = args.options.phq8_threshold;
  j["classification_threshold"] = args.options.classification_threshold;
  j["grid_step"] = args.options.grid_step;
  j["ridge_lambda"] = args.options.ridge_lambda;
  j["epsilon"] = args.options.epsilon;
  j["n_resamples"] = args.options.n_resamples;
  j["seed"] = args.options.seed;
  j["n_bins"] = args.options.n_bins;
  j["binning"] = binning_strategy_name(args.options.binning);
  j["dca_t_min"] = args.options.dca_t_min;
  j["dca_t_max"] = args.options.dca_t_max;
  j["dca_step"] = args.options.dca_step;
  j["configurations"] = args.configuration_specs;
  j["n_threads"] = args.options.n_threads;
  return j;
}

int run_evaluate(EvaluateArgs& args) {
  args.options.phq8_threshold = args.dataset.phq8_threshold;
  for (const std::string& spec : args.configuration_specs) {
    if (spec == "all") {
      if (args.configuration_specs.size() != 1) {
        throw ValidationError("bad_configuration",
                              "'all' cannot be combined with explicit "
                              "configurations");
      }
      break;
    }
    args.options.configurations.push_back(split(spec, '+'));
  }

  ValidatedDataset dataset = load_dataset(args.dataset);
  EvaluationReport report = run_evaluation(dataset, args.options);
  write_evaluation_outputs(report, args.out_dir);
  write_file(std::filesystem::path(args.out_dir) / "effective_config.json",
             effective_config_json(args).dump(2) + "\n");

  std::cout << "configurations: " << report.configurations.size() << '\n';
  for (const ConfigurationResult& result : report.configurations) {
    std::cout << result.name << ": AUROC "
              << two_decimals(result.auroc_ci.point_estimate) << " ("
              << two_decimals(result.auroc_ci.lower) << "-"
              << two_decimals(result.auroc_ci.upper) << "), macro-F1 "
              << two_decimals(result.metrics.macro_f1) << '\n';
  }
  std::cout << "wrote " << args.out_dir << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// dca

struct DcaArgs {
  std::string predictions_path;
  std::string out_dir;
  double t_min = kDcaDefaultTMin;
  double t_max = kDcaDefaultTMax;
  double step = kDcaDefaultStep;
};

int run_dca(const DcaArgs& args) {
  std::ifstream in = open_input(args.predictions_path, "predictions");
  Predictions preds = parse_predictions(in, "predictions");
  NetBenefitCurve curve =
      decision_curve(preds.scores, preds.labels, args.t_min, args.t_max,
                     args.step);
  DominanceSummary dominance = dominance_summary(curve);

  std::cout << kNetBenefitFormula << '\n';
  std::cout << "prevalence: " << format_double(curve.prevalence) << '\n';
  if (dominance.intervals.empty()) {
    std::cout << "model never reaches both baselines on the grid\n";
  }
  for (const DominanceInterval& interval : dominance.intervals) {
    std::cout << "model >= both baselines on [" << format_double(interval.t_lo)
              << ", " << format_double(interval.t_hi) << "]"
              << (interval.strict ? " (strict)" : "") << '\n';
  }

  if (!args.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    std::ostringstream csv;
    write_dca_csv(csv, curve);
    write_file(dir / "dca.csv", csv.str());
    std::ostringstream svg;
    write_dca_svg(svg, curve, "Decision curve");
    write_file(dir / "dca.svg", svg.str());
    std::cout << "wrote " << (dir / "dca.csv").string() << " and "
              << (dir / "dca.svg").string() << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// calibration

struct CalibrationArgs {
  std::string predictions_path;
  std::string out_dir;
  int n_bins = 10;
  std::string binning = "equal_width";
  bool fit = false;
  double ridge_lambda = kDefaultRidgeLambda;
  double epsilon = kDefaultEpsilon;
};

int run_calibration(const CalibrationArgs& args) {
  std::ifstream in = open_input(args.predictions_path, "predictions");
  Predictions preds = parse_predictions(in, "predictions");
  BinningStrategy strategy = parse_binning_strategy(args.binning);
  CalibrationReport report =
      reliability_curve(preds.scores, preds.labels, args.n_bins, strategy);
  CalibrationInterpretation interpretation = interpret_calibration(report);

  std::cout << kEceFormula << '\n';
  std::cout << "ece: " << format_double(report.ece) << " ("
            << binning_strategy_name(report.strategy) << ", n = "
            << report.n_samples << ")\n";
  std::cout << interpretation.summary;

  std::optional<CalibratorFitReport> fit_report;
  if (args.fit) {
    fit_report = fit_calibrator(preds.scores, preds.labels, args.ridge_lambda,
                                args.epsilon);
    std::cout << "calibrator: a = " << format_double(fit_report->a)
              << ", b = " << format_double(fit_report->b) << " ("
              << (fit_report->converged ? "converged" : "not converged")
              << " in " << fit_report->n_iterations << " iterations)\n";
  }

  if (!args.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    std::ostringstream csv;
    write_reliability_csv(csv, report);
    write_file(dir / "reliability.csv", csv.str());
    std::ostringstream svg;
    write_reliability_svg(svg, report, "Reliability");
    write_file(dir / "reliability.svg", svg.str());
    if (fit_report) {
      nlohmann::ordered_json j;
      j["a"] = fit_report->a;
      j["b"] = fit_report->b;
      j["n_iterations"] = fit_report->n_iterations;
      j["log_likelihood"] = fit_report->final_log_likelihood;
      j["converged"] = fit_report->converged;
      j["ridge_lambda"] = fit_report->ridge_lambda;
      write_file(dir / "calibrator.json", j.dump(2) + "\n");
    }
    std::cout << "wrote " << dir.string() << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fuseval: late-fusion evaluation toolkit for chunked "
               "multimodal classifier scores"};
  app.set_version_flag("--version", kArtifactVersion);
  app.set_config("--config", "",
                 "Read options from a TOML-style or INI config file (command "
                 "line flags take precedence)");
  app.require_subcommand(1);

  ValidateArgs validate_args;
  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "Cross-check a dataset and print its summary");
  add_dataset_options(validate_cmd, validate_args.dataset);

  SynthArgs synth_args;
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "Generate a deterministic synthetic cohort");
  synth_cmd->add_option("--out", synth_args.out_dir, "Output directory")
      ->required();
  synth_cmd->add_option("--scenario", synth_args.scenario,
                        "Preset: default (3 modalities) or complementary "
                        "(2 modalities)")
      ->capture_default_str()
      ->check(CLI::IsMember({"default", "complementary"}));
  synth_cmd->add_option("--n", synth_args.n_patients, "Number of patients");
  synth_cmd->add_option("--prevalence", synth_args.prevalence,
                        "Positive-class fraction in (0,1)");
  synth_cmd->add_option("--seed", synth_args.seed, "RNG seed")
      ->capture_default_str();
  synth_cmd->add_option("--chunks-min", synth_args.chunks_min,
                        "Minimum chunks per patient");
  synth_cmd->add_option("--chunks-max", synth_args.chunks_max,
                        "Maximum chunks per patient");
  synth_cmd->add_option("--modality", synth_args.modality_specs,
                        "Override modality profile as NAME:SIGNAL:NOISE "
                        "(repeatable)");

  EvaluateArgs evaluate_args;
  CLI::App* evaluate_cmd = app.add_subcommand(
      "evaluate", "Fit fusion + calibration on the fit split and evaluate "
                  "every requested configuration on the test split");
  add_dataset_options(evaluate_cmd, evaluate_args.dataset);
  evaluate_cmd->add_option("--out", evaluate_args.out_dir, "Output directory")
      ->required();
  evaluate_cmd
      ->add_option("--threshold", evaluate_args.options.classification_threshold,
                   "Classification threshold for the confusion metrics")
      ->capture_default_str();
  evaluate_cmd
      ->add_option("--grid-step", evaluate_args.options.grid_step,
                   "Fusion weight grid step (must divide 1)")
      ->capture_default_str();
  evaluate_cmd
      ->add_option("--ridge-lambda", evaluate_args.options.ridge_lambda,
                   "Ridge penalty on the calibrator slope")
      ->capture_default_str();
  evaluate_cmd
      ->add_option("--epsilon", evaluate_args.options.epsilon,
                   "Probability clamp for logit inputs")
      ->capture_default_str();
  evaluate_cmd
      ->add_option("--n-resamples", evaluate_args.options.n_resamples,
                   "Bootstrap resample count")
      ->capture_default_str();
  evaluate_cmd->add_option("--seed", evaluate_args.options.seed, "RNG seed")
      ->capture_default_str();
  evaluate_cmd
      ->add_option("--n-bins", evaluate_args.options.n_bins,
                   "Reliability bin count")
      ->capture_default_str();
  std::string binning = "equal_width";
  evaluate_cmd->add_option("--binning", binning, "equal_width or quantile")
      ->capture_default_str()
      ->check(CLI::IsMember({"equal_width", "quantile"}));
  evaluate_cmd
      ->add_option("--dca-min", evaluate_args.options.dca_t_min,
                   "Decision-curve minimum threshold")
      ->capture_default_str();
  evaluate_cmd
      ->add_option("--dca-max", evaluate_args.options.dca_t_max,
                   "Decision-curve maximum threshold")
      ->capture_default_str();
  evaluate_cmd
      ->add_option("--dca-step", evaluate_args.options.dca_step,
                   "Decision-curve grid step")
      ->capture_default_str();
  evaluate_cmd
      ->add_option("--configurations", evaluate_args.configuration_specs,
                   "all, or modality subsets like audio+text (repeatable / "
                   "comma separated)")
      ->delimiter(',');
  evaluate_cmd
      ->add_option("--threads", evaluate_args.options.n_threads,
                   "Worker threads for the bootstrap")
      ->capture_default_str();

  DcaArgs dca_args;
  CLI::App* dca_cmd = app.add_subcommand(
      "dca", "Decision-curve analysis of a predictions file "
             "(patient_id,score,label)");
  dca_cmd->add_option("--predictions", dca_args.predictions_path,
                      "Predictions CSV")
      ->required();
  dca_cmd->add_option("--out", dca_args.out_dir,
                      "Optional output directory for dca.csv / dca.svg");
  dca_cmd->add_option("--t-min", dca_args.t_min, "Minimum threshold")
      ->capture_default_str();
  dca_cmd->add_option("--t-max", dca_args.t_max, "Maximum threshold")
      ->capture_default_str();
  dca_cmd->add_option("--step", dca_args.step, "Grid step")
      ->capture_default_str();

  CalibrationArgs calibration_args;
  CLI::App* calibration_cmd = app.add_subcommand(
      "calibration", "Reliability analysis of a predictions file "
                     "(patient_id,score,label)");
  calibration_cmd
      ->add_option("--predictions", calibration_args.predictions_path,
                   "Predictions CSV")
      ->required();
  calibration_cmd->add_option("--out", calibration_args.out_dir,
                              "Optional output directory");
  calibration_cmd
      ->add_option("--bins", calibration_args.n_bins, "Bin count")
      ->capture_default_str();
  calibration_cmd
      ->add_option("--binning", calibration_args.binning,
                   "equal_width or quantile")
      ->capture_default_str()
      ->check(CLI::IsMember({"equal_width", "quantile"}));
  calibration_cmd->add_flag("--fit", calibration_args.fit,
                            "Also fit a Platt-style calibrator");
  calibration_cmd
      ->add_option("--ridge-lambda", calibration_args.ridge_lambda,
                   "Ridge penalty on the calibrator slope")
      ->capture_default_str();
  calibration_cmd
      ->add_option("--epsilon", calibration_args.epsilon,
                   "Probability clamp for logit inputs")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (validate_cmd->parsed()) return run_validate(validate_args);
    if (synth_cmd->parsed()) return run_synth(synth_args);
    if (evaluate_cmd->parsed()) {
      evaluate_args.options.binning = parse_binning_strategy(binning);
      return run_evaluate(evaluate_args);
    }
    if (dca_cmd->parsed()) return run_dca(dca_args);
    if (calibration_cmd->parsed()) return run_calibration(calibration_args);
    std::cerr << "error: no subcommand selected\n";
    return kExitValidation;
  } catch (const FitError& e) {
    std::cerr << "error: " << e.what() << " [" << e.kind() << "]\n";
    return kExitFit;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << " [" << e.kind() << "]\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
