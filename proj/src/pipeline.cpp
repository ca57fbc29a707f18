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

#include "fuseval/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fuseval/csv.hpp"
#include "fuseval/errors.hpp"
#include "fuseval/rng.hpp"
#include "fuseval/svg.hpp"

namespace fuseval {

namespace {

void check_options(const EvaluateOptions& options) {
  if (!(options.classification_threshold > 0.0 &&
        options.classification_threshold < 1.0)) {
    throw ValidationError("bad_options",
                          "classification threshold must lie in (0, 1)");
  }
  if (options.n_resamples < 1) {
    throw ValidationError("bad_options", "n_resamples must be >= 1");
  }
  if (options.n_bins < 2) {
    throw ValidationError("bad_options", "n_bins must be >= 2");
  }
  if (options.n_threads < 1) {
    throw ValidationError("bad_options", "n_threads must be >= 1");
  }
  if (!(options.ridge_lambda >= 0.0)) {
    throw ValidationError("bad_options", "ridge lambda must be >= 0");
  }
  if (!(options.dca_t_min > 0.0 && options.dca_t_min < options.dca_t_max &&
        options.dca_t_max < 1.0 && options.dca_step > 0.0)) {
    throw ValidationError("bad_options",
                          "decision-curve grid must satisfy 0 < t_min < t_max "
                          "< 1 with step > 0");
  }
}

std::string configuration_name(const std::vector<Modality>& configuration) {
  std::string name;
  for (std::size_t i = 0; i < configuration.size(); ++i) {
    if (i > 0) name += '+';
    name += configuration[i].name;
  }
  return name;
}

// Requested subsets are canonicalized to the dataset's declared modality
// order so the same subset always produces the same row and directory name.
std::vector<std::vector<Modality>> resolve_configurations(
    const ValidatedDataset& dataset, const EvaluateOptions& options) {
  const std::vector<Modality>& declared = dataset.modalities();
  if (options.configurations.empty()) {
    return enumerate_configurations(declared);
  }
  std::vector<std::vector<Modality>> resolved;
  std::vector<std::string> seen_names;
  for (const std::vector<std::string>& request : options.configurations) {
    if (request.empty()) {
      throw ValidationError("bad_configuration",
                            "configuration subset must not be empty");
    }
    std::vector<bool> selected(declared.size(), false);
    for (const std::string& name : request) {
      auto it = std::find_if(declared.begin(), declared.end(),
                             [&](const Modality& m) { return m.name == name; });
      if (it == declared.end()) {
        throw ValidationError("bad_configuration",
                              "unknown modality '" + name +
                                  "' in requested configuration");
      }
      std::size_t idx = static_cast<std::size_t>(it - declared.begin());
      if (selected[idx]) {
        throw ValidationError("bad_configuration",
                              "modality '" + name +
                                  "' repeated within a configuration");
      }
      selected[idx] = true;
    }
    std::vector<Modality> configuration;
    for (std::size_t i = 0; i < declared.size(); ++i) {
      if (selected[i]) configuration.push_back(declared[i]);
    }
    std::string name = configuration_name(configuration);
    if (std::find(seen_names.begin(), seen_names.end(), name) !=
        seen_names.end()) {
      throw ValidationError("bad_configuration",
                            "configuration '" + name + "' requested twice");
    }
    seen_names.push_back(name);
    resolved.push_back(std::move(configuration));
  }
  return resolved;
}

nlohmann::ordered_json options_to_json(const EvaluateOptions& options) {
  nlohmann::ordered_json j;
  j["phq8_threshold"] = options.phq8_threshold;
  j["classification_threshold"] = options.classification_threshold;
  j["grid_step"] = options.grid_step;
  j["ridge_lambda"] = options.ridge_lambda;
  j["epsilon"] = options.epsilon;
  j["n_resamples"] = options.n_resamples;
  j["seed"] = options.seed;
  j["n_bins"] = options.n_bins;
  j["binning"] = binning_strategy_name(options.binning);
  j["dca_t_min"] = options.dca_t_min;
  j["dca_t_max"] = options.dca_t_max;
  j["dca_step"] = options.dca_step;
  // n_threads is deliberately omitted: it must never change any output byte.
  return j;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("io_error", "cannot open " + path.string() +
                                          " for writing");
  }
  out << content;
  if (!out) {
    throw ValidationError("io_error", "write failed for " + path.string());
  }
}

}  // namespace

std::string dataset_content_hash(const ValidatedDataset& dataset) {
  std::ostringstream canonical;
  write_chunk_scores(canonical, dataset.chunks());
  write_labels(canonical, dataset.labels());
  write_splits(canonical, dataset.splits());
  std::uint64_t hash = fnv1a64(canonical.str());
  std::ostringstream hex;
  hex << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << hash;
  return hex.str();
}

EvaluationReport run_evaluation(const ValidatedDataset& dataset,
                                const EvaluateOptions& options) {
  check_options(options);

  EvaluationReport report;
  report.provenance.seed = options.seed;
  report.provenance.input_hash = dataset_content_hash(dataset);
  report.options = options;
  report.dataset = dataset.summary();
  report.aggregated = aggregate_dataset(dataset);

  const std::vector<std::vector<Modality>> configurations =
      resolve_configurations(dataset, options);

  for (const std::vector<Modality>& configuration : configurations) {
    ConfigurationResult result;
    result.name = configuration_name(configuration);
    result.modalities = configuration;

    ScoreMatrix fit_matrix = build_score_matrix(report.aggregated, dataset,
                                                configuration, Split::kFit);
    ScoreMatrix test_matrix = build_score_matrix(report.aggregated, dataset,
                                                 configuration, Split::kTest);
    result.n_fit_patients = fit_matrix.patient_ids.size();
    result.n_test_patients = test_matrix.patient_ids.size();

    result.fit = fit_fusion_detailed(fit_matrix, options.grid_step,
                                     options.ridge_lambda, options.epsilon);

    result.test_patient_ids = test_matrix.patient_ids;
    result.test_scores = predict_matrix(result.fit.spec, test_matrix);
    result.test_labels = test_matrix.labels;

    ConfusionCounts counts = confusion_at_threshold(
        result.test_scores, result.test_labels, options.classification_threshold);
    result.metrics = class_metrics(counts);
    result.roc = roc_auroc(result.test_scores, result.test_labels);

    // Per-configuration substream keyed by name, so a subset run reproduces
    // the exact rows of an all-configurations run.
    const std::uint64_t cfg_seed =
        SplitMix64::derive(options.seed, fnv1a64(result.name));
    result.auroc_ci =
        bootstrap_ci(static_cast<double (*)(std::span<const double>,
                                            std::span<const int>)>(auroc),
                     result.test_scores, result.test_labels,
                     options.n_resamples, cfg_seed, 0.95, options.n_threads);
    result.roc_band = bootstrap_roc_band(result.test_scores, result.test_labels,
                                         options.n_resamples, cfg_seed);

    result.calibration = reliability_curve(result.test_scores,
                                           result.test_labels, options.n_bins,
                                           options.binning);
    result.dca = decision_curve(result.test_scores, result.test_labels,
                                options.dca_t_min, options.dca_t_max,
                                options.dca_step);
    result.dominance = dominance_summary(result.dca);

    report.configurations.push_back(std::move(result));
  }
  return report;
}

nlohmann::ordered_json report_to_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["version"] = report.provenance.version;
  j["provenance"] = {
      {"seed", report.provenance.seed},
      {"input_hash", report.provenance.input_hash},
  };
  j["options"] = options_to_json(report.options);
  j["dataset"] = {
      {"n_patients", report.dataset.n_patients},
      {"n_positive", report.dataset.n_positive},
      {"n_negative", report.dataset.n_negative},
      {"prevalence", report.dataset.prevalence},
      {"n_fit", report.dataset.n_fit},
      {"n_test", report.dataset.n_test},
  };
  j["net_benefit_formula"] = kNetBenefitFormula;
  j["ece_formula"] = kEceFormula;

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ConfigurationResult& result : report.configurations) {
    nlohmann::ordered_json row;
    row["configuration"] = result.name;
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (const Modality& m : result.modalities) names.push_back(m.name);
    row["modalities"] = names;
    row["n_fit_patients"] = result.n_fit_patients;
    row["n_test_patients"] = result.n_test_patients;
    row["fusion"] = fusion_spec_to_json(result.fit.spec);
    row["calibrator_fit"] = {
        {"a", result.fit.calibrator.a},
        {"b", result.fit.calibrator.b},
        {"n_iterations", result.fit.calibrator.n_iterations},
        {"log_likelihood", result.fit.calibrator.final_log_likelihood},
        {"converged", result.fit.calibrator.converged},
    };
    row["metrics"] = {
        {"P_C", result.metrics.precision_c}, {"P_D", result.metrics.precision_d},
        {"R_C", result.metrics.recall_c},    {"R_D", result.metrics.recall_d},
        {"F1_C", result.metrics.f1_c},       {"F1_D", result.metrics.f1_d},
        {"macro_F1", result.metrics.macro_f1},
    };
    row["auroc"] = {
        {"estimate", result.auroc_ci.point_estimate},
        {"ci_low", result.auroc_ci.lower},
        {"ci_high", result.auroc_ci.upper},
        {"level", result.auroc_ci.level},
        {"n_resamples", result.auroc_ci.n_resamples},
        {"n_degenerate_discarded", result.auroc_ci.n_degenerate_discarded},
    };
    row["ece"] = result.calibration.ece;
    nlohmann::ordered_json dominance = nlohmann::ordered_json::array();
    for (const DominanceInterval& interval : result.dominance.intervals) {
      dominance.push_back({{"t_lo", interval.t_lo},
                           {"t_hi", interval.t_hi},
                           {"strict", interval.strict}});
    }
    row["dca"] = {
        {"prevalence", result.dca.prevalence},
        {"dominance", dominance},
    };
    rows.push_back(std::move(row));
  }
  j["configurations"] = std::move(rows);
  return j;
}

void write_evaluation_outputs(const EvaluationReport& report,
                              const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path root(out_dir);
  fs::create_directories(root);

  std::vector<MetricsRow> rows;
  rows.reserve(report.configurations.size());
  for (const ConfigurationResult& result : report.configurations) {
    MetricsRow row;
    row.configuration = result.name;
    row.cls = result.metrics;
    row.auroc = result.auroc_ci.point_estimate;
    row.auroc_ci_low = result.auroc_ci.lower;
    row.auroc_ci_high = result.auroc_ci.upper;
    rows.push_back(std::move(row));
  }
  write_text_file(root / "metrics.csv", metrics_csv(rows));
  write_text_file(root / "metrics.json", report_to_json(report).dump(2) + "\n");

  {
    std::ostringstream agg;
    write_patient_scores(agg, report.aggregated);
    write_text_file(root / "aggregated_scores.csv", agg.str());
  }

  for (const ConfigurationResult& result : report.configurations) {
    const fs::path dir = root / result.name;
    fs::create_directories(dir);
    write_text_file(dir / "fusion_spec.json",
                    fusion_spec_to_json(result.fit.spec).dump(2) + "\n");

    std::ostringstream roc;
    write_roc_svg(roc, result.roc, result.roc_band, result.auroc_ci,
                  "ROC - " + result.name);
    write_text_file(dir / "roc.svg", roc.str());

    std::ostringstream reliability;
    write_reliability_svg(reliability, result.calibration,
                          "Reliability - " + result.name);
    write_text_file(dir / "reliability.svg", reliability.str());

    std::ostringstream reliability_rows;
    write_reliability_csv(reliability_rows, result.calibration);
    write_text_file(dir / "reliability.csv", reliability_rows.str());

    std::ostringstream dca;
    write_dca_svg(dca, result.dca, "Decision curve - " + result.name);
    write_text_file(dir / "dca.svg", dca.str());

    std::ostringstream dca_rows;
    write_dca_csv(dca_rows, result.dca);
    write_text_file(dir / "dca.csv", dca_rows.str());
  }
}

}  // namespace fuseval
