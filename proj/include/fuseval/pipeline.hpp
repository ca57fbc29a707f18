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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuseval/chunkops.hpp"
#include "fuseval/decision.hpp"
#include "fuseval/fusion.hpp"
#include "fuseval/metrics.hpp"
#include "fuseval/reliability.hpp"
#include "fuseval/scorelog.hpp"

namespace fuseval {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct EvaluateOptions {
  int phq8_threshold = kDefaultPhq8Threshold;  // echoed into provenance
  double classification_threshold = 0.5;
  double grid_step = kDefaultGridStep;
  double ridge_lambda = kDefaultRidgeLambda;
  double epsilon = kDefaultEpsilon;
  int n_resamples = 1000;
  std::uint64_t seed = 0;
  int n_bins = 10;
  BinningStrategy binning = BinningStrategy::kEqualWidth;
  double dca_t_min = kDcaDefaultTMin;
  double dca_t_max = kDcaDefaultTMax;
  double dca_step = kDcaDefaultStep;
  // Empty means every non-empty modality subset in enumeration order
  // (singletons first, then pairs, ..., then the full set).
  std::vector<std::vector<std::string>> configurations;
  int n_threads = 1;
};

// Everything computed for one modality configuration. Fitting saw only the
// fit split; all evaluation quantities come from the test split.
struct ConfigurationResult {
  std::string name;  // modality names joined with '+'
  std::vector<Modality> modalities;
  FusionFitResult fit;
  std::size_t n_fit_patients = 0;
  std::size_t n_test_patients = 0;
  std::vector<std::string> test_patient_ids;
  std::vector<double> test_scores;  // calibrated fused probabilities
  std::vector<int> test_labels;
  ClassMetrics metrics;
  RocResult roc;
  BootstrapCI auroc_ci;
  RocBand roc_band;
  CalibrationReport calibration;
  NetBenefitCurve dca;
  DominanceSummary dominance;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string input_hash;  // fnv1a64 over the canonical CSV serialization
  std::string version = kArtifactVersion;
};

struct EvaluationReport {
  Provenance provenance;
  EvaluateOptions options;
  DatasetSummary dataset;
  std::vector<PatientScore> aggregated;
  std::vector<ConfigurationResult> configurations;
};

// FNV-1a over the validated dataset's canonical CSV serialization, rendered
// as "fnv1a64:<16 hex digits>".
std::string dataset_content_hash(const ValidatedDataset& dataset);

EvaluationReport run_evaluation(const ValidatedDataset& dataset,
                                const EvaluateOptions& options);

nlohmann::ordered_json report_to_json(const EvaluationReport& report);

// Writes metrics.csv, metrics.json, aggregated_scores.csv and one
// subdirectory per configuration (fusion_spec.json, roc.svg, reliability.svg,
// reliability.csv, dca.svg, dca.csv). Reruns with identical inputs produce
// byte-identical files.
void write_evaluation_outputs(const EvaluationReport& report,
                              const std::string& out_dir);

}  // namespace fuseval
