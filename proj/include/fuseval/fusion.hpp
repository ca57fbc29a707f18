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

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuseval/chunkops.hpp"
#include "fuseval/scorelog.hpp"

namespace fuseval {

constexpr double kDefaultEpsilon = 1e-6;
constexpr double kDefaultRidgeLambda = 1e-6;
constexpr double kDefaultGridStep = 0.05;

// Fitted late-fusion model for one modality configuration: convex weights
// over the configured modalities plus a Platt-style logistic calibrator
// p -> sigmoid(a * logit(p) + b).
struct FusionSpec {
  std::vector<Modality> modalities;
  std::vector<double> weights;
  double a = 1.0;
  double b = 0.0;
  double epsilon = kDefaultEpsilon;
  double grid_step = kDefaultGridStep;
  double ridge_lambda = kDefaultRidgeLambda;
};

// All non-empty subsets ordered by size then by position in the input list:
// singletons, pairs, ..., the full set.
std::vector<std::vector<Modality>> enumerate_configurations(
    const std::vector<Modality>& modalities);

// Convex combination sum(w_m * p_m). Weights must be non-negative and sum
// to 1 within 1e-9.
double fuse_raw(std::span<const double> scores, std::span<const double> weights);

struct CalibratorFitReport {
  double a = 0.0;
  double b = 0.0;
  int n_iterations = 0;
  double final_log_likelihood = 0.0;
  bool converged = false;
  double ridge_lambda = 0.0;
};

// Maximizes sum_i [y_i log mu_i + (1-y_i) log(1-mu_i)] - lambda * a^2 / 2
// with mu_i = sigmoid(a * logit(clamp(p_i, eps, 1-eps)) + b), by damped
// Newton from (a,b) = (1,0). Stops when the penalized gradient max-norm
// drops below 1e-8 or after 100 iterations. final_log_likelihood is the
// unpenalized data term at the returned point.
CalibratorFitReport fit_calibrator(std::span<const double> raw_scores,
                                   std::span<const int> labels,
                                   double ridge_lambda = kDefaultRidgeLambda,
                                   double epsilon = kDefaultEpsilon);

// Unpenalized calibration log-likelihood at (a, b).
double calibrator_log_likelihood(double a, double b,
                                 std::span<const double> raw_scores,
                                 std::span<const int> labels,
                                 double epsilon = kDefaultEpsilon);

double apply_calibrator(double a, double b, double raw,
                        double epsilon = kDefaultEpsilon);

// Patient-by-modality raw score matrix for one configuration and one split.
// fit_fusion only ever receives the fit-split matrix, so test labels are
// structurally out of reach during fitting.
struct ScoreMatrix {
  std::vector<Modality> modalities;
  std::vector<std::string> patient_ids;
  std::vector<std::vector<double>> scores;  // [patient][modality]
  std::vector<int> labels;
};

ScoreMatrix build_score_matrix(std::span<const PatientScore> patient_scores,
                               const ValidatedDataset& dataset,
                               const std::vector<Modality>& configuration,
                               Split split);

// All weight vectors on the simplex grid with coordinates that are
// multiples of grid_step summing to 1. grid_step must divide 1 exactly.
std::vector<std::vector<double>> enumerate_simplex_weights(
    std::size_t n_modalities, double grid_step);

// Exhaustive grid search maximizing fit-split AUROC of the raw fused score.
// Ties: maximal weight entropy first, then the lexicographically smallest
// vector over the configuration's modality order.
std::vector<double> fit_fusion_weights(const ScoreMatrix& fit_scores,
                                       double grid_step = kDefaultGridStep);

FusionSpec fit_fusion(const ScoreMatrix& fit_scores,
                      double grid_step = kDefaultGridStep,
                      double ridge_lambda = kDefaultRidgeLambda,
                      double epsilon = kDefaultEpsilon);

// Detailed variant returning the calibrator fit report alongside the spec.
struct FusionFitResult {
  FusionSpec spec;
  CalibratorFitReport calibrator;
};

FusionFitResult fit_fusion_detailed(const ScoreMatrix& fit_scores,
                                    double grid_step = kDefaultGridStep,
                                    double ridge_lambda = kDefaultRidgeLambda,
                                    double epsilon = kDefaultEpsilon);

// Calibrated prediction for one patient's per-modality scores (aligned with
// spec.modalities).
double predict_fused(const FusionSpec& spec, std::span<const double> scores);

// Calibrated predictions for every row of a matrix (columns must match
// spec.modalities).
std::vector<double> predict_matrix(const FusionSpec& spec,
                                   const ScoreMatrix& matrix);

nlohmann::ordered_json fusion_spec_to_json(const FusionSpec& spec);
FusionSpec fusion_spec_from_json(const nlohmann::json& j);

}  // namespace fuseval
