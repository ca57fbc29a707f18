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

#include "fuseval/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fuseval/csv.hpp"
#include "fuseval/errors.hpp"
#include "fuseval/metrics.hpp"
#include "fuseval/numeric.hpp"

namespace fuseval {

namespace {

constexpr double kWeightSumTolerance = 1e-9;
constexpr double kGradientTolerance = 1e-8;
constexpr int kMaxNewtonIterations = 100;

void check_weights(std::span<const double> weights) {
  if (weights.empty()) {
    throw ValidationError("empty_input", "no fusion weights");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw ValidationError("out_of_range",
                            "fusion weight " + format_double(w) + " is negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw ValidationError("out_of_range", "fusion weights sum to " +
                                              format_double(sum) + ", not 1");
  }
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 0.5)) {
    throw ValidationError("out_of_range", "epsilon must be in (0, 0.5), got " +
                                              format_double(epsilon));
  }
}

double weight_entropy(std::span<const double> weights) {
  double h = 0.0;
  for (double w : weights) {
    if (w > 0.0) h -= w * std::log(w);
  }
  return h;
}

void simplex_recurse(std::size_t position, int remaining, int k,
                     std::vector<int>& counts,
                     std::vector<std::vector<double>>& out) {
  if (position + 1 == counts.size()) {
    counts[position] = remaining;
    std::vector<double> weights(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      weights[i] = static_cast<double>(counts[i]) / static_cast<double>(k);
    }
    out.push_back(std::move(weights));
    return;
  }
  for (int c = 0; c <= remaining; ++c) {
    counts[position] = c;
    simplex_recurse(position + 1, remaining - c, k, counts, out);
  }
}

}  // namespace

std::vector<std::vector<Modality>> enumerate_configurations(
    const std::vector<Modality>& modalities) {
  if (modalities.empty()) {
    throw ValidationError("no_modalities", "no modalities to enumerate");
  }
  const std::size_t m = modalities.size();
  std::vector<std::vector<Modality>> configurations;
  // Subsets as index combinations of size k, in lexicographic index order.
  for (std::size_t k = 1; k <= m; ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      std::vector<Modality> config;
      config.reserve(k);
      for (std::size_t i : idx) config.push_back(modalities[i]);
      configurations.push_back(std::move(config));

      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == m - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return configurations;
}

double fuse_raw(std::span<const double> scores, std::span<const double> weights) {
  check_weights(weights);
  if (scores.size() != weights.size()) {
    throw ValidationError("length_mismatch",
                          "missing modality score for a weighted modality: got " +
                              std::to_string(scores.size()) + " scores for " +
                              std::to_string(weights.size()) + " weights");
  }
  double fused = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!(scores[i] >= 0.0) || !(scores[i] <= 1.0)) {
      throw ValidationError("out_of_range", "modality score " +
                                                format_double(scores[i]) +
                                                " outside [0,1]");
    }
    fused += weights[i] * scores[i];
  }
  return fused;
}

double calibrator_log_likelihood(double a, double b,
                                 std::span<const double> raw_scores,
                                 std::span<const int> labels, double epsilon) {
  double ll = 0.0;
  for (std::size_t i = 0; i < raw_scores.size(); ++i) {
    double z = a * logit(clamp_prob(raw_scores[i], epsilon)) + b;
    ll += labels[i] == 1 ? log_sigmoid(z) : log_sigmoid(-z);
  }
  return ll;
}

double apply_calibrator(double a, double b, double raw, double epsilon) {
  check_epsilon(epsilon);
  if (!(raw >= 0.0) || !(raw <= 1.0)) {
    throw ValidationError("out_of_range",
                          "raw score " + format_double(raw) + " outside [0,1]");
  }
  return sigmoid(a * logit(clamp_prob(raw, epsilon)) + b);
}

CalibratorFitReport fit_calibrator(std::span<const double> raw_scores,
                                   std::span<const int> labels,
                                   double ridge_lambda, double epsilon) {
  check_epsilon(epsilon);
  if (raw_scores.size() != labels.size()) {
    throw ValidationError("length_mismatch", "scores and labels differ in length");
  }
  if (raw_scores.size() < 2) {
    throw FitError("too_few_samples", "calibrator fit needs >= 2 samples, got " +
                                          std::to_string(raw_scores.size()));
  }
  if (!(ridge_lambda >= 0.0)) {
    throw ValidationError("out_of_range", "ridge_lambda must be >= 0");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (int y : labels) {
    (y == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw FitError("degenerate_labels",
                   "degenerate labels: calibrator fit needs both classes");
  }

  const std::size_t n = raw_scores.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(raw_scores[i] >= 0.0) || !(raw_scores[i] <= 1.0)) {
      throw ValidationError("out_of_range",
                            "raw score " + format_double(raw_scores[i]) +
                                " outside [0,1]");
    }
    x[i] = logit(clamp_prob(raw_scores[i], epsilon));
  }

  auto objective = [&](double a, double b) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = a * x[i] + b;
      ll += labels[i] == 1 ? log_sigmoid(z) : log_sigmoid(-z);
    }
    return ll - 0.5 * ridge_lambda * a * a;
  };

  double a = 1.0;
  double b = 0.0;
  double current = objective(a, b);
  int iterations = 0;
  bool converged = false;

  for (; iterations < kMaxNewtonIterations; ++iterations) {
    double grad_a = -ridge_lambda * a;
    double grad_b = 0.0;
    double h_aa = ridge_lambda;
    double h_ab = 0.0;
    double h_bb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mu = sigmoid(a * x[i] + b);
      double r = static_cast<double>(labels[i]) - mu;
      double w = mu * (1.0 - mu);
      grad_a += r * x[i];
      grad_b += r;
      h_aa += w * x[i] * x[i];
      h_ab += w * x[i];
      h_bb += w;
    }
    if (!std::isfinite(grad_a) || !std::isfinite(grad_b) ||
        !std::isfinite(current)) {
      throw FitError("numerical_failure",
                     "numerical failure in calibrator fit at iteration " +
                         std::to_string(iterations));
    }
    if (std::max(std::abs(grad_a), std::abs(grad_b)) < kGradientTolerance) {
      converged = true;
      break;
    }

    double det = h_aa * h_bb - h_ab * h_ab;
    if (!(det > 0.0) || !std::isfinite(det)) {
      throw FitError("numerical_failure",
                     "numerical failure in calibrator fit at iteration " +
                         std::to_string(iterations) + " (singular Hessian)");
    }
    double step_a = (h_bb * grad_a - h_ab * grad_b) / det;
    double step_b = (h_aa * grad_b - h_ab * grad_a) / det;

    // Damping: halve the step until the objective does not decrease.
    double t = 1.0;
    double next = objective(a + step_a, b + step_b);
    int halvings = 0;
    while (!(next >= current) && halvings < 60) {
      t *= 0.5;
      next = objective(a + t * step_a, b + t * step_b);
      ++halvings;
    }
    if (!std::isfinite(next)) {
      throw FitError("numerical_failure",
                     "numerical failure in calibrator fit at iteration " +
                         std::to_string(iterations));
    }
    if (!(next >= current)) {
      ++iterations;
      break;  // damping found no ascent direction
    }
    bool stalled = next == current;
    a += t * step_a;
    b += t * step_b;
    current = next;
    if (stalled) {
      ++iterations;
      break;  // no representable improvement left
    }
  }

  if (!converged) {
    // Honest convergence flag: measure the gradient at the final point.
    double grad_a = -ridge_lambda * a;
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mu = sigmoid(a * x[i] + b);
      double r = static_cast<double>(labels[i]) - mu;
      grad_a += r * x[i];
      grad_b += r;
    }
    converged = std::max(std::abs(grad_a), std::abs(grad_b)) < kGradientTolerance;
  }

  CalibratorFitReport report;
  report.a = a;
  report.b = b;
  report.n_iterations = iterations;
  report.final_log_likelihood =
      calibrator_log_likelihood(a, b, raw_scores, labels, epsilon);
  report.converged = converged;
  report.ridge_lambda = ridge_lambda;
  return report;
}

ScoreMatrix build_score_matrix(std::span<const PatientScore> patient_scores,
                               const ValidatedDataset& dataset,
                               const std::vector<Modality>& configuration,
                               Split split) {
  if (configuration.empty()) {
    throw ValidationError("no_modalities", "empty configuration");
  }
  std::map<std::pair<std::string, std::string>, double> by_key;
  std::set<std::string> scored_patients;
  for (const PatientScore& ps : patient_scores) {
    by_key[{ps.patient_id, ps.modality.name}] = ps.score;
    scored_patients.insert(ps.patient_id);
  }

  ScoreMatrix matrix;
  matrix.modalities = configuration;
  for (const LabelRecord& rec : dataset.labels()) {
    if (dataset.split_of(rec.patient_id) != split) continue;
    // Chunkless patients were warned about at validation and are excluded;
    // a partially scored patient missing a configured modality is an error.
    if (!scored_patients.contains(rec.patient_id)) continue;
    std::vector<double> row;
    row.reserve(configuration.size());
    for (const Modality& m : configuration) {
      auto it = by_key.find({rec.patient_id, m.name});
      if (it == by_key.end()) {
        throw ValidationError("missing_modality_score",
                              "patient " + rec.patient_id +
                                  " has no score for configured modality '" +
                                  m.name + "'");
      }
      row.push_back(it->second);
    }
    matrix.patient_ids.push_back(rec.patient_id);
    matrix.scores.push_back(std::move(row));
    matrix.labels.push_back(rec.label);
  }
  return matrix;
}

std::vector<std::vector<double>> enumerate_simplex_weights(
    std::size_t n_modalities, double grid_step) {
  if (n_modalities == 0) {
    throw ValidationError("no_modalities", "empty grid: no modalities");
  }
  if (!(grid_step > 0.0) || grid_step > 1.0) {
    throw ValidationError("out_of_range", "grid_step must be in (0, 1], got " +
                                              format_double(grid_step));
  }
  int k = static_cast<int>(std::lround(1.0 / grid_step));
  if (k < 1 || std::abs(static_cast<double>(k) * grid_step - 1.0) > 1e-9) {
    throw ValidationError("out_of_range",
                          "grid_step must divide 1 exactly, got " +
                              format_double(grid_step));
  }
  std::vector<std::vector<double>> grid;
  std::vector<int> counts(n_modalities, 0);
  simplex_recurse(0, k, k, counts, grid);
  return grid;
}

std::vector<double> fit_fusion_weights(const ScoreMatrix& fit_scores,
                                       double grid_step) {
  const std::size_t m = fit_scores.modalities.size();
  if (m == 0) {
    throw ValidationError("no_modalities", "empty grid: no modalities");
  }
  if (fit_scores.scores.empty()) {
    throw FitError("degenerate_labels", "no fit-split patients");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (int y : fit_scores.labels) {
    (y == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw FitError("degenerate_labels",
                   "degenerate labels: weight search needs both classes");
  }

  const auto grid = enumerate_simplex_weights(m, grid_step);
  const std::size_t n = fit_scores.scores.size();
  std::vector<double> fused(n);

  std::vector<double> best_weights;
  double best_auroc = -1.0;
  double best_entropy = -1.0;
  for (const auto& weights : grid) {
    for (std::size_t p = 0; p < n; ++p) {
      double v = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        v += weights[j] * fit_scores.scores[p][j];
      }
      fused[p] = v;
    }
    double candidate_auroc = auroc(fused, fit_scores.labels);
    double candidate_entropy = weight_entropy(weights);
    bool better = false;
    if (candidate_auroc > best_auroc) {
      better = true;
    } else if (candidate_auroc == best_auroc) {
      if (candidate_entropy > best_entropy) {
        better = true;
      } else if (candidate_entropy == best_entropy &&
                 std::lexicographical_compare(weights.begin(), weights.end(),
                                              best_weights.begin(),
                                              best_weights.end())) {
        better = true;
      }
    }
    if (better) {
      best_weights = weights;
      best_auroc = candidate_auroc;
      best_entropy = candidate_entropy;
    }
  }
  return best_weights;
}

FusionFitResult fit_fusion_detailed(const ScoreMatrix& fit_scores,
                                    double grid_step, double ridge_lambda,
                                    double epsilon) {
  FusionFitResult result;
  result.spec.modalities = fit_scores.modalities;
  result.spec.weights = fit_fusion_weights(fit_scores, grid_step);
  result.spec.epsilon = epsilon;
  result.spec.grid_step = grid_step;
  result.spec.ridge_lambda = ridge_lambda;

  std::vector<double> fused(fit_scores.scores.size());
  for (std::size_t p = 0; p < fit_scores.scores.size(); ++p) {
    fused[p] = fuse_raw(fit_scores.scores[p], result.spec.weights);
  }
  result.calibrator = fit_calibrator(fused, fit_scores.labels, ridge_lambda, epsilon);
  result.spec.a = result.calibrator.a;
  result.spec.b = result.calibrator.b;
  return result;
}

FusionSpec fit_fusion(const ScoreMatrix& fit_scores, double grid_step,
                      double ridge_lambda, double epsilon) {
  return fit_fusion_detailed(fit_scores, grid_step, ridge_lambda, epsilon).spec;
}

double predict_fused(const FusionSpec& spec, std::span<const double> scores) {
  double raw = fuse_raw(scores, spec.weights);
  return apply_calibrator(spec.a, spec.b, raw, spec.epsilon);
}

std::vector<double> predict_matrix(const FusionSpec& spec,
                                   const ScoreMatrix& matrix) {
  if (matrix.modalities != spec.modalities) {
    throw ValidationError("modality_mismatch",
                          "matrix modalities do not match the fusion spec");
  }
  std::vector<double> out;
  out.reserve(matrix.scores.size());
  for (const auto& row : matrix.scores) {
    out.push_back(predict_fused(spec, row));
  }
  return out;
}

nlohmann::ordered_json fusion_spec_to_json(const FusionSpec& spec) {
  nlohmann::ordered_json j;
  j["modalities"] = nlohmann::ordered_json::array();
  for (const Modality& m : spec.modalities) {
    j["modalities"].push_back(m.name);
  }
  j["weights"] = spec.weights;
  j["calibrator"] = {{"a", spec.a}, {"b", spec.b}};
  j["epsilon"] = spec.epsilon;
  j["grid_step"] = spec.grid_step;
  j["ridge_lambda"] = spec.ridge_lambda;
  return j;
}

FusionSpec fusion_spec_from_json(const nlohmann::json& j) {
  FusionSpec spec;
  try {
    for (const auto& name : j.at("modalities")) {
      spec.modalities.push_back(Modality{name.get<std::string>()});
    }
    spec.weights = j.at("weights").get<std::vector<double>>();
    spec.a = j.at("calibrator").at("a").get<double>();
    spec.b = j.at("calibrator").at("b").get<double>();
    spec.epsilon = j.at("epsilon").get<double>();
    spec.grid_step = j.at("grid_step").get<double>();
    spec.ridge_lambda = j.at("ridge_lambda").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad_fusion_spec",
                          std::string("malformed fusion spec JSON: ") + e.what());
  }
  if (spec.modalities.size() != spec.weights.size()) {
    throw ValidationError("bad_fusion_spec",
                          "fusion spec modalities and weights differ in length");
  }
  check_weights(spec.weights);
  check_epsilon(spec.epsilon);
  return spec;
}

}  // namespace fuseval
