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
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fuseval {

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;

  long total() const noexcept { return tp + fp + tn + fn; }
};

// Prediction rule: positive iff score >= threshold.
ConfusionCounts confusion_at_threshold(std::span<const double> scores,
                                       std::span<const int> labels,
                                       double threshold);

// Harmonic mean of precision and recall; 0 when both are 0.
double f1_from_pr(double precision, double recall);

// Per-class metrics in the control (C) / depressed (D) layout. For the C
// class the negatives are the target: precision = tn/(tn+fn), recall =
// tn/(tn+fp). Zero-denominator terms are 0 by convention and listed in
// `degenerate`.
struct ClassMetrics {
  double precision_c = 0.0;
  double precision_d = 0.0;
  double recall_c = 0.0;
  double recall_d = 0.0;
  double f1_c = 0.0;
  double f1_d = 0.0;
  double macro_f1 = 0.0;
  std::vector<std::string> degenerate;
};

ClassMetrics class_metrics(const ConfusionCounts& counts);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// ROC vertices from (0,0) to (1,1), one per distinct score (ties grouped),
// plus the AUROC as the Mann-Whitney statistic (wins + 0.5*ties) /
// (n_pos * n_neg). The trapezoidal area under `points` equals `auroc`.
struct RocResult {
  std::vector<RocPoint> points;
  double auroc = 0.0;
};

RocResult roc_auroc(std::span<const double> scores, std::span<const int> labels);

// AUROC only; same computation as roc_auroc.
double auroc(std::span<const double> scores, std::span<const int> labels);

using MetricFn =
    std::function<double(std::span<const double>, std::span<const int>)>;

struct BootstrapCI {
  double point_estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  int n_resamples = 0;
  std::uint64_t seed = 0;
  long n_degenerate_discarded = 0;
};

// Percentile bootstrap over patient resamples. Single-class resamples are
// discarded and redrawn; total draws are capped at 10 * n_resamples.
// Resample r uses the substream derive(derive(seed, tag), r), so the result
// is identical for any n_threads and any execution order.
BootstrapCI bootstrap_ci(const MetricFn& metric, std::span<const double> scores,
                         std::span<const int> labels, int n_resamples,
                         std::uint64_t seed, double level = 0.95,
                         int n_threads = 1);

// Vertically averaged bootstrap ROC band at fixed FPR grid points.
struct RocBand {
  std::vector<double> fpr;
  std::vector<double> tpr_mean;
  std::vector<double> tpr_lower;
  std::vector<double> tpr_upper;
  double level = 0.95;
};

RocBand bootstrap_roc_band(std::span<const double> scores,
                           std::span<const int> labels, int n_resamples,
                           std::uint64_t seed, double level = 0.95,
                           int grid_points = 101);

// Table-2-style report row for one modality configuration.
struct MetricsRow {
  std::string configuration;
  ClassMetrics cls;
  double auroc = 0.0;
  double auroc_ci_low = 0.0;
  double auroc_ci_high = 0.0;
};

// Header: configuration,P_C,P_D,R_C,R_D,F1_C,F1_D,macro_F1,AUROC,
//         AUROC_CI_low,AUROC_CI_high
std::string metrics_csv(std::span<const MetricsRow> rows);

}  // namespace fuseval
