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

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace fuseval {

struct ReliabilityBin {
  double lo = 0.0;
  double hi = 0.0;
  long count = 0;
  double mean_predicted = 0.0;
  double observed_frequency = 0.0;
};

enum class BinningStrategy { kEqualWidth, kQuantile };

const char* binning_strategy_name(BinningStrategy strategy);
BinningStrategy parse_binning_strategy(const std::string& name);

// Printed in reports so the reported number is unambiguous.
inline constexpr const char* kEceFormula =
    "ece = sum_b (count_b / n) * |mean_predicted_b - observed_frequency_b|";

struct CalibrationReport {
  std::vector<ReliabilityBin> bins;
  double ece = 0.0;
  long n_samples = 0;
  BinningStrategy strategy = BinningStrategy::kEqualWidth;
};

// Bins cover [0,1]; interior edges belong to the higher bin and 1.0 to the
// last bin. Quantile binning derives edges from the sample and merges
// duplicate edges, so it may return fewer than n_bins bins.
CalibrationReport reliability_curve(std::span<const double> probs,
                                    std::span<const int> labels, int n_bins = 10,
                                    BinningStrategy strategy = BinningStrategy::kEqualWidth);

enum class BinVerdict { kUnderconfident, kOverconfident, kCalibrated };

const char* bin_verdict_name(BinVerdict verdict);

struct BinJudgement {
  std::size_t bin_index = 0;
  double lo = 0.0;
  double hi = 0.0;
  double mean_predicted = 0.0;
  double observed_frequency = 0.0;
  BinVerdict verdict = BinVerdict::kCalibrated;
};

struct CalibrationInterpretation {
  std::vector<BinJudgement> judgements;  // non-empty bins only
  std::string summary;                   // one line per verdict region
};

// observed > predicted beyond the dead band reads as underconfident,
// observed < predicted as overconfident.
CalibrationInterpretation interpret_calibration(const CalibrationReport& report,
                                                double dead_band = 0.02);

// Header: lo,hi,count,mean_predicted,observed_frequency
void write_reliability_csv(std::ostream& out, const CalibrationReport& report);

}  // namespace fuseval
