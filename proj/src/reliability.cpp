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

#include "fuseval/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>

#include "fuseval/csv.hpp"
#include "fuseval/errors.hpp"
#include "fuseval/numeric.hpp"

namespace fuseval {

const char* binning_strategy_name(BinningStrategy strategy) {
  switch (strategy) {
    case BinningStrategy::kEqualWidth:
      return "equal_width";
    case BinningStrategy::kQuantile:
      return "quantile";
  }
  return "unknown";
}

BinningStrategy parse_binning_strategy(const std::string& name) {
  if (name == "equal_width") return BinningStrategy::kEqualWidth;
  if (name == "quantile") return BinningStrategy::kQuantile;
  throw ValidationError("bad_binning_strategy",
                        "unknown binning strategy '" + name +
                            "' (expected equal_width or quantile)");
}

namespace {

// Interior edges ascending; an edge value itself belongs to the bin above it,
// except that 1.0 stays in the last bin.
std::size_t bin_of(double p, const std::vector<double>& interior_edges) {
  auto it = std::upper_bound(interior_edges.begin(), interior_edges.end(), p);
  std::size_t idx = static_cast<std::size_t>(it - interior_edges.begin());
  // p exactly on an edge: upper_bound already sends it up. p == 1.0 lands
  // past the last interior edge, i.e. in the final bin, as required.
  return idx;
}

std::vector<double> equal_width_edges(int n_bins) {
  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(n_bins - 1));
  for (int j = 1; j < n_bins; ++j) {
    edges.push_back(static_cast<double>(j) / static_cast<double>(n_bins));
  }
  return edges;
}

std::vector<double> quantile_edges(std::span<const double> probs, int n_bins) {
  std::vector<double> sorted(probs.begin(), probs.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(n_bins - 1));
  for (int j = 1; j < n_bins; ++j) {
    double q = static_cast<double>(j) / static_cast<double>(n_bins);
    edges.push_back(quantile_sorted(sorted, q));
  }
  // Repeated sample values produce duplicate edges; merging them keeps each
  // bin's interval non-degenerate.
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  // An edge equal to an endpoint of [0,1] would create an empty extreme bin.
  while (!edges.empty() && edges.front() <= 0.0) edges.erase(edges.begin());
  while (!edges.empty() && edges.back() >= 1.0) edges.pop_back();
  return edges;
}

}  // namespace

CalibrationReport reliability_curve(std::span<const double> probs,
                                    std::span<const int> labels, int n_bins,
                                    BinningStrategy strategy) {
  if (probs.size() != labels.size()) {
    throw ValidationError("size_mismatch",
                          "reliability_curve: probs and labels differ in length");
  }
  if (probs.empty()) {
    throw ValidationError("empty_input", "reliability_curve: no samples");
  }
  if (n_bins < 2) {
    throw ValidationError("bad_bin_count", "reliability_curve: n_bins must be >= 2");
  }
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("score_out_of_range",
                            "reliability_curve: probability outside [0, 1]");
    }
  }
  for (int y : labels) {
    if (y != 0 && y != 1) {
      throw ValidationError("bad_label", "reliability_curve: labels must be 0 or 1");
    }
  }

  std::vector<double> edges = strategy == BinningStrategy::kEqualWidth
                                  ? equal_width_edges(n_bins)
                                  : quantile_edges(probs, n_bins);
  const std::size_t total_bins = edges.size() + 1;

  std::vector<long> counts(total_bins, 0);
  std::vector<NeumaierSum> pred_sums(total_bins);
  std::vector<long> pos_counts(total_bins, 0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    std::size_t b = bin_of(probs[i], edges);
    ++counts[b];
    pred_sums[b].add(probs[i]);
    pos_counts[b] += labels[i];
  }

  CalibrationReport report;
  report.n_samples = static_cast<long>(probs.size());
  report.strategy = strategy;
  report.bins.reserve(total_bins);
  NeumaierSum ece_sum;
  const double n = static_cast<double>(probs.size());
  for (std::size_t b = 0; b < total_bins; ++b) {
    ReliabilityBin bin;
    bin.lo = b == 0 ? 0.0 : edges[b - 1];
    bin.hi = b + 1 == total_bins ? 1.0 : edges[b];
    bin.count = counts[b];
    if (counts[b] > 0) {
      bin.mean_predicted = pred_sums[b].value() / static_cast<double>(counts[b]);
      bin.observed_frequency =
          static_cast<double>(pos_counts[b]) / static_cast<double>(counts[b]);
      ece_sum.add(static_cast<double>(counts[b]) / n *
                  std::abs(bin.mean_predicted - bin.observed_frequency));
    }
    report.bins.push_back(bin);
  }
  report.ece = ece_sum.value();
  return report;
}

const char* bin_verdict_name(BinVerdict verdict) {
  switch (verdict) {
    case BinVerdict::kUnderconfident:
      return "underconfident";
    case BinVerdict::kOverconfident:
      return "overconfident";
    case BinVerdict::kCalibrated:
      return "calibrated";
  }
  return "unknown";
}

CalibrationInterpretation interpret_calibration(const CalibrationReport& report,
                                                double dead_band) {
  CalibrationInterpretation out;
  for (std::size_t b = 0; b < report.bins.size(); ++b) {
    const ReliabilityBin& bin = report.bins[b];
    if (bin.count == 0) continue;
    BinJudgement judgement;
    judgement.bin_index = b;
    judgement.lo = bin.lo;
    judgement.hi = bin.hi;
    judgement.mean_predicted = bin.mean_predicted;
    judgement.observed_frequency = bin.observed_frequency;
    double gap = bin.observed_frequency - bin.mean_predicted;
    if (gap > dead_band) {
      judgement.verdict = BinVerdict::kUnderconfident;
    } else if (gap < -dead_band) {
      judgement.verdict = BinVerdict::kOverconfident;
    } else {
      judgement.verdict = BinVerdict::kCalibrated;
    }
    out.judgements.push_back(judgement);
  }

  std::ostringstream text;
  for (const BinJudgement& j : out.judgements) {
    text << '[' << format_double(j.lo) << ", " << format_double(j.hi) << "] "
         << bin_verdict_name(j.verdict) << " (predicted "
         << format_double(j.mean_predicted) << ", observed "
         << format_double(j.observed_frequency) << ")\n";
  }
  out.summary = text.str();
  return out;
}

void write_reliability_csv(std::ostream& out, const CalibrationReport& report) {
  out << "lo,hi,count,mean_predicted,observed_frequency\n";
  for (const ReliabilityBin& bin : report.bins) {
    out << format_double(bin.lo) << ',' << format_double(bin.hi) << ','
        << bin.count << ',' << format_double(bin.mean_predicted) << ','
        << format_double(bin.observed_frequency) << '\n';
  }
}

}  // namespace fuseval
