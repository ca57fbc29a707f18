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

#include "fuseval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "fuseval/csv.hpp"
#include "fuseval/errors.hpp"
#include "fuseval/numeric.hpp"
#include "fuseval/rng.hpp"

namespace fuseval {

namespace {

void check_scored_sample(std::span<const double> scores,
                         std::span<const int> labels) {
  if (scores.empty()) {
    throw ValidationError("empty_input", "no scored patients");
  }
  if (scores.size() != labels.size()) {
    throw ValidationError("length_mismatch",
                          "scores (" + std::to_string(scores.size()) +
                              ") and labels (" + std::to_string(labels.size()) +
                              ") differ in length");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw ValidationError("out_of_range", "non-finite score");
    }
  }
  for (int y : labels) {
    if (y != 0 && y != 1) {
      throw ValidationError("out_of_range",
                            "label " + std::to_string(y) + " is not binary");
    }
  }
}

void require_both_classes(std::span<const int> labels, const std::string& what) {
  bool has_pos = false;
  bool has_neg = false;
  for (int y : labels) {
    (y == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw ValidationError("degenerate_labels", what);
  }
}

// TPR at a given FPR on the piecewise-linear ROC polyline: the highest tpr
// the curve attains at that abscissa (vertical segments take their top).
double roc_tpr_at(const std::vector<RocPoint>& points, double fpr) {
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const RocPoint& a = points[i];
    const RocPoint& b = points[i + 1];
    if (fpr < a.fpr || fpr > b.fpr) continue;
    if (b.fpr == a.fpr) {
      best = std::max(best, std::max(a.tpr, b.tpr));
    } else {
      double t = (fpr - a.fpr) / (b.fpr - a.fpr);
      best = std::max(best, a.tpr + t * (b.tpr - a.tpr));
    }
  }
  return best;
}

struct ResampleDraw {
  std::vector<std::size_t> indices;
  long n_discarded = 0;
};

// Deterministic resample r: attempts 0,1,... each seeded from
// (seed, r, attempt) until both classes appear.
ResampleDraw draw_resample(std::span<const int> labels, std::uint64_t seed,
                           std::uint64_t resample_index, long attempt_cap) {
  const std::size_t n = labels.size();
  ResampleDraw draw;
  draw.indices.resize(n);
  std::uint64_t resample_seed = SplitMix64::derive(seed, resample_index);
  for (long attempt = 0;; ++attempt) {
    if (attempt >= attempt_cap) {
      throw ValidationError("bootstrap_attempt_cap",
                            "bootstrap resample attempt cap exceeded");
    }
    SplitMix64 rng(SplitMix64::derive(resample_seed, static_cast<std::uint64_t>(attempt)));
    bool has_pos = false;
    bool has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t idx = static_cast<std::size_t>(rng.below(n));
      draw.indices[i] = idx;
      (labels[idx] == 1 ? has_pos : has_neg) = true;
    }
    if (has_pos && has_neg) {
      return draw;
    }
    ++draw.n_discarded;
  }
}

}  // namespace

ConfusionCounts confusion_at_threshold(std::span<const double> scores,
                                       std::span<const int> labels,
                                       double threshold) {
  check_scored_sample(scores, labels);
  ConfusionCounts counts;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    bool predicted_positive = scores[i] >= threshold;
    if (labels[i] == 1) {
      (predicted_positive ? counts.tp : counts.fn) += 1;
    } else {
      (predicted_positive ? counts.fp : counts.tn) += 1;
    }
  }
  return counts;
}

double f1_from_pr(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

ClassMetrics class_metrics(const ConfusionCounts& counts) {
  if (counts.total() <= 0) {
    throw ValidationError("empty_input", "confusion counts are empty");
  }
  ClassMetrics m;
  auto ratio = [&m](long num, long den, const char* name) {
    if (den == 0) {
      m.degenerate.push_back(name);
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision_d = ratio(counts.tp, counts.tp + counts.fp, "precision_d");
  m.recall_d = ratio(counts.tp, counts.tp + counts.fn, "recall_d");
  m.precision_c = ratio(counts.tn, counts.tn + counts.fn, "precision_c");
  m.recall_c = ratio(counts.tn, counts.tn + counts.fp, "recall_c");
  m.f1_c = f1_from_pr(m.precision_c, m.recall_c);
  m.f1_d = f1_from_pr(m.precision_d, m.recall_d);
  m.macro_f1 = (m.f1_c + m.f1_d) / 2.0;
  return m;
}

RocResult roc_auroc(std::span<const double> scores, std::span<const int> labels) {
  check_scored_sample(scores, labels);
  require_both_classes(labels, "AUROC undefined: labels contain a single class");

  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  long n_pos = 0;
  for (int y : labels) n_pos += y;
  const long n_neg = static_cast<long>(n) - n_pos;

  RocResult result;
  result.points.push_back({0.0, 0.0});
  long tp = 0;
  long fp = 0;
  double pair_score = 0.0;  // wins + 0.5 * ties, accumulated per tie group
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    long group_pos = 0;
    long group_neg = 0;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? group_pos : group_neg) += 1;
      ++j;
    }
    // Negatives ranked strictly below this group's positives are all
    // still unseen: (n_neg - fp - group_neg) per positive.
    pair_score += static_cast<double>(group_pos) *
                      static_cast<double>(n_neg - fp - group_neg) +
                  0.5 * static_cast<double>(group_pos) *
                      static_cast<double>(group_neg);
    tp += group_pos;
    fp += group_neg;
    result.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                             static_cast<double>(tp) / static_cast<double>(n_pos)});
    i = j;
  }
  result.auroc =
      pair_score / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
  return result;
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
  return roc_auroc(scores, labels).auroc;
}

BootstrapCI bootstrap_ci(const MetricFn& metric, std::span<const double> scores,
                         std::span<const int> labels, int n_resamples,
                         std::uint64_t seed, double level, int n_threads) {
  check_scored_sample(scores, labels);
  require_both_classes(labels, "bootstrap undefined: single-class sample");
  if (n_resamples < 1) {
    throw ValidationError("out_of_range", "n_resamples must be >= 1, got " +
                                              std::to_string(n_resamples));
  }
  if (!(level > 0.0) || !(level < 1.0)) {
    throw ValidationError("out_of_range",
                          "level must be in (0,1), got " + format_double(level));
  }

  const long attempt_cap = 10L * n_resamples;
  const std::size_t n = scores.size();
  std::vector<double> stats(static_cast<std::size_t>(n_resamples));
  std::vector<long> discarded(static_cast<std::size_t>(n_resamples), 0);
  std::mutex failure_mutex;
  std::exception_ptr failure;

  auto run_range = [&](std::size_t begin, std::size_t end) {
    std::vector<double> rs(n);
    std::vector<int> rl(n);
    try {
      for (std::size_t r = begin; r < end; ++r) {
        ResampleDraw draw = draw_resample(labels, seed, r, attempt_cap);
        for (std::size_t i = 0; i < n; ++i) {
          rs[i] = scores[draw.indices[i]];
          rl[i] = labels[draw.indices[i]];
        }
        stats[r] = metric(rs, rl);
        discarded[r] = draw.n_discarded;
      }
    } catch (...) {
      std::scoped_lock lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  const std::size_t total = static_cast<std::size_t>(n_resamples);
  if (n_threads <= 1) {
    run_range(0, total);
  } else {
    std::vector<std::thread> workers;
    std::size_t per = (total + static_cast<std::size_t>(n_threads) - 1) /
                      static_cast<std::size_t>(n_threads);
    for (int t = 0; t < n_threads; ++t) {
      std::size_t begin = static_cast<std::size_t>(t) * per;
      std::size_t end = std::min(total, begin + per);
      if (begin >= end) break;
      workers.emplace_back(run_range, begin, end);
    }
    for (auto& w : workers) w.join();
  }
  if (failure) std::rethrow_exception(failure);

  BootstrapCI ci;
  ci.level = level;
  ci.n_resamples = n_resamples;
  ci.seed = seed;
  ci.n_degenerate_discarded =
      std::accumulate(discarded.begin(), discarded.end(), 0L);
  if (static_cast<long>(total) + ci.n_degenerate_discarded > attempt_cap) {
    throw ValidationError("bootstrap_attempt_cap",
                          "bootstrap resample attempt cap exceeded");
  }
  ci.point_estimate = metric(scores, labels);

  std::sort(stats.begin(), stats.end());
  double alpha = (1.0 - level) / 2.0;
  ci.lower = quantile_sorted(stats, alpha);
  ci.upper = quantile_sorted(stats, 1.0 - alpha);
  return ci;
}

RocBand bootstrap_roc_band(std::span<const double> scores,
                           std::span<const int> labels, int n_resamples,
                           std::uint64_t seed, double level, int grid_points) {
  check_scored_sample(scores, labels);
  require_both_classes(labels, "ROC band undefined: single-class sample");
  if (n_resamples < 1 || grid_points < 2) {
    throw ValidationError("out_of_range", "invalid ROC band parameters");
  }

  const std::size_t n = scores.size();
  const long attempt_cap = 10L * n_resamples;
  const std::uint64_t band_seed = SplitMix64::derive(seed, stream_tag("roc_band"));

  RocBand band;
  band.level = level;
  band.fpr.resize(static_cast<std::size_t>(grid_points));
  for (int g = 0; g < grid_points; ++g) {
    band.fpr[static_cast<std::size_t>(g)] =
        static_cast<double>(g) / static_cast<double>(grid_points - 1);
  }

  // tprs[g][r]: resample r's TPR at grid point g.
  std::vector<std::vector<double>> tprs(
      band.fpr.size(), std::vector<double>(static_cast<std::size_t>(n_resamples)));
  std::vector<double> rs(n);
  std::vector<int> rl(n);
  for (int r = 0; r < n_resamples; ++r) {
    ResampleDraw draw = draw_resample(labels, band_seed,
                                      static_cast<std::uint64_t>(r), attempt_cap);
    for (std::size_t i = 0; i < n; ++i) {
      rs[i] = scores[draw.indices[i]];
      rl[i] = labels[draw.indices[i]];
    }
    RocResult roc = roc_auroc(rs, rl);
    for (std::size_t g = 0; g < band.fpr.size(); ++g) {
      tprs[g][static_cast<std::size_t>(r)] = roc_tpr_at(roc.points, band.fpr[g]);
    }
  }

  double alpha = (1.0 - level) / 2.0;
  band.tpr_mean.resize(band.fpr.size());
  band.tpr_lower.resize(band.fpr.size());
  band.tpr_upper.resize(band.fpr.size());
  for (std::size_t g = 0; g < band.fpr.size(); ++g) {
    band.tpr_mean[g] = compensated_mean(tprs[g]);
    std::sort(tprs[g].begin(), tprs[g].end());
    band.tpr_lower[g] = quantile_sorted(tprs[g], alpha);
    band.tpr_upper[g] = quantile_sorted(tprs[g], 1.0 - alpha);
  }
  return band;
}

std::string metrics_csv(std::span<const MetricsRow> rows) {
  std::string out =
      "configuration,P_C,P_D,R_C,R_D,F1_C,F1_D,macro_F1,AUROC,"
      "AUROC_CI_low,AUROC_CI_high\n";
  for (const MetricsRow& row : rows) {
    out += row.configuration;
    for (double v : {row.cls.precision_c, row.cls.precision_d, row.cls.recall_c,
                     row.cls.recall_d, row.cls.f1_c, row.cls.f1_d,
                     row.cls.macro_f1, row.auroc, row.auroc_ci_low,
                     row.auroc_ci_high}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace fuseval
