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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <doctest.h>

#include "fuseval/errors.hpp"
#include "fuseval/metrics.hpp"
#include "fuseval/numeric.hpp"
#include "fuseval/rng.hpp"

using namespace fuseval;

namespace {

// O(n^2) pairwise AUROC oracle: (wins + 0.5 * ties) / (n_pos * n_neg).
double pairwise_auroc(const std::vector<double>& scores,
                      const std::vector<int>& labels) {
  double numer = 0.0;
  long n_pos = 0;
  long n_neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    ++n_pos;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      if (scores[i] > scores[j]) {
        numer += 1.0;
      } else if (scores[i] == scores[j]) {
        numer += 0.5;
      }
    }
  }
  for (int y : labels) n_neg += (y == 0);
  return numer / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// Random instance with both classes present.
void random_instance(SplitMix64& rng, int max_n, std::vector<double>& scores,
                     std::vector<int>& labels) {
  int n = rng.uniform_int(2, max_n);
  scores.clear();
  labels.clear();
  for (int i = 0; i < n; ++i) {
    // Coarse quantization forces plenty of score ties.
    double s = rng.bernoulli(0.4)
                   ? static_cast<double>(rng.uniform_int(0, 10)) / 10.0
                   : rng.uniform();
    scores.push_back(s);
    labels.push_back(rng.bernoulli(0.4) ? 1 : 0);
  }
  labels[0] = 1;
  labels[1] = 0;
}

double trapezoid_area(const std::vector<RocPoint>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) *
            (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

}  // namespace

TEST_CASE("confusion_at_threshold hand tally") {
  ConfusionCounts c = confusion_at_threshold(
      std::vector<double>{0.9, 0.6, 0.4, 0.2}, std::vector<int>{1, 1, 0, 1}, 0.5);
  CHECK(c.tp == 2);
  CHECK(c.fp == 0);
  CHECK(c.tn == 1);
  CHECK(c.fn == 1);
  CHECK(c.total() == 4);
}

TEST_CASE("threshold boundary counts as a positive prediction") {
  ConfusionCounts c = confusion_at_threshold(std::vector<double>{0.5},
                                             std::vector<int>{1}, 0.5);
  CHECK(c.tp == 1);
  CHECK(c.fn == 0);
}

TEST_CASE("confusion_at_threshold saturated case and input checks") {
  ConfusionCounts c = confusion_at_threshold(
      std::vector<double>{1.0, 1.0, 1.0}, std::vector<int>{1, 1, 1}, 0.5);
  CHECK(c.tp == 3);
  CHECK(c.fp + c.tn + c.fn == 0);
  CHECK_THROWS_AS(confusion_at_threshold(std::vector<double>{},
                                         std::vector<int>{}, 0.5),
                  ValidationError);
  CHECK_THROWS_AS(confusion_at_threshold(std::vector<double>{0.5},
                                         std::vector<int>{1, 0}, 0.5),
                  ValidationError);
}

TEST_CASE("class_metrics reproduces published-style rows") {
  // P_C = R_C = 0.66 and P_D = R_D = 0.21 give f1 == precision == recall per
  // class, so macro-F1 is their midpoint 0.435.
  CHECK(f1_from_pr(0.66, 0.66) == doctest::Approx(0.66).epsilon(1e-12));
  CHECK(f1_from_pr(0.21, 0.21) == doctest::Approx(0.21).epsilon(1e-12));
  CHECK((f1_from_pr(0.66, 0.66) + f1_from_pr(0.21, 0.21)) / 2.0 ==
        doctest::Approx(0.435).epsilon(1e-12));
  // Text row: P_C 0.76, R_C 0.69 -> F1 0.723...
  CHECK(f1_from_pr(0.76, 0.69) == doctest::Approx(0.7233103448275862).epsilon(1e-12));
  CHECK(f1_from_pr(0.0, 0.0) == 0.0);
}

TEST_CASE("class_metrics degenerate counts use the zero convention and flag it") {
  ConfusionCounts c;
  c.tn = 5;  // no positives anywhere: tp = fp = fn = 0
  ClassMetrics m = class_metrics(c);
  CHECK(m.precision_d == 0.0);
  CHECK(m.recall_d == 0.0);
  CHECK(m.f1_d == 0.0);
  CHECK(m.precision_c == 1.0);
  CHECK(m.recall_c == 1.0);
  CHECK(!m.degenerate.empty());
  bool flags_d_precision = false;
  for (const std::string& term : m.degenerate) {
    if (term.find("precision_d") != std::string::npos) flags_d_precision = true;
  }
  CHECK(flags_d_precision);
}

TEST_CASE("class_metrics symmetric layout") {
  ConfusionCounts c;
  c.tp = 3;
  c.fp = 1;
  c.tn = 4;
  c.fn = 2;
  ClassMetrics m = class_metrics(c);
  CHECK(m.precision_d == doctest::Approx(3.0 / 4.0));
  CHECK(m.recall_d == doctest::Approx(3.0 / 5.0));
  CHECK(m.precision_c == doctest::Approx(4.0 / 6.0));
  CHECK(m.recall_c == doctest::Approx(4.0 / 5.0));
  CHECK(m.macro_f1 == doctest::Approx((m.f1_c + m.f1_d) / 2.0).epsilon(1e-15));
}

TEST_CASE("roc_auroc worked examples") {
  CHECK(roc_auroc(std::vector<double>{0.1, 0.4, 0.35, 0.8},
                  std::vector<int>{0, 0, 1, 1})
            .auroc == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(roc_auroc(std::vector<double>{0.9, 0.8, 0.2, 0.1},
                  std::vector<int>{1, 1, 0, 0})
            .auroc == 1.0);
  CHECK(roc_auroc(std::vector<double>{0.5, 0.5, 0.5, 0.5},
                  std::vector<int>{1, 0, 1, 0})
            .auroc == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(
      roc_auroc(std::vector<double>{0.5, 0.6}, std::vector<int>{1, 1}),
      ValidationError);
}

TEST_CASE("roc points run from (0,0) to (1,1) monotonically") {
  SplitMix64 rng(stream_tag("roc_shape"));
  std::vector<double> scores;
  std::vector<int> labels;
  for (int round = 0; round < 50; ++round) {
    random_instance(rng, 50, scores, labels);
    RocResult roc = roc_auroc(scores, labels);
    REQUIRE(roc.points.size() >= 2);
    CHECK(roc.points.front().fpr == 0.0);
    CHECK(roc.points.front().tpr == 0.0);
    CHECK(roc.points.back().fpr == 1.0);
    CHECK(roc.points.back().tpr == 1.0);
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
      CHECK(roc.points[i].fpr >= roc.points[i - 1].fpr);
      CHECK(roc.points[i].tpr >= roc.points[i - 1].tpr);
    }
  }
}

TEST_CASE("trapezoidal area equals the pairwise oracle on random instances") {
  SplitMix64 rng(stream_tag("auroc_oracle"));
  std::vector<double> scores;
  std::vector<int> labels;
  for (int round = 0; round < 200; ++round) {
    random_instance(rng, 50, scores, labels);
    RocResult roc = roc_auroc(scores, labels);
    double oracle = pairwise_auroc(scores, labels);
    CHECK(std::abs(roc.auroc - oracle) <= 1e-12);
    CHECK(std::abs(trapezoid_area(roc.points) - roc.auroc) <= 1e-12);
  }
}

TEST_CASE("auroc complement symmetry and monotone-transform invariance") {
  SplitMix64 rng(stream_tag("auroc_symmetry"));
  std::vector<double> scores;
  std::vector<int> labels;
  for (int round = 0; round < 200; ++round) {
    random_instance(rng, 50, scores, labels);
    double base = auroc(scores, labels);

    std::vector<int> flipped(labels);
    for (int& y : flipped) y = 1 - y;
    CHECK(std::abs(auroc(scores, flipped) + base - 1.0) <= 1e-12);

    // Strictly increasing transforms preserve the ranking, ties included.
    std::vector<double> squashed(scores);
    for (double& s : squashed) s = sigmoid(3.0 * s - 1.0);
    CHECK(std::abs(auroc(squashed, labels) - base) <= 1e-12);

    std::vector<double> cubed(scores);
    for (double& s : cubed) s = s * s * s;
    CHECK(std::abs(auroc(cubed, labels) - base) <= 1e-12);
  }
}

TEST_CASE("bootstrap_ci constant statistic collapses to a point") {
  std::vector<double> scores{0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  std::vector<int> labels{1, 0, 1, 0, 1, 0};
  BootstrapCI ci = bootstrap_ci(
      [](std::span<const double> s, std::span<const int> y) {
        return auroc(s, y);
      },
      scores, labels, 200, 42);
  CHECK(ci.point_estimate == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ci.lower == 0.5);
  CHECK(ci.upper == 0.5);
}

TEST_CASE("bootstrap_ci input validation") {
  std::vector<double> scores{0.1, 0.9};
  std::vector<int> labels{0, 1};
  auto metric = [](std::span<const double> s, std::span<const int> y) {
    return auroc(s, y);
  };
  CHECK_THROWS_AS(bootstrap_ci(metric, scores, labels, 0, 1), ValidationError);
  CHECK_THROWS_AS(bootstrap_ci(metric, scores, std::vector<int>{1, 1}, 10, 1),
                  ValidationError);
}

TEST_CASE("bootstrap_ci determinism across thread counts and repeat runs") {
  SplitMix64 rng(stream_tag("bootstrap_threads"));
  std::vector<double> scores;
  std::vector<int> labels;
  random_instance(rng, 20, scores, labels);
  auto metric = [](std::span<const double> s, std::span<const int> y) {
    return auroc(s, y);
  };
  BootstrapCI one = bootstrap_ci(metric, scores, labels, 200, 7, 0.95, 1);
  for (int threads : {2, 3, 8}) {
    BootstrapCI many = bootstrap_ci(metric, scores, labels, 200, 7, 0.95, threads);
    CHECK(many.lower == one.lower);
    CHECK(many.upper == one.upper);
    CHECK(many.n_degenerate_discarded == one.n_degenerate_discarded);
  }
  BootstrapCI rerun = bootstrap_ci(metric, scores, labels, 200, 7, 0.95, 1);
  CHECK(rerun.lower == one.lower);
  CHECK(rerun.upper == one.upper);
}

TEST_CASE("bootstrap_ci brackets the point estimate and the resample median") {
  SplitMix64 rng(stream_tag("bootstrap_contains"));
  std::vector<double> scores;
  std::vector<int> labels;
  for (int round = 0; round < 100; ++round) {
    random_instance(rng, 30, scores, labels);
    BootstrapCI ci = bootstrap_ci(
        [](std::span<const double> s, std::span<const int> y) {
          return auroc(s, y);
        },
        scores, labels, 150, 1000 + static_cast<std::uint64_t>(round));
    CHECK(ci.lower <= ci.upper);
    CHECK(ci.lower >= 0.0);
    CHECK(ci.upper <= 1.0);
    CHECK(ci.lower <= ci.point_estimate + 1e-12);
    CHECK(ci.point_estimate <= ci.upper + 1e-12);
  }
}

TEST_CASE("bootstrap_ci counts discarded degenerate resamples deterministically") {
  // One positive among eight patients: a resample misses it with probability
  // (7/8)^8, so discards must occur over 300 draws.
  std::vector<double> scores{0.9, 0.2, 0.3, 0.1, 0.4, 0.2, 0.6, 0.5};
  std::vector<int> labels{1, 0, 0, 0, 0, 0, 0, 0};
  auto metric = [](std::span<const double> s, std::span<const int> y) {
    return auroc(s, y);
  };
  BootstrapCI ci = bootstrap_ci(metric, scores, labels, 300, 11);
  CHECK(ci.n_degenerate_discarded > 0);
  BootstrapCI again = bootstrap_ci(metric, scores, labels, 300, 11, 0.95, 4);
  CHECK(again.n_degenerate_discarded == ci.n_degenerate_discarded);
  CHECK(again.lower == ci.lower);
  CHECK(again.upper == ci.upper);
}

TEST_CASE("bootstrap roc band shape") {
  SplitMix64 rng(stream_tag("roc_band_test"));
  std::vector<double> scores;
  std::vector<int> labels;
  random_instance(rng, 40, scores, labels);
  RocBand band = bootstrap_roc_band(scores, labels, 100, 5);
  REQUIRE(band.fpr.size() == 101);
  CHECK(band.fpr.front() == 0.0);
  CHECK(band.fpr.back() == 1.0);
  for (std::size_t i = 0; i < band.fpr.size(); ++i) {
    CHECK(band.tpr_lower[i] <= band.tpr_mean[i] + 1e-12);
    CHECK(band.tpr_mean[i] <= band.tpr_upper[i] + 1e-12);
    CHECK(band.tpr_lower[i] >= 0.0);
    CHECK(band.tpr_upper[i] <= 1.0);
  }
  RocBand rerun = bootstrap_roc_band(scores, labels, 100, 5);
  CHECK(rerun.tpr_mean == band.tpr_mean);
}

TEST_CASE("metrics csv layout") {
  MetricsRow row;
  row.configuration = "audio";
  row.cls.precision_c = 0.66;
  row.cls.precision_d = 0.21;
  row.cls.recall_c = 0.66;
  row.cls.recall_d = 0.21;
  row.cls.f1_c = 0.66;
  row.cls.f1_d = 0.21;
  row.cls.macro_f1 = 0.435;
  row.auroc = 0.42;
  row.auroc_ci_low = 0.30;
  row.auroc_ci_high = 0.55;
  std::string csv = metrics_csv(std::vector<MetricsRow>{row});
  CHECK(csv.rfind("configuration,P_C,P_D,R_C,R_D,F1_C,F1_D,macro_F1,AUROC,"
                  "AUROC_CI_low,AUROC_CI_high\n",
                  0) == 0);
  CHECK(csv.find("audio,0.66,") != std::string::npos);
}
