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
#include <sstream>
#include <vector>

#include <doctest.h>

#include "fuseval/decision.hpp"
#include "fuseval/errors.hpp"
#include "fuseval/rng.hpp"

using namespace fuseval;

namespace {

// Independent tally straight from the definition: positive when score >= t.
double nb_oracle(const std::vector<double>& scores, const std::vector<int>& labels,
                 double t) {
  double tp = 0;
  double fp = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= t) {
      if (labels[i] == 1) {
        tp += 1;
      } else {
        fp += 1;
      }
    }
  }
  double n = static_cast<double>(scores.size());
  return tp / n - fp / n * t / (1.0 - t);
}

}  // namespace

TEST_CASE("net_benefit worked example") {
  // 10 patients, threshold 0.2: 3 true positives and 2 false positives.
  std::vector<double> scores{0.9, 0.8, 0.3, 0.25, 0.21, 0.1, 0.05, 0.15, 0.19, 0.12};
  std::vector<int> labels{1, 1, 0, 1, 0, 1, 0, 0, 0, 0};
  // scores >= 0.2: 0.9(1) 0.8(1) 0.3(0) 0.25(1) 0.21(0) -> TP=3, FP=2.
  double nb = net_benefit(scores, labels, 0.2);
  CHECK(nb == doctest::Approx(3.0 / 10.0 - 2.0 / 10.0 * 0.25).epsilon(1e-15));
  CHECK(nb == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("net_benefit edge behaviours") {
  std::vector<int> labels{1, 1, 0, 0, 0};

  SUBCASE("no predicted positives gives exactly zero") {
    std::vector<double> scores{0.1, 0.2, 0.05, 0.15, 0.0};
    CHECK(net_benefit(scores, labels, 0.9) == 0.0);
  }
  SUBCASE("all scores at 1.0 reproduce the treat-all policy") {
    std::vector<double> scores(5, 1.0);
    for (double t : {0.05, 0.2, 0.4, 0.55}) {
      CHECK(net_benefit(scores, labels, t) ==
            doctest::Approx(nb_treat_all(0.4, t)).epsilon(1e-15));
    }
  }
  SUBCASE("net benefit never exceeds prevalence") {
    SplitMix64 rng(stream_tag("nb_bound"));
    for (int round = 0; round < 50; ++round) {
      int n = rng.uniform_int(2, 60);
      std::vector<double> scores;
      std::vector<int> ys{1, 0};
      scores.push_back(rng.uniform());
      scores.push_back(rng.uniform());
      for (int i = 2; i < n; ++i) {
        scores.push_back(rng.uniform());
        ys.push_back(rng.bernoulli(0.5) ? 1 : 0);
      }
      double prev = 0.0;
      for (int y : ys) prev += y;
      prev /= static_cast<double>(n);
      double t = rng.uniform(0.01, 0.99);
      CHECK(net_benefit(scores, ys, t) <= prev + 1e-12);
    }
  }
  SUBCASE("below the lowest score the curve equals treat-all") {
    std::vector<double> scores{0.4, 0.5, 0.6, 0.7, 0.8};
    double prev = 2.0 / 5.0;
    CHECK(net_benefit(scores, labels, 0.1) ==
          doctest::Approx(nb_treat_all(prev, 0.1)).epsilon(1e-15));
    CHECK(net_benefit(scores, labels, 0.3) ==
          doctest::Approx(nb_treat_all(prev, 0.3)).epsilon(1e-15));
  }
}

TEST_CASE("nb_treat_all closed form") {
  CHECK(std::abs(nb_treat_all(0.3, 0.1) - (0.3 - 0.7 / 9.0)) <= 1e-12);
  // At t equal to the prevalence the treat-all policy breaks even.
  CHECK(std::abs(nb_treat_all(0.3, 0.3)) <= 1e-12);
  CHECK(std::abs(nb_treat_all(0.5, 0.5)) <= 1e-12);
  // Strictly decreasing in t.
  double prev_value = nb_treat_all(0.3, 0.01);
  for (double t = 0.02; t < 0.99; t += 0.01) {
    double v = nb_treat_all(0.3, t);
    CHECK(v < prev_value);
    prev_value = v;
  }
}

TEST_CASE("decision_curve grid construction") {
  std::vector<double> scores{0.1, 0.9, 0.3, 0.7};
  std::vector<int> labels{0, 1, 0, 1};

  SUBCASE("default grid spans 0.05..0.60 in 0.01 steps") {
    NetBenefitCurve curve = decision_curve(scores, labels);
    REQUIRE(curve.thresholds.size() == 56);
    CHECK(curve.thresholds.front() == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(curve.thresholds.back() == doctest::Approx(0.60).epsilon(1e-12));
  }
  SUBCASE("inclusive endpoints: 0.05..0.95 step 0.05 gives 19 points") {
    NetBenefitCurve curve = decision_curve(scores, labels, 0.05, 0.95, 0.05);
    CHECK(curve.thresholds.size() == 19);
    CHECK(curve.thresholds.back() == doctest::Approx(0.95).epsilon(1e-12));
  }
  SUBCASE("treat-none is identically zero and prevalence is recorded") {
    NetBenefitCurve curve = decision_curve(scores, labels);
    CHECK(curve.prevalence == 0.5);
    for (double v : curve.nb_treat_none) CHECK(v == 0.0);
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
      CHECK(curve.nb_treat_all[i] ==
            doctest::Approx(nb_treat_all(0.5, curve.thresholds[i])).epsilon(1e-15));
    }
  }
}

TEST_CASE("decision_curve matches the confusion-table oracle") {
  SplitMix64 rng(stream_tag("dca_oracle"));
  for (int round = 0; round < 60; ++round) {
    int n = rng.uniform_int(2, 80);
    std::vector<double> scores{rng.uniform(), rng.uniform()};
    std::vector<int> labels{1, 0};
    for (int i = 2; i < n; ++i) {
      // Quantize some scores so ties with grid thresholds occur.
      double s = rng.uniform();
      if (rng.bernoulli(0.5)) s = std::round(s * 20.0) / 20.0;
      scores.push_back(s);
      labels.push_back(rng.bernoulli(0.4) ? 1 : 0);
    }
    NetBenefitCurve curve = decision_curve(scores, labels, 0.05, 0.90, 0.05);
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
      double want = nb_oracle(scores, labels, curve.thresholds[i]);
      CHECK(curve.nb_model[i] == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("dominance_summary shapes") {
  SUBCASE("a perfect classifier dominates the whole grid strictly") {
    std::vector<double> scores{0.99, 0.98, 0.97, 0.02, 0.01, 0.03, 0.02, 0.01,
                               0.02, 0.01};
    std::vector<int> labels{1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
    NetBenefitCurve curve = decision_curve(scores, labels, 0.05, 0.60, 0.01);
    // On (0.03, 0.97) the model finds every case and flags nobody else,
    // so nb_model == prevalence > max(nb_treat_all, 0) except at t == prev.
    DominanceSummary summary = dominance_summary(curve);
    REQUIRE(summary.intervals.size() == 1);
    CHECK(summary.intervals[0].t_lo == curve.thresholds.front());
    CHECK(summary.intervals[0].t_hi == curve.thresholds.back());
    CHECK(summary.intervals[0].strict);
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
      CHECK(curve.nb_model[i] == doctest::Approx(0.3).epsilon(1e-12));
    }
  }
  SUBCASE("matching treat-all exactly is dominance but not strict") {
    std::vector<double> scores(10, 1.0);
    std::vector<int> labels{1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
    NetBenefitCurve curve = decision_curve(scores, labels, 0.05, 0.25, 0.05);
    // Up to t=0.25 < prevalence 0.3, treat-all is positive and the model
    // coincides with it everywhere.
    DominanceSummary summary = dominance_summary(curve);
    REQUIRE(summary.intervals.size() == 1);
    CHECK_FALSE(summary.intervals[0].strict);
  }
  SUBCASE("a false-positive-heavy model loses the high-threshold region") {
    // Every control scores 0.95: past the break-even point the model's FP
    // penalty pushes NB below zero while treat-none sits at zero.
    std::vector<double> scores{0.96, 0.97, 0.95, 0.95, 0.95, 0.95, 0.95, 0.95,
                               0.95, 0.95};
    std::vector<int> labels{1, 1, 0, 0, 0, 0, 0, 0, 0, 0};
    NetBenefitCurve curve = decision_curve(scores, labels, 0.30, 0.60, 0.01);
    DominanceSummary summary = dominance_summary(curve);
    // nb_model at t in [0.30, 0.60]: TP=2, FP=8 -> 0.2 - 0.8 t/(1-t) < 0
    // once t/(1-t) > 0.25, i.e. t > 0.2. Nothing dominates here.
    CHECK(summary.intervals.empty());
    for (double v : curve.nb_model) CHECK(v < 0.0);
  }
}

TEST_CASE("dca csv layout") {
  std::vector<double> scores{0.1, 0.9};
  std::vector<int> labels{0, 1};
  NetBenefitCurve curve = decision_curve(scores, labels, 0.2, 0.4, 0.1);
  std::ostringstream out;
  write_dca_csv(out, curve);
  std::string text = out.str();
  CHECK(text.rfind("threshold,nb_model,nb_treat_all,nb_treat_none\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);  // header + 3 rows
  CHECK(text.find("\n0.2,") != std::string::npos);
}

TEST_CASE("decision input validation") {
  std::vector<double> scores{0.2, 0.8};
  std::vector<int> labels{0, 1};
  CHECK_THROWS_AS(net_benefit(scores, labels, 0.0), ValidationError);
  CHECK_THROWS_AS(net_benefit(scores, labels, 1.0), ValidationError);
  CHECK_THROWS_AS(net_benefit(scores, std::vector<int>{1, 1}, 0.5),
                  ValidationError);
  CHECK_THROWS_AS(net_benefit(std::vector<double>{0.2, 1.8}, labels, 0.5),
                  ValidationError);
  CHECK_THROWS_AS(decision_curve(scores, labels, 0.5, 0.4, 0.01),
                  ValidationError);
  CHECK_THROWS_AS(decision_curve(scores, labels, 0.1, 0.4, 0.0),
                  ValidationError);
  CHECK_THROWS_AS(decision_curve(scores, labels, 0.0, 0.4, 0.01),
                  ValidationError);
  CHECK_THROWS_AS(nb_treat_all(0.3, 1.0), ValidationError);
}
