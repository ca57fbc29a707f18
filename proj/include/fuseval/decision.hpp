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
#include <vector>

namespace fuseval {

// Printed in report headers so the plotted quantity is unambiguous.
inline constexpr const char* kNetBenefitFormula =
    "NB = TP/N - (FP/N) * t/(1-t), prediction positive when score >= t";

inline constexpr double kDcaDefaultTMin = 0.05;
inline constexpr double kDcaDefaultTMax = 0.60;
inline constexpr double kDcaDefaultStep = 0.01;

struct NetBenefitCurve {
  std::vector<double> thresholds;     // strictly inside (0,1), ascending
  std::vector<double> nb_model;
  std::vector<double> nb_treat_all;   // prev - (1-prev)*t/(1-t)
  std::vector<double> nb_treat_none;  // identically zero
  double prevalence = 0.0;
};

double net_benefit(std::span<const double> scores, std::span<const int> labels,
                   double t);

double nb_treat_all(double prevalence, double t);

NetBenefitCurve decision_curve(std::span<const double> scores,
                               std::span<const int> labels,
                               double t_min = kDcaDefaultTMin,
                               double t_max = kDcaDefaultTMax,
                               double step = kDcaDefaultStep);

struct DominanceInterval {
  double t_lo = 0.0;
  double t_hi = 0.0;
  bool strict = false;  // model strictly above both baselines throughout
};

struct DominanceSummary {
  std::vector<DominanceInterval> intervals;  // maximal contiguous grid runs
};

// Intervals where nb_model >= max(nb_treat_all, 0); equality is resolved with
// a 1e-12 tolerance and the strict flag requires a strict gap at every grid
// point of the interval.
DominanceSummary dominance_summary(const NetBenefitCurve& curve);

// Header: threshold,nb_model,nb_treat_all,nb_treat_none
void write_dca_csv(std::ostream& out, const NetBenefitCurve& curve);

}  // namespace fuseval
