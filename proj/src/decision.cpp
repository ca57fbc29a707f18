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

#include "fuseval/decision.hpp"

#include <cmath>
#include <cstddef>

#include "fuseval/csv.hpp"
#include "fuseval/errors.hpp"
#include "fuseval/metrics.hpp"

namespace fuseval {

namespace {

constexpr double kEqTol = 1e-12;

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ValidationError("size_mismatch",
                          "net benefit: scores and labels differ in length");
  }
  if (scores.empty()) {
    throw ValidationError("empty_input", "net benefit: no samples");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (int y : labels) {
    if (y == 1) {
      has_pos = true;
    } else if (y == 0) {
      has_neg = true;
    } else {
      throw ValidationError("bad_label", "net benefit: labels must be 0 or 1");
    }
  }
  if (!has_pos || !has_neg) {
    throw ValidationError("degenerate_labels",
                          "net benefit: labels contain a single class");
  }
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw ValidationError("score_out_of_range",
                            "net benefit: score outside [0, 1]");
    }
  }
}

void check_threshold(double t) {
  if (!(t > 0.0 && t < 1.0)) {
    throw ValidationError("bad_threshold",
                          "net benefit: threshold probability must lie in (0, 1)");
  }
}

}  // namespace

double net_benefit(std::span<const double> scores, std::span<const int> labels,
                   double t) {
  check_inputs(scores, labels);
  check_threshold(t);
  ConfusionCounts counts = confusion_at_threshold(scores, labels, t);
  const double n = static_cast<double>(scores.size());
  return static_cast<double>(counts.tp) / n -
         static_cast<double>(counts.fp) / n * (t / (1.0 - t));
}

double nb_treat_all(double prevalence, double t) {
  check_threshold(t);
  return prevalence - (1.0 - prevalence) * (t / (1.0 - t));
}

NetBenefitCurve decision_curve(std::span<const double> scores,
                               std::span<const int> labels, double t_min,
                               double t_max, double step) {
  check_inputs(scores, labels);
  if (!(t_min > 0.0 && t_min < t_max && t_max < 1.0)) {
    throw ValidationError("bad_threshold_grid",
                          "decision curve: need 0 < t_min < t_max < 1");
  }
  if (!(step > 0.0)) {
    throw ValidationError("bad_threshold_grid", "decision curve: step must be > 0");
  }

  long n_pos = 0;
  for (int y : labels) n_pos += y;
  NetBenefitCurve curve;
  curve.prevalence = static_cast<double>(n_pos) / static_cast<double>(labels.size());

  // Inclusive grid; the tolerance keeps t_max itself on the grid when
  // (t_max - t_min) is an exact multiple of step up to rounding.
  const long n_steps =
      static_cast<long>(std::floor((t_max - t_min) / step + 1e-9));
  for (long i = 0; i <= n_steps; ++i) {
    double t = t_min + static_cast<double>(i) * step;
    if (t > t_max + kEqTol) break;
    curve.thresholds.push_back(t);
    curve.nb_model.push_back(net_benefit(scores, labels, t));
    curve.nb_treat_all.push_back(nb_treat_all(curve.prevalence, t));
    curve.nb_treat_none.push_back(0.0);
  }
  return curve;
}

DominanceSummary dominance_summary(const NetBenefitCurve& curve) {
  DominanceSummary summary;
  const std::size_t n = curve.thresholds.size();
  std::size_t i = 0;
  while (i < n) {
    double baseline = std::max(curve.nb_treat_all[i], 0.0);
    if (curve.nb_model[i] >= baseline - kEqTol) {
      std::size_t j = i;
      bool strict = true;
      while (j < n) {
        double b = std::max(curve.nb_treat_all[j], 0.0);
        if (!(curve.nb_model[j] >= b - kEqTol)) break;
        if (!(curve.nb_model[j] > b + kEqTol)) strict = false;
        ++j;
      }
      DominanceInterval interval;
      interval.t_lo = curve.thresholds[i];
      interval.t_hi = curve.thresholds[j - 1];
      interval.strict = strict;
      summary.intervals.push_back(interval);
      i = j;
    } else {
      ++i;
    }
  }
  return summary;
}

void write_dca_csv(std::ostream& out, const NetBenefitCurve& curve) {
  out << "threshold,nb_model,nb_treat_all,nb_treat_none\n";
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    out << format_double(curve.thresholds[i]) << ','
        << format_double(curve.nb_model[i]) << ','
        << format_double(curve.nb_treat_all[i]) << ','
        << format_double(curve.nb_treat_none[i]) << '\n';
  }
}

}  // namespace fuseval
