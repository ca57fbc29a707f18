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

#include <cmath>
#include <cstddef>
#include <span>

namespace fuseval {

// Neumaier-compensated accumulator. Permutation-stable to 1 ulp, which the
// aggregation contract relies on.
class NeumaierSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) {
  NeumaierSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

inline double compensated_mean(std::span<const double> values) {
  return compensated_sum(values) / static_cast<double>(values.size());
}

inline double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(sigmoid(z)), stable for large |z|.
inline double log_sigmoid(double z) {
  if (z >= 0.0) {
    return -std::log1p(std::exp(-z));
  }
  return z - std::log1p(std::exp(z));
}

inline double clamp_prob(double p, double epsilon) {
  if (p < epsilon) return epsilon;
  if (p > 1.0 - epsilon) return 1.0 - epsilon;
  return p;
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// Linear-interpolation quantile of an ascending-sorted sample (type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  double h = q * static_cast<double>(n - 1);
  auto lo = static_cast<std::size_t>(h);
  if (lo >= n - 1) return sorted[n - 1];
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace fuseval
