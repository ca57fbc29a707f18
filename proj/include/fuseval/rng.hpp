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
#include <cstdint>
#include <numbers>
#include <string_view>

namespace fuseval {

// FNV-1a 64-bit. Used for stream tags and input content hashes; not a
// cryptographic hash.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t hash = 0xCBF29CE484222325ULL) {
  for (char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

// SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom number
// generators", OOPSLA 2014). Counter-based: output k is a pure function of
// (seed, k), so substreams derived from (seed, index) are identical on every
// platform and under any execution order. Constants: golden-ratio gamma
// 0x9E3779B97F4A7C15 and the mix multipliers below.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Seed for an independent substream. Nested calls split further:
  // derive(derive(seed, i), j).
  static constexpr std::uint64_t derive(std::uint64_t seed,
                                        std::uint64_t stream) {
    return mix(seed + (stream + 1) * kGoldenGamma);
  }

  std::uint64_t next() { return mix(state_ += kGoldenGamma); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in [0, n) via Lemire's multiply-shift. The slight modulo bias
  // (< 2^-53 for the ranges used here) is irrelevant and the mapping is
  // exactly reproducible, which is what matters.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller. Draws two uniforms per call; no state
  // is cached so the draw count per call is fixed.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

// Tag for a named substream, e.g. derive(seed, stream_tag("labels")).
constexpr std::uint64_t stream_tag(std::string_view name) {
  return fnv1a64(name);
}

}  // namespace fuseval
