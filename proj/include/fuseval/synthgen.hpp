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
#include <vector>

#include "fuseval/scorelog.hpp"

namespace fuseval {

// Per-modality score model parameters: a chunk score is
// sigmoid(signal * z + noise * e) with z = +1 for depressed patients,
// -1 for controls, and e a standard normal drawn independently per chunk.
struct ModalityProfile {
  Modality modality;
  double signal = 0.0;  // separation strength, >= 0
  double noise = 1.0;   // chunk noise scale, > 0
};

struct ChunkCountRange {
  int min_chunks = 1;
  int max_chunks = 1;  // inclusive
};

struct SynthConfig {
  long n_patients = 189;
  double prevalence = 0.30;
  std::vector<ModalityProfile> modalities;
  ChunkCountRange chunks_per_patient{4, 8};
  std::uint64_t seed = 0;
};

struct SynthCohort {
  std::vector<Modality> modalities;
  std::vector<ChunkScore> chunks;
  std::vector<LabelRecord> labels;
  std::vector<SplitAssignment> splits;
};

// round(n_patients * prevalence); must land in [1, n_patients - 1].
long synth_positive_count(const SynthConfig& config);

// Deterministic in config.seed: exact positive count, PHQ-8 totals drawn
// uniformly from 11..24 (positives) or 0..10 (controls), per-chunk scores per
// the ModalityProfile model, and fit/test splits alternating within each
// class. Single-threaded by design.
SynthCohort generate_cohort(const SynthConfig& config);

// Three-modality cohort preset shaped like a typical screening corpus
// (189 patients, 30% prevalence).
SynthConfig default_scenario(std::uint64_t seed);

// Two modalities that read the same label through independent noise, so each
// alone is weakly informative and their average is markedly stronger. Sized
// for measurement stability (n = 2000).
SynthConfig complementary_scenario(std::uint64_t seed);

}  // namespace fuseval
