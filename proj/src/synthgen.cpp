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

#include "fuseval/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "fuseval/errors.hpp"
#include "fuseval/numeric.hpp"
#include "fuseval/rng.hpp"

namespace fuseval {

namespace {

void check_config(const SynthConfig& config) {
  if (config.n_patients < 2) {
    throw ValidationError("bad_synth_config", "synth: n_patients must be >= 2");
  }
  if (!(config.prevalence > 0.0 && config.prevalence < 1.0)) {
    throw ValidationError("bad_synth_config",
                          "synth: prevalence must lie strictly in (0, 1)");
  }
  if (config.modalities.empty()) {
    throw ValidationError("bad_synth_config",
                          "synth: at least one modality must be configured");
  }
  for (const ModalityProfile& profile : config.modalities) {
    if (profile.modality.name.empty()) {
      throw ValidationError("bad_synth_config", "synth: empty modality name");
    }
    if (!(profile.signal >= 0.0)) {
      throw ValidationError("bad_synth_config",
                            "synth: modality signal must be >= 0 (" +
                                profile.modality.name + ")");
    }
    if (!(profile.noise > 0.0)) {
      throw ValidationError("bad_synth_config",
                            "synth: modality noise must be > 0 (" +
                                profile.modality.name + ")");
    }
  }
  for (std::size_t i = 0; i < config.modalities.size(); ++i) {
    for (std::size_t j = i + 1; j < config.modalities.size(); ++j) {
      if (config.modalities[i].modality == config.modalities[j].modality) {
        throw ValidationError("bad_synth_config",
                              "synth: duplicate modality '" +
                                  config.modalities[i].modality.name + "'");
      }
    }
  }
  if (config.chunks_per_patient.min_chunks < 1 ||
      config.chunks_per_patient.max_chunks < config.chunks_per_patient.min_chunks) {
    throw ValidationError("bad_synth_config",
                          "synth: chunk count range must satisfy 1 <= min <= max");
  }
}

std::string patient_id_for(long index, int width) {
  std::string digits = std::to_string(index + 1);
  std::string id = "P";
  id.append(static_cast<std::size_t>(width) - std::min<std::size_t>(
                                                  digits.size(),
                                                  static_cast<std::size_t>(width)),
            '0');
  id += digits;
  return id;
}

}  // namespace

long synth_positive_count(const SynthConfig& config) {
  check_config(config);
  long n_pos = std::lround(static_cast<double>(config.n_patients) *
                           config.prevalence);
  if (n_pos < 1 || n_pos > config.n_patients - 1) {
    throw ValidationError(
        "bad_synth_config",
        "synth: round(n_patients * prevalence) = " + std::to_string(n_pos) +
            " leaves no patients in one class");
  }
  return n_pos;
}

SynthCohort generate_cohort(const SynthConfig& config) {
  const long n_pos = synth_positive_count(config);
  const long n = config.n_patients;
  const int id_width =
      std::max<int>(3, static_cast<int>(std::to_string(n).size()));
  const std::uint64_t base = SplitMix64::derive(config.seed, stream_tag("synthgen"));

  // Scatter the positive class across patient indices with a deterministic
  // Fisher-Yates pass.
  std::vector<long> order(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  SplitMix64 shuffle_rng(SplitMix64::derive(base, stream_tag("labels")));
  for (long i = n - 1; i > 0; --i) {
    std::uint64_t j = shuffle_rng.below(static_cast<std::uint64_t>(i) + 1);
    std::swap(order[static_cast<std::size_t>(i)], order[j]);
  }
  std::vector<int> label_of(static_cast<std::size_t>(n), 0);
  for (long r = 0; r < n_pos; ++r) {
    label_of[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = 1;
  }

  SynthCohort cohort;
  cohort.modalities.reserve(config.modalities.size());
  for (const ModalityProfile& profile : config.modalities) {
    cohort.modalities.push_back(profile.modality);
  }
  cohort.labels.reserve(static_cast<std::size_t>(n));
  cohort.splits.reserve(static_cast<std::size_t>(n));

  long seen_by_class[2] = {0, 0};
  for (long i = 0; i < n; ++i) {
    const std::string pid = patient_id_for(i, id_width);
    const int label = label_of[static_cast<std::size_t>(i)];
    const double z = label == 1 ? 1.0 : -1.0;
    const std::uint64_t pstream =
        SplitMix64::derive(base, static_cast<std::uint64_t>(i));

    LabelRecord rec;
    rec.patient_id = pid;
    SplitMix64 phq8_rng(SplitMix64::derive(pstream, stream_tag("phq8")));
    rec.phq8 = label == 1 ? phq8_rng.uniform_int(kDefaultPhq8Threshold + 1, kPhq8Max)
                          : phq8_rng.uniform_int(0, kDefaultPhq8Threshold);
    rec.label = label;
    cohort.labels.push_back(rec);

    // Alternate fit/test within each class so the split is stratified.
    SplitAssignment split;
    split.patient_id = pid;
    split.split = seen_by_class[label] % 2 == 0 ? Split::kFit : Split::kTest;
    ++seen_by_class[label];
    cohort.splits.push_back(split);

    SplitMix64 count_rng(SplitMix64::derive(pstream, stream_tag("chunk_count")));
    const int n_chunks = count_rng.uniform_int(config.chunks_per_patient.min_chunks,
                                               config.chunks_per_patient.max_chunks);
    const std::uint64_t score_base = SplitMix64::derive(pstream, stream_tag("scores"));
    for (std::size_t m = 0; m < config.modalities.size(); ++m) {
      const ModalityProfile& profile = config.modalities[m];
      SplitMix64 noise_rng(SplitMix64::derive(score_base, m));
      for (int c = 0; c < n_chunks; ++c) {
        ChunkScore chunk;
        chunk.patient_id = pid;
        chunk.modality = profile.modality;
        chunk.chunk_index = c;
        chunk.score = sigmoid(profile.signal * z + profile.noise * noise_rng.normal());
        cohort.chunks.push_back(chunk);
      }
    }
  }
  return cohort;
}

SynthConfig default_scenario(std::uint64_t seed) {
  SynthConfig config;
  config.n_patients = 189;
  config.prevalence = 0.30;
  config.modalities = {
      {Modality{"audio"}, 0.18, 1.0},
      {Modality{"text"}, 0.32, 1.0},
      {Modality{"tabular"}, 0.27, 1.0},
  };
  config.chunks_per_patient = {4, 8};
  config.seed = seed;
  return config;
}

SynthConfig complementary_scenario(std::uint64_t seed) {
  SynthConfig config;
  config.n_patients = 2000;
  config.prevalence = 0.30;
  // Each modality reads the same latent through its own noise; moderate
  // signal keeps the single-modality AUROC mid-range while averaging the two
  // independent reads cancels noise and lifts the fused AUROC well clear.
  config.modalities = {
      {Modality{"alpha"}, 0.20, 1.0},
      {Modality{"beta"}, 0.20, 1.0},
  };
  config.chunks_per_patient = {3, 6};
  config.seed = seed;
  return config;
}

}  // namespace fuseval
