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

#include "fuseval/scorelog.hpp"

namespace fuseval {

struct ChunkWindow {
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const ChunkWindow&) const = default;
};

// Window layout for one recording: regular hops of len * (1 - overlap),
// plus an end-anchored tail window when coverage would otherwise stop short
// of the full duration.
struct ChunkPlan {
  std::vector<ChunkWindow> windows;
  double chunk_len_s = 30.0;
  double overlap_fraction = 0.5;
};

ChunkPlan plan_chunks(double duration_s, double chunk_len_s = 30.0,
                      double overlap_fraction = 0.5);

// Patient-level score for one modality: unweighted arithmetic mean of the
// chunk scores (compensated summation, permutation-stable to 1 ulp).
struct PatientScore {
  std::string patient_id;
  Modality modality;
  double score = 0.0;
  int n_chunks = 0;

  bool operator==(const PatientScore&) const = default;
};

// All chunks must share one (patient, modality); input must be non-empty.
PatientScore aggregate_patient(std::span<const ChunkScore> chunks);

// One PatientScore per (patient, modality) pair present, in the dataset's
// canonical order.
std::vector<PatientScore> aggregate_dataset(const ValidatedDataset& dataset);

// Header: patient_id,modality,score,n_chunks
void write_patient_scores(std::ostream& out,
                          std::span<const PatientScore> scores);

}  // namespace fuseval
