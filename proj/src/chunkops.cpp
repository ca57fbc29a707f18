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

#include "fuseval/chunkops.hpp"

#include <cmath>

#include "fuseval/csv.hpp"
#include "fuseval/errors.hpp"
#include "fuseval/numeric.hpp"

namespace fuseval {

namespace {

// Slack for start/end comparisons so k*hop accumulation noise cannot drop
// or duplicate a window.
constexpr double kTimeEps = 1e-9;

}  // namespace

ChunkPlan plan_chunks(double duration_s, double chunk_len_s,
                      double overlap_fraction) {
  if (!(duration_s > 0.0)) {
    throw ValidationError("out_of_range", "duration_s must be positive, got " +
                                              format_double(duration_s));
  }
  if (!(chunk_len_s > 0.0)) {
    throw ValidationError("out_of_range", "chunk_len_s must be positive, got " +
                                              format_double(chunk_len_s));
  }
  if (!(overlap_fraction >= 0.0) || overlap_fraction >= 1.0) {
    throw ValidationError("out_of_range",
                          "overlap_fraction must be in [0,1), got " +
                              format_double(overlap_fraction));
  }

  ChunkPlan plan;
  plan.chunk_len_s = chunk_len_s;
  plan.overlap_fraction = overlap_fraction;

  if (duration_s < chunk_len_s) {
    plan.windows.push_back({0.0, duration_s});
    return plan;
  }

  const double hop = chunk_len_s * (1.0 - overlap_fraction);
  double covered_to = 0.0;
  for (std::size_t k = 0;; ++k) {
    double start = static_cast<double>(k) * hop;
    if (start + chunk_len_s > duration_s + kTimeEps) break;
    plan.windows.push_back({start, start + chunk_len_s});
    covered_to = start + chunk_len_s;
  }
  if (covered_to < duration_s - kTimeEps) {
    plan.windows.push_back({duration_s - chunk_len_s, duration_s});
  }
  return plan;
}

PatientScore aggregate_patient(std::span<const ChunkScore> chunks) {
  if (chunks.empty()) {
    throw ValidationError("empty_input", "aggregate_patient: no chunks");
  }
  const std::string& patient = chunks.front().patient_id;
  const Modality& modality = chunks.front().modality;
  std::vector<double> scores;
  scores.reserve(chunks.size());
  for (const ChunkScore& c : chunks) {
    if (c.patient_id != patient || c.modality != modality) {
      throw ValidationError("mixed_group",
                            "aggregate_patient: chunks mix (" + patient + ", " +
                                modality.name + ") with (" + c.patient_id +
                                ", " + c.modality.name + ")");
    }
    scores.push_back(c.score);
  }
  PatientScore result;
  result.patient_id = patient;
  result.modality = modality;
  result.score = compensated_mean(scores);
  result.n_chunks = static_cast<int>(chunks.size());
  return result;
}

std::vector<PatientScore> aggregate_dataset(const ValidatedDataset& dataset) {
  std::vector<PatientScore> out;
  const auto& chunks = dataset.chunks();
  // Chunks are canonically ordered, so each group is a contiguous run.
  std::size_t i = 0;
  while (i < chunks.size()) {
    std::size_t j = i + 1;
    while (j < chunks.size() && chunks[j].patient_id == chunks[i].patient_id &&
           chunks[j].modality == chunks[i].modality) {
      ++j;
    }
    out.push_back(aggregate_patient(
        std::span<const ChunkScore>(chunks.data() + i, j - i)));
    i = j;
  }
  return out;
}

void write_patient_scores(std::ostream& out,
                          std::span<const PatientScore> scores) {
  out << "patient_id,modality,score,n_chunks\n";
  for (const PatientScore& s : scores) {
    out << s.patient_id << ',' << s.modality.name << ','
        << format_double(s.score) << ',' << s.n_chunks << '\n';
  }
}

}  // namespace fuseval
