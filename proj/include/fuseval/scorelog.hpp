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

#include <compare>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace fuseval {

// One score source (audio, text, tabular, ...). The set is configurable;
// ordering is the dataset's declared order and drives configuration
// enumeration and tie-breaking downstream.
struct Modality {
  std::string name;

  auto operator<=>(const Modality&) const = default;
};

// One modality's probability for one chunk of one patient's interview.
struct ChunkScore {
  std::string patient_id;
  Modality modality;
  int chunk_index = 0;
  double score = 0.0;
  std::optional<double> start_s;
  std::optional<double> duration_s;

  bool operator==(const ChunkScore&) const = default;
};

constexpr int kDefaultPhq8Threshold = 10;
constexpr int kPhq8Max = 24;

// 1 iff phq8 > threshold. Throws ValidationError outside [0, 24].
int binarize_phq8(int phq8, int threshold = kDefaultPhq8Threshold);

// A patient's PHQ-8 total and the label derived from it. The label is always
// recomputed from phq8, never read from storage.
struct LabelRecord {
  std::string patient_id;
  int phq8 = 0;
  int label = 0;

  bool operator==(const LabelRecord&) const = default;
};

enum class Split { kFit, kTest };

const char* split_name(Split split);

struct SplitAssignment {
  std::string patient_id;
  Split split = Split::kFit;

  bool operator==(const SplitAssignment&) const = default;
};

struct ModalityChunkCount {
  Modality modality;
  std::size_t n_chunks = 0;
};

struct DatasetSummary {
  std::size_t n_patients = 0;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  double prevalence = 0.0;
  std::size_t n_fit = 0;
  std::size_t n_test = 0;
  std::vector<ModalityChunkCount> chunks_per_modality;
  std::vector<std::string> warnings;
};

struct ValidateOptions {
  // Patients that carry a label but no chunk scores: warn by default.
  bool unmatched_label_is_error = false;
};

// Cross-checked, canonically ordered dataset. Immutable after construction
// and safe to share read-only across concurrent evaluation tasks.
class ValidatedDataset {
 public:
  static ValidatedDataset validate(std::vector<ChunkScore> chunks,
                                   std::vector<LabelRecord> labels,
                                   std::vector<SplitAssignment> splits,
                                   std::vector<Modality> modalities,
                                   const ValidateOptions& options = {});

  const std::vector<ChunkScore>& chunks() const noexcept { return chunks_; }
  const std::vector<LabelRecord>& labels() const noexcept { return labels_; }
  const std::vector<SplitAssignment>& splits() const noexcept { return splits_; }
  const std::vector<Modality>& modalities() const noexcept { return modalities_; }
  const DatasetSummary& summary() const noexcept { return summary_; }

  // Lookups by patient id; the patient must exist.
  int label_of(const std::string& patient_id) const;
  Split split_of(const std::string& patient_id) const;

 private:
  ValidatedDataset() = default;

  std::vector<ChunkScore> chunks_;
  std::vector<LabelRecord> labels_;
  std::vector<SplitAssignment> splits_;
  std::vector<Modality> modalities_;
  DatasetSummary summary_;
};

// Parsers for the delimited interchange files. Headers:
//   chunk scores: patient_id,modality,chunk_index,score[,start_s,duration_s]
//   labels:       patient_id,phq8[,label]   (label column is cross-checked)
//   splits:       patient_id,split          (split in {fit, test})
std::vector<ChunkScore> parse_chunk_scores(
    std::istream& in, const std::vector<Modality>& expected_modalities,
    const std::string& context = "chunk scores");

std::vector<LabelRecord> parse_labels(std::istream& in,
                                      int phq8_threshold = kDefaultPhq8Threshold,
                                      const std::string& context = "labels");

std::vector<SplitAssignment> parse_splits(std::istream& in,
                                          const std::string& context = "splits");

void write_chunk_scores(std::ostream& out, std::span<const ChunkScore> chunks);
void write_labels(std::ostream& out, std::span<const LabelRecord> labels);
void write_splits(std::ostream& out, std::span<const SplitAssignment> splits);

}  // namespace fuseval
