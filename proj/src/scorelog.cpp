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

#include "fuseval/scorelog.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "fuseval/csv.hpp"
#include "fuseval/errors.hpp"

namespace fuseval {

namespace {

constexpr const char* kChunkHeaderShort = "patient_id,modality,chunk_index,score";
constexpr const char* kChunkHeaderLong =
    "patient_id,modality,chunk_index,score,start_s,duration_s";

bool contains(const std::vector<Modality>& modalities, const Modality& m) {
  return std::find(modalities.begin(), modalities.end(), m) != modalities.end();
}

}  // namespace

int binarize_phq8(int phq8, int threshold) {
  if (phq8 < 0 || phq8 > kPhq8Max) {
    throw ValidationError("out_of_range",
                          "phq8 score " + std::to_string(phq8) +
                              " outside [0, " + std::to_string(kPhq8Max) + "]");
  }
  return phq8 > threshold ? 1 : 0;
}

const char* split_name(Split split) {
  return split == Split::kFit ? "fit" : "test";
}

std::vector<ChunkScore> parse_chunk_scores(
    std::istream& in, const std::vector<Modality>& expected_modalities,
    const std::string& context) {
  if (expected_modalities.empty()) {
    throw ValidationError("no_modalities", context + ": no modalities configured");
  }
  CsvReader reader(in, context);

  std::vector<std::string> fields;
  if (!reader.next(fields)) {
    reader.fail("empty_file", "file is empty, expected header '" +
                                  std::string(kChunkHeaderShort) + "'");
  }
  const std::string header = join(fields, ",");
  bool has_window_columns;
  if (header == kChunkHeaderShort) {
    has_window_columns = false;
  } else if (header == kChunkHeaderLong) {
    has_window_columns = true;
  } else {
    reader.fail("bad_header", "expected header '" +
                                  std::string(kChunkHeaderShort) + "' or '" +
                                  std::string(kChunkHeaderLong) + "', got '" +
                                  header + "'");
  }
  const std::size_t n_columns = has_window_columns ? 6 : 4;

  std::vector<ChunkScore> chunks;
  std::set<std::tuple<std::string, std::string, int>> seen;
  while (reader.next(fields)) {
    if (fields.size() != n_columns) {
      reader.fail("malformed_row", "expected " + std::to_string(n_columns) +
                                       " fields, got " +
                                       std::to_string(fields.size()));
    }
    ChunkScore c;
    c.patient_id = fields[0];
    if (c.patient_id.empty()) {
      reader.fail("malformed_row", "empty patient_id");
    }
    c.modality = Modality{fields[1]};
    if (!contains(expected_modalities, c.modality)) {
      reader.fail("unknown_modality", "unknown modality name '" + fields[1] + "'");
    }
    c.chunk_index = reader.parse_int(fields[2], "chunk_index");
    if (c.chunk_index < 0) {
      reader.fail("out_of_range", "chunk_index " + fields[2] + " is negative");
    }
    c.score = reader.parse_double(fields[3], "score");
    if (c.score < 0.0 || c.score > 1.0) {
      reader.fail("out_of_range", "score " + fields[3] + " outside [0,1]");
    }
    if (has_window_columns) {
      if (!fields[4].empty()) {
        double start = reader.parse_double(fields[4], "start_s");
        if (start < 0.0) {
          reader.fail("out_of_range", "start_s " + fields[4] + " is negative");
        }
        c.start_s = start;
      }
      if (!fields[5].empty()) {
        double dur = reader.parse_double(fields[5], "duration_s");
        if (dur <= 0.0) {
          reader.fail("out_of_range", "duration_s " + fields[5] + " is not positive");
        }
        c.duration_s = dur;
      }
    }
    if (!seen.insert({c.patient_id, c.modality.name, c.chunk_index}).second) {
      reader.fail("duplicate", "duplicate chunk (" + c.patient_id + ", " +
                                   c.modality.name + ", " +
                                   std::to_string(c.chunk_index) + ")");
    }
    chunks.push_back(std::move(c));
  }

  // Chunk indices per (patient, modality) must form 0..k-1.
  std::map<std::pair<std::string, std::string>, std::vector<int>> indices;
  for (const ChunkScore& c : chunks) {
    indices[{c.patient_id, c.modality.name}].push_back(c.chunk_index);
  }
  for (auto& [key, idx] : indices) {
    std::sort(idx.begin(), idx.end());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] != static_cast<int>(i)) {
        throw ValidationError(
            "non_contiguous",
            context + ": non-contiguous chunk indices for (" + key.first +
                ", " + key.second + "): expected " + std::to_string(i) +
                ", found " + std::to_string(idx[i]));
      }
    }
  }
  return chunks;
}

std::vector<LabelRecord> parse_labels(std::istream& in, int phq8_threshold,
                                      const std::string& context) {
  CsvReader reader(in, context);

  std::vector<std::string> fields;
  if (!reader.next(fields)) {
    reader.fail("empty_file", "file is empty, expected header 'patient_id,phq8'");
  }
  const std::string header = join(fields, ",");
  bool has_label_column;
  if (header == "patient_id,phq8") {
    has_label_column = false;
  } else if (header == "patient_id,phq8,label") {
    has_label_column = true;
  } else {
    reader.fail("bad_header",
                "expected header 'patient_id,phq8' (optionally ',label'), got '" +
                    header + "'");
  }
  const std::size_t n_columns = has_label_column ? 3 : 2;

  std::vector<LabelRecord> labels;
  std::set<std::string> seen;
  while (reader.next(fields)) {
    if (fields.size() != n_columns) {
      reader.fail("malformed_row", "expected " + std::to_string(n_columns) +
                                       " fields, got " +
                                       std::to_string(fields.size()));
    }
    LabelRecord rec;
    rec.patient_id = fields[0];
    if (rec.patient_id.empty()) {
      reader.fail("malformed_row", "empty patient_id");
    }
    rec.phq8 = reader.parse_int(fields[1], "phq8");
    if (rec.phq8 < 0 || rec.phq8 > kPhq8Max) {
      reader.fail("out_of_range", "phq8 score " + fields[1] + " outside [0, " +
                                      std::to_string(kPhq8Max) + "]");
    }
    rec.label = binarize_phq8(rec.phq8, phq8_threshold);
    if (has_label_column) {
      int stored = reader.parse_int(fields[2], "label");
      if (stored != rec.label) {
        reader.fail("label_mismatch",
                    "stored label " + fields[2] + " contradicts phq8 " +
                        fields[1] + " at threshold " +
                        std::to_string(phq8_threshold));
      }
    }
    if (!seen.insert(rec.patient_id).second) {
      reader.fail("duplicate", "duplicate patient_id '" + rec.patient_id + "'");
    }
    labels.push_back(std::move(rec));
  }
  return labels;
}

std::vector<SplitAssignment> parse_splits(std::istream& in,
                                          const std::string& context) {
  CsvReader reader(in, context);
  reader.expect_header("patient_id,split");

  std::vector<SplitAssignment> splits;
  std::set<std::string> seen;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() != 2) {
      reader.fail("malformed_row",
                  "expected 2 fields, got " + std::to_string(fields.size()));
    }
    SplitAssignment s;
    s.patient_id = fields[0];
    if (s.patient_id.empty()) {
      reader.fail("malformed_row", "empty patient_id");
    }
    if (fields[1] == "fit") {
      s.split = Split::kFit;
    } else if (fields[1] == "test") {
      s.split = Split::kTest;
    } else {
      reader.fail("unknown_split",
                  "split must be 'fit' or 'test', got '" + fields[1] + "'");
    }
    if (!seen.insert(s.patient_id).second) {
      reader.fail("duplicate", "duplicate patient_id '" + s.patient_id + "'");
    }
    splits.push_back(std::move(s));
  }
  return splits;
}

ValidatedDataset ValidatedDataset::validate(std::vector<ChunkScore> chunks,
                                            std::vector<LabelRecord> labels,
                                            std::vector<SplitAssignment> splits,
                                            std::vector<Modality> modalities,
                                            const ValidateOptions& options) {
  if (modalities.empty()) {
    throw ValidationError("no_modalities", "no modalities configured");
  }
  {
    std::set<std::string> names;
    for (const Modality& m : modalities) {
      if (!names.insert(m.name).second) {
        throw ValidationError("duplicate", "duplicate modality '" + m.name + "'");
      }
    }
  }

  std::map<std::string, int> label_by_patient;
  for (const LabelRecord& rec : labels) {
    if (!label_by_patient.emplace(rec.patient_id, rec.label).second) {
      throw ValidationError("duplicate",
                            "duplicate label for patient " + rec.patient_id);
    }
    if (rec.label != 0 && rec.label != 1) {
      throw ValidationError("label_mismatch",
                            "label for patient " + rec.patient_id +
                                " is not binary");
    }
  }

  std::map<std::string, Split> split_by_patient;
  for (const SplitAssignment& s : splits) {
    if (!split_by_patient.emplace(s.patient_id, s.split).second) {
      throw ValidationError("duplicate",
                            "duplicate split for patient " + s.patient_id);
    }
    if (!label_by_patient.contains(s.patient_id)) {
      throw ValidationError("unknown_patient",
                            "split references unknown patient " + s.patient_id);
    }
  }

  std::set<std::string> patients_with_chunks;
  for (const ChunkScore& c : chunks) {
    if (!std::any_of(modalities.begin(), modalities.end(),
                     [&](const Modality& m) { return m == c.modality; })) {
      throw ValidationError("unknown_modality",
                            "chunk for unknown modality '" + c.modality.name + "'");
    }
    if (!label_by_patient.contains(c.patient_id)) {
      throw ValidationError("unlabeled_patient",
                            "unlabeled patient " + c.patient_id);
    }
    if (!split_by_patient.contains(c.patient_id)) {
      throw ValidationError("unassigned_patient",
                            "patient " + c.patient_id + " has no split assignment");
    }
    patients_with_chunks.insert(c.patient_id);
  }

  DatasetSummary summary;
  for (const LabelRecord& rec : labels) {
    if (!split_by_patient.contains(rec.patient_id)) {
      throw ValidationError("unassigned_patient",
                            "patient " + rec.patient_id + " has no split assignment");
    }
    if (!patients_with_chunks.contains(rec.patient_id)) {
      std::string msg = "patient " + rec.patient_id + " has a label but no chunks";
      if (options.unmatched_label_is_error) {
        throw ValidationError("chunkless_patient", msg);
      }
      summary.warnings.push_back(msg);
    }
  }

  // Split sanity: both non-empty, fit covers both classes.
  std::size_t n_fit = 0;
  std::size_t n_test = 0;
  std::size_t fit_pos = 0;
  std::size_t fit_neg = 0;
  for (const auto& [patient, split] : split_by_patient) {
    if (split == Split::kFit) {
      ++n_fit;
      if (label_by_patient.at(patient) == 1) {
        ++fit_pos;
      } else {
        ++fit_neg;
      }
    } else {
      ++n_test;
    }
  }
  if (n_fit == 0) {
    throw ValidationError("empty_split", "fit split is empty");
  }
  if (n_test == 0) {
    throw ValidationError("empty_split", "test split is empty");
  }
  if (fit_pos == 0) {
    throw ValidationError("degenerate_split", "fit split lacks positive class");
  }
  if (fit_neg == 0) {
    throw ValidationError("degenerate_split", "fit split lacks negative class");
  }

  // Canonical order: patients ascending; modalities in declared order;
  // chunk indices ascending.
  std::map<std::string, std::size_t> modality_rank;
  for (std::size_t i = 0; i < modalities.size(); ++i) {
    modality_rank[modalities[i].name] = i;
  }
  std::sort(chunks.begin(), chunks.end(),
            [&](const ChunkScore& a, const ChunkScore& b) {
              return std::tuple(a.patient_id, modality_rank.at(a.modality.name),
                                a.chunk_index) <
                     std::tuple(b.patient_id, modality_rank.at(b.modality.name),
                                b.chunk_index);
            });
  std::sort(labels.begin(), labels.end(),
            [](const LabelRecord& a, const LabelRecord& b) {
              return a.patient_id < b.patient_id;
            });
  std::sort(splits.begin(), splits.end(),
            [](const SplitAssignment& a, const SplitAssignment& b) {
              return a.patient_id < b.patient_id;
            });

  summary.n_patients = labels.size();
  for (const LabelRecord& rec : labels) {
    if (rec.label == 1) {
      ++summary.n_positive;
    } else {
      ++summary.n_negative;
    }
  }
  summary.prevalence = summary.n_patients == 0
                           ? 0.0
                           : static_cast<double>(summary.n_positive) /
                                 static_cast<double>(summary.n_patients);
  summary.n_fit = n_fit;
  summary.n_test = n_test;
  for (const Modality& m : modalities) {
    std::size_t count = 0;
    for (const ChunkScore& c : chunks) {
      if (c.modality == m) ++count;
    }
    summary.chunks_per_modality.push_back({m, count});
  }

  ValidatedDataset ds;
  ds.chunks_ = std::move(chunks);
  ds.labels_ = std::move(labels);
  ds.splits_ = std::move(splits);
  ds.modalities_ = std::move(modalities);
  ds.summary_ = std::move(summary);
  return ds;
}

int ValidatedDataset::label_of(const std::string& patient_id) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), patient_id,
                             [](const LabelRecord& rec, const std::string& id) {
                               return rec.patient_id < id;
                             });
  if (it == labels_.end() || it->patient_id != patient_id) {
    throw ValidationError("unknown_patient", "no label for patient " + patient_id);
  }
  return it->label;
}

Split ValidatedDataset::split_of(const std::string& patient_id) const {
  auto it = std::lower_bound(splits_.begin(), splits_.end(), patient_id,
                             [](const SplitAssignment& s, const std::string& id) {
                               return s.patient_id < id;
                             });
  if (it == splits_.end() || it->patient_id != patient_id) {
    throw ValidationError("unknown_patient", "no split for patient " + patient_id);
  }
  return it->split;
}

void write_chunk_scores(std::ostream& out, std::span<const ChunkScore> chunks) {
  bool has_window_columns =
      std::any_of(chunks.begin(), chunks.end(), [](const ChunkScore& c) {
        return c.start_s.has_value() || c.duration_s.has_value();
      });
  out << (has_window_columns ? kChunkHeaderLong : kChunkHeaderShort) << '\n';
  for (const ChunkScore& c : chunks) {
    out << c.patient_id << ',' << c.modality.name << ',' << c.chunk_index << ','
        << format_double(c.score);
    if (has_window_columns) {
      out << ',' << (c.start_s ? format_double(*c.start_s) : std::string())
          << ',' << (c.duration_s ? format_double(*c.duration_s) : std::string());
    }
    out << '\n';
  }
}

void write_labels(std::ostream& out, std::span<const LabelRecord> labels) {
  out << "patient_id,phq8\n";
  for (const LabelRecord& rec : labels) {
    out << rec.patient_id << ',' << rec.phq8 << '\n';
  }
}

void write_splits(std::ostream& out, std::span<const SplitAssignment> splits) {
  out << "patient_id,split\n";
  for (const SplitAssignment& s : splits) {
    out << s.patient_id << ',' << split_name(s.split) << '\n';
  }
}

}  // namespace fuseval
