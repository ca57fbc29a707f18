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

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace fuseval {

// Minimal comma-delimited reader for the fixed fuseval schemas: no quoting,
// no escapes, UTF-8 passthrough, '\r' stripped. Line numbers are physical
// (header = line 1) and show up in every parse error.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in, std::string context)
      : in_(in), context_(std::move(context)) {}

  // Reads the next non-empty line into `fields`. Returns false at EOF.
  bool next(std::vector<std::string>& fields);

  std::size_t line_no() const noexcept { return line_no_; }
  const std::string& context() const noexcept { return context_; }

  // Reads the header line and checks it against `expected` (a comma-joined
  // header). Throws ValidationError on mismatch or empty input.
  void expect_header(const std::string& expected);

  [[noreturn]] void fail(const std::string& kind, const std::string& what) const;

  double parse_double(const std::string& field, const std::string& column) const;
  int parse_int(const std::string& field, const std::string& column) const;

 private:
  std::istream& in_;
  std::string context_;
  std::size_t line_no_ = 0;
};

// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double value);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

std::vector<std::string> split(const std::string& text, char sep);

}  // namespace fuseval
