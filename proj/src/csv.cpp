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

#include "fuseval/csv.hpp"

#include <charconv>
#include <cmath>

#include "fuseval/errors.hpp"

namespace fuseval {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

bool CsvReader::next(std::vector<std::string>& fields) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fields = split(line, ',');
    return true;
  }
  return false;
}

void CsvReader::expect_header(const std::string& expected) {
  std::vector<std::string> fields;
  if (!next(fields)) {
    fail("empty_file", "file is empty, expected header '" + expected + "'");
  }
  if (join(fields, ",") != expected) {
    fail("bad_header", "expected header '" + expected + "', got '" +
                           join(fields, ",") + "'");
  }
}

void CsvReader::fail(const std::string& kind, const std::string& what) const {
  throw ValidationError(kind, context_ + " line " + std::to_string(line_no_) +
                                  ": " + what);
}

double CsvReader::parse_double(const std::string& field,
                               const std::string& column) const {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    fail("malformed_number",
         "column '" + column + "': '" + field + "' is not a finite number");
  }
  return value;
}

int CsvReader::parse_int(const std::string& field,
                         const std::string& column) const {
  int value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    fail("malformed_number",
         "column '" + column + "': '" + field + "' is not an integer");
  }
  return value;
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace fuseval
