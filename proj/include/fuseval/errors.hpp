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

#include <stdexcept>
#include <string>
#include <utility>

namespace fuseval {

// Base error carrying a stable machine-readable kind next to the human
// message. Kinds are short snake_case identifiers ("out_of_range",
// "duplicate", "degenerate_labels", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Invalid inputs: malformed files, violated invariants, bad parameters.
// The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Fitting cannot proceed (degenerate fit data, numerical failure).
// The CLI maps these to exit code 3.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace fuseval
