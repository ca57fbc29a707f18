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

#include <optional>
#include <ostream>
#include <string>

#include "fuseval/decision.hpp"
#include "fuseval/metrics.hpp"
#include "fuseval/reliability.hpp"

namespace fuseval {

// Self-contained deterministic SVG plots: no timestamps, no external assets,
// byte-identical output for identical inputs.

void write_roc_svg(std::ostream& out, const RocResult& roc,
                   const std::optional<RocBand>& band,
                   const std::optional<BootstrapCI>& ci,
                   const std::string& title);

void write_reliability_svg(std::ostream& out, const CalibrationReport& report,
                           const std::string& title);

void write_dca_svg(std::ostream& out, const NetBenefitCurve& curve,
                   const std::string& title);

}  // namespace fuseval
