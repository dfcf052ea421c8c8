/*
 Copyright 2026 The asymgame Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace asymgame {

enum class ErrorKind {
    DimensionMismatch,
    DefinitenessViolation,
    AsymmetryBeyondTolerance,
    ParseError,
    SingularInnovation,
    SingularWeightBlock,
    CoupledSystemSingular,
    CovarianceIndefinite,
    ConvexityViolation,
    ConcavityViolation,
    SchurSingular,
    GainRouteMismatch,
    UnstableClosedLoop,
    IndefiniteCovariance,
    UnknownScenario,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. The kind is stable and is what
/// callers (and the CLI exit-code mapping) branch on; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> stage = std::nullopt);

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> stage() const noexcept { return stage_; }
    const std::string& detail() const noexcept { return detail_; }

    /// Same error tagged with the stage index it occurred at.
    Error at_stage(std::size_t t) const;

private:
    ErrorKind kind_;
    std::optional<std::size_t> stage_;
    std::string detail_;
};

}  // namespace asymgame
