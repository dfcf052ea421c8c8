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
#include "asymgame/error.hpp"

#include <fmt/format.h>

namespace asymgame {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::DefinitenessViolation: return "DefinitenessViolation";
        case ErrorKind::AsymmetryBeyondTolerance: return "AsymmetryBeyondTolerance";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::SingularInnovation: return "SingularInnovation";
        case ErrorKind::SingularWeightBlock: return "SingularWeightBlock";
        case ErrorKind::CoupledSystemSingular: return "CoupledSystemSingular";
        case ErrorKind::CovarianceIndefinite: return "CovarianceIndefinite";
        case ErrorKind::ConvexityViolation: return "ConvexityViolation";
        case ErrorKind::ConcavityViolation: return "ConcavityViolation";
        case ErrorKind::SchurSingular: return "SchurSingular";
        case ErrorKind::GainRouteMismatch: return "GainRouteMismatch";
        case ErrorKind::UnstableClosedLoop: return "UnstableClosedLoop";
        case ErrorKind::IndefiniteCovariance: return "IndefiniteCovariance";
        case ErrorKind::UnknownScenario: return "UnknownScenario";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

namespace {

std::string compose(ErrorKind kind, const std::string& detail, std::optional<std::size_t> stage) {
    if (stage) return fmt::format("{} at stage {}: {}", to_string(kind), *stage, detail);
    return fmt::format("{}: {}", to_string(kind), detail);
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> stage)
    : std::runtime_error(compose(kind, message, stage)), kind_(kind), stage_(stage), detail_(message) {}

Error Error::at_stage(std::size_t t) const { return Error(kind_, detail_, t); }

}  // namespace asymgame
