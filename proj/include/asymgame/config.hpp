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

#include "asymgame/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace asymgame {

using json = nlohmann::json;

/// A parsed, not yet validated, model document.
struct ModelConfig {
    std::optional<std::size_t> horizon;  ///< nullopt for "infinite"
    std::vector<StageMatrices> stages;   ///< one entry when every matrix is time-invariant
    Mat Q_T;                             ///< defaults to the last stage's Q
    Vec x0_mean;                         ///< defaults to 0
    Mat x0_cov;                          ///< defaults to 0 (fixed x_0)

    bool time_invariant() const { return stages.size() == 1; }
};

/**
 * Schema: {"horizon": int | "infinite",
 *          "template": {"name": "double_integrator_2d", "dt": 0.1}  (optional),
 *          "matrices": {"A", "B1", "B2", "W", "C1", "C2", "V1", "V2", "Q", "R", "S" | "R2",
 *                       "Q_T"?, "x0_mean"?, "x0_cov"?}}
 * A matrix is a 2-D array, or an array of T 2-D arrays. The template supplies A,
 * B1 = B and B2 = -B unless those are given explicitly. Throws ParseError naming
 * the field path.
 */
ModelConfig parse_model_config(const json& doc);
ModelConfig read_model_config(const std::string& path);

/// Expands to T stages (horizon override wins over the document's horizon).
GameModel to_game(const ModelConfig& cfg, std::optional<std::size_t> horizon = std::nullopt);
/// Requires a time-invariant document.
StationaryModel to_stationary(const ModelConfig& cfg);

using LoadedModel = std::variant<ValidatedGame, ValidatedStationary>;
/// Finite horizon gives a game, "infinite" a stationary model; both validated.
LoadedModel load_model(const json& doc);
LoadedModel load_model(const std::string& path);

/// Canonical documents; matrices equal across stages collapse to one array.
json save_model(const GameModel& m);
json save_model(const StationaryModel& m);

/// FNV-1a 64 over the canonical dump.
std::uint64_t model_hash(const json& doc);
std::string hex_hash(std::uint64_t h);

json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j, const std::string& path);
json vector_to_json(const Vec& v);
Vec vector_from_json(const json& j, const std::string& path);

/// A = [I dt I; 0 I], B = [0; dt I] on (position, velocity) in the plane.
void double_integrator_2d(double dt, Mat& A, Mat& B);

const std::vector<std::string>& scenario_names();
/// Throws UnknownScenario listing the valid names.
json scenario(const std::string& name);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace asymgame
