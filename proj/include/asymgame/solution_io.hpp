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

#include "asymgame/config.hpp"
#include "asymgame/finite_solver.hpp"
#include "asymgame/simulator.hpp"
#include "asymgame/stationary_solver.hpp"

#include <optional>
#include <string>

namespace asymgame {

inline constexpr const char* kToolVersion = "1.0.0";

json stage_gains_to_json(const GainStage& g);
GainStage stage_gains_from_json(const json& j, const std::string& path);
json filter_to_json(const FilterStage& f);
FilterStage filter_from_json(const json& j, const std::string& path);

/// Solution documents echo the model (canonical form and hash), the options,
/// gains, filters, cost matrices, covariances, J and diagnostics.
json stationary_solution_document(const StationaryModel& model, const StationarySolution& sol,
                                  const StationaryOptions& opts);
json finite_solution_document(const GameModel& model, const FiniteEquilibrium& eq, const FiniteOptions& opts);

/// What simulate needs back from a solution document.
struct LoadedSolution {
    std::string solver;  ///< "stationary" or "finite"
    ClosedLoop loop;
    double J = 0.0;
    std::optional<ValidatedGame> game;
    std::optional<ValidatedStationary> stationary;
    std::vector<CostQuadratic> costs;  ///< finite: 0..T; stationary: one entry
    Mat state_covariance;              ///< stationary only, may be empty
    std::uint64_t model_hash = 0;

    /// J recomputed from the stored P (average_cost or finite_value).
    double reevaluate() const;
};

LoadedSolution load_solution(const json& doc);

/// `t,x_1..x_n,z1_1..,z2_1..,u1_1..,u2_1..,stage_cost`; the last row (t = T)
/// carries the terminal cost and empty inputs. 17 significant digits.
std::string trajectory_csv(const Trajectory& tr);
std::string mean_trajectory_csv(const RolloutStats& st);

}  // namespace asymgame
