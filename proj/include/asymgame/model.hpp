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

#include "asymgame/linalg.hpp"
#include "asymgame/stage_types.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace asymgame {

/**
 * Finite-horizon game: x_{t+1} = A_t x_t + B1_t u1_t + B2_t u2_t + w_t,
 * y^i_t = C^i_t x_t + v^i_t, cost sum_t x'Q x + u1'R u1 + u2'S u2 + x_T' Q_T x_T.
 * Player 1 minimizes, player 2 maximizes (S negative definite).
 */
struct GameModel {
    std::vector<StageMatrices> stages;  // t = 0 .. T-1
    Mat Q_T;
    Vec x0_mean;
    Mat x0_cov;

    std::size_t horizon() const { return stages.size(); }
    /// Dimensions come from stage 0, or from Q_T when T = 0.
    Dimensions dims() const;
};

/// Time-invariant model for the average-cost game.
struct StationaryModel {
    StageMatrices m;
    Dimensions dims() const { return dimensions_of(m); }
};

/// A model that passed validate_model. Immutable afterwards.
template <class Model>
class Validated {
public:
    const Model& get() const noexcept { return model_; }
    const Model* operator->() const noexcept { return &model_; }
    const Model& operator*() const noexcept { return model_; }

private:
    explicit Validated(Model m) : model_(std::move(m)) {}
    Model model_;

    friend Validated<GameModel> validate_model(GameModel raw);
    friend Validated<StationaryModel> validate_model(StationaryModel raw);
};

using ValidatedGame = Validated<GameModel>;
using ValidatedStationary = Validated<StationaryModel>;

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kDefinitenessTolerance = 1e-10;

/// Checks shapes and definiteness, symmetrizes covariance and cost matrices.
/// Throws Error{DimensionMismatch | DefinitenessViolation | AsymmetryBeyondTolerance}.
ValidatedGame validate_model(GameModel raw);
ValidatedStationary validate_model(StationaryModel raw);

/// Broadcasts a stationary model over T stages with the given terminal and initial data.
GameModel finite_from_stationary(const StationaryModel& m, std::size_t horizon, const Mat& Q_T, const Vec& x0_mean,
                                 const Mat& x0_cov);

/// Joint state/estimation-error dynamics over X = (x, e^1, e^2) for one stage:
/// X' = A X + B1 u1 + B2 u2 + G (w, v^1, v^2), noise covariance W, state cost Q.
struct AugmentedStepMatrices {
    Mat A;   // 3n x 3n
    Mat B1;  // 3n x m1
    Mat B2;  // 3n x m2
    Mat G;   // 3n x (n + p1 + p2)
    Mat W;   // (n + p1 + p2) square
    Mat Q;   // 3n x 3n

    Mat noise_covariance() const { return G * W * G.transpose(); }
};

AugmentedStepMatrices augment(const StageMatrices& stage, const FilterStage& filter);

/// blockdiag(Q_T, 0, 0).
Mat augmented_terminal_cost(const Mat& Q_T);

}  // namespace asymgame
