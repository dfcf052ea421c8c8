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

#include "asymgame/finite_solver.hpp"
#include "asymgame/model.hpp"
#include "asymgame/random.hpp"
#include "asymgame/stationary_solver.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace asymgame {

/// Model, gains and filters of a solved game, in the form rollouts consume.
/// A single stage is broadcast to every time step.
struct ClosedLoop {
    std::vector<StageMatrices> stages;
    GainSequence gains;
    FilterParams filters;
    Mat terminal_cost;  ///< Q_T, or empty for average-cost runs

    bool broadcast() const { return stages.size() == 1; }
    std::size_t index(std::size_t t) const { return broadcast() ? 0 : t; }
    Dimensions dims() const { return dimensions_of(stages.front()); }

    static ClosedLoop finite(const ValidatedGame& model, const FiniteEquilibrium& eq);
    static ClosedLoop stationary(const ValidatedStationary& model, const StationarySolution& sol);
};

enum class InitKind {
    Fixed,       ///< x_0, z^1_0, z^2_0 given
    Gaussian,    ///< x_0 ~ N(mean, cov), z^i_0 = mean
    Stationary,  ///< (x, e^1, e^2) ~ N(0, Sigma_X); filters consume y_0
};

struct InitSpec {
    InitKind kind = InitKind::Fixed;
    Vec x0, z0_1, z0_2;  // Fixed
    Vec mean;            // Gaussian
    Mat cov;             // Gaussian: n x n; Stationary: 3n x 3n

    static InitSpec fixed(Vec x0, Vec z1, Vec z2);
    static InitSpec gaussian(Vec mean, Mat cov);
    static InitSpec stationary(Mat state_covariance);
};

struct Trajectory {
    std::vector<Vec> x, z1, z2;  // t = 0 .. T
    std::vector<Vec> u1, u2;     // t = 0 .. T-1
    std::vector<Vec> y1, y2;     // t = 0 .. T-1, y_0 included even when unused
    std::vector<double> stage_cost;
    double terminal_cost = 0.0;
    double total_cost = 0.0;  ///< sum of stage costs plus terminal cost
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::size_t steps() const { return stage_cost.size(); }
};

/**
 * One closed-loop run on stream (seed, stream). Per step: u^i = K^i z^i, stage
 * cost x'Qx + u1'R u1 + u2'S u2, x' = A x + B1 u1 + B2 u2 + w, and each filter
 * takes y^i_t = C^i x_t + v^i_t. The step-0 measurement is discarded except for
 * stationary starts. Draw order per step: x_0 (once), w, v^1, v^2.
 * With noise = false all draws are zero (the mean propagation).
 */
Trajectory rollout(const ClosedLoop& loop, const InitSpec& init, std::size_t T, std::uint64_t seed,
                   std::uint64_t stream, bool noise = true);

struct RolloutStats {
    std::size_t rollouts = 0;
    std::size_t steps = 0;
    std::vector<Vec> mean_x, mean_z1, mean_z2;  // t = 0 .. T
    std::vector<Vec> mean_u1, mean_u2;          // t = 0 .. T-1
    std::vector<double> mean_stage_cost;
    std::vector<double> total_costs;  ///< per rollout
    double mean_total_cost = 0.0;
    double stderr_total_cost = 0.0;
    double average_stage_cost = 0.0;  ///< (1 / (N T)) sum of realized stage costs
    double stderr_average_stage_cost = 0.0;
    Vec time_avg_error_mean;    ///< mean over rollouts of the time-averaged (e^1, e^2)
    Vec time_avg_error_stderr;  ///< its componentwise standard error
    Mat error_moment;           ///< E[e e^T] over rollouts and t in [error_from, T]
};

struct MonteCarloOptions {
    std::size_t error_from = 0;  ///< first time step in error_moment
    int threads = 0;             ///< 0: OpenMP default capped by ASYMGAME_THREADS
};

/// N rollouts on streams 0..N-1, parallel over blocks of 64 rollouts; partial
/// sums are combined in rollout order so the result does not depend on threads.
RolloutStats monte_carlo(const ClosedLoop& loop, const InitSpec& init, std::size_t N, std::size_t T,
                         std::uint64_t seed, const MonteCarloOptions& opts = {});

/// Single-threaded reference of monte_carlo; bit-identical output.
RolloutStats monte_carlo_serial(const ClosedLoop& loop, const InitSpec& init, std::size_t N, std::size_t T,
                                std::uint64_t seed, const MonteCarloOptions& opts = {});

/// Thread count from ASYMGAME_THREADS and the OpenMP runtime.
int rollout_threads(int requested = 0);

}  // namespace asymgame
