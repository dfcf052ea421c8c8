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

#include "asymgame/dp.hpp"
#include "asymgame/filtering.hpp"
#include "asymgame/model.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace asymgame {

/// How the filter weight Gamma evolves across iterations.
enum class GammaPolicy {
    Fixed,            ///< Gamma stays at its initial value (default)
    RefreshFromCost,  ///< Gamma_t <- error block of P_t where it has the required signs
};

struct GammaFlags {
    bool g11_positive = false;
    bool g22_negative = false;
    bool ok() const { return g11_positive && g22_negative; }
};

struct ExtractedGamma {
    WeightSequence gammas;  // stages 0 .. T
    std::vector<GammaFlags> flags;
};

/// Gamma_t = lower-right 2n x 2n block of P_t, with sign checks recorded.
ExtractedGamma extract_gamma(const std::vector<CostQuadratic>& costs);

struct FiniteOptions {
    double tol = 1e-9;
    std::size_t max_iter = 10000;
    double damping = 1.0;  ///< K <- (1 - a) K_prev + a K_new
    GammaPolicy gamma = GammaPolicy::Fixed;
    InnovationOptions innovation;
};

struct FiniteDiagnostics {
    bool converged = false;
    std::size_t iterations = 0;
    double residual = 0.0;
    std::vector<double> history;          ///< residual per iteration; entry 0 is +inf
    std::vector<GammaFlags> gamma_flags;   ///< from the last backward pass, stages 0 .. T
    std::size_t gamma_fallbacks = 0;       ///< stages where a refresh kept the initial Gamma
    double max_filter_gain_residual = 0.0;
    double max_stationarity_residual = 0.0;
};

struct FiniteEquilibrium {
    GainSequence gains;
    ForwardResult forward;  // the pass whose filters the gains were computed against
    std::vector<CostQuadratic> costs;
    WeightSequence gammas;
    FiniteDiagnostics diagnostics;

    const FilterParams& filters() const { return forward.filters; }
};

/// Alternates Forward(M, K, Gamma) and Backward(M, F) until
/// ||K - K^-|| + ||F - F^-|| <= tol. On non-convergence the lowest-residual
/// iterate is returned with converged = false.
FiniteEquilibrium solve_finite(const ValidatedGame& model, const FiniteOptions& opts = {},
                               const std::optional<GainSequence>& K_init = std::nullopt,
                               const std::optional<WeightSequence>& gamma_init = std::nullopt);

/// E[X_0^T P_0 X_0] + r_0 with X_0 = (x_0, x_0 - xbar_0, x_0 - xbar_0).
double finite_value(const FiniteEquilibrium& eq, const Vec& x0_mean, const Mat& X0);
double finite_value(const CostQuadratic& c0, const Vec& x0_mean, const Mat& X0);

/// Frobenius distance over stacked stage matrices.
double gain_distance(const GainSequence& a, const GainSequence& b);
/// Over the (A^i, Bbar^i, Lbar^i) stacks.
double filter_distance(const FilterParams& a, const FilterParams& b);

}  // namespace asymgame
