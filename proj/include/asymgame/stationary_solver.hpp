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
#include "asymgame/finite_solver.hpp"
#include "asymgame/model.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace asymgame {

struct StationaryOptions {
    double tol = 1e-10;
    std::size_t max_iter = 100000;
    GammaPolicy gamma = GammaPolicy::Fixed;
    InnovationOptions innovation;
};

/// Starting point of the value iteration. Defaults: Sigma = I, P = blockdiag(Q, 0, 0),
/// K = 0, Gamma from P's error block or blockdiag(I, -I) when that block is zero.
struct StationaryInit {
    Mat sigma;
    Mat P;
    GainStage gains;
    WeightMatrix gamma;

    static StationaryInit standard(const StationaryModel& m);
};

struct ForwardStep {
    JointCovariance sigma;  // next a priori covariance
    FilterGains L;          // equilibrium gains at the input covariance
};

/// Sigma' = Abar (J Sigma J^T + Lbar Vbar Lbar^T) Abar^T + blockdiag(W, W), with the
/// innovation gains solved at Sigma and J = blockdiag(I - L1C1, I - L2C2).
ForwardStep forward_operator(const ValidatedStationary& model, const JointCovariance& sigma, const GainStage& K,
                             const WeightMatrix& gamma, const InnovationOptions& opts = {});

struct BackwardStep {
    CostQuadratic P;
    EquilibriumGains gains;
    StationarityResidual residual;
};

/// P' = T^T Q(P) T with the saddle gains of Q(P).
BackwardStep backward_operator(const ValidatedStationary& model, const CostQuadratic& P, const FilterStage& filter);

struct StationaryDiagnostics {
    bool converged = false;
    std::size_t iterations = 0;
    double residual = 0.0;
    std::vector<double> history;  ///< ||Sigma - Sigma^-|| + ||P - P^-|| per iteration
    double spectral_radius = 0.0;  ///< of the closed-loop augmented matrix
    bool stable = false;
    GammaFlags gamma_flags;
    std::size_t gamma_fallbacks = 0;
    double filter_gain_residual = 0.0;
    double stationarity_residual = 0.0;
    Mat sigma0;  ///< starting covariance, for reproducibility
};

struct StationarySolution {
    JointCovariance sigma;
    CostQuadratic P;
    GainStage gains;
    FilterStage filter;
    WeightMatrix gamma;
    double J = 0.0;            ///< tr(P G W G^T)
    double J_lyapunov = 0.0;   ///< tr(Lambda Sigma_X); NaN when the loop is unstable
    Mat state_covariance;      ///< Sigma_X of (x, e^1, e^2); empty when unstable
    StationaryDiagnostics diagnostics;
};

/// Value iteration with the forward and backward operators until
/// ||Sigma - Sigma^-|| + ||P - P^-|| <= tol. Non-convergence returns the
/// lowest-residual iterate with converged = false.
StationarySolution value_iterate(const ValidatedStationary& model, const StationaryOptions& opts = {},
                                 const std::optional<StationaryInit>& init = std::nullopt);

/// tr(P G W G^T).
double average_cost(const CostQuadratic& P, const FilterStage& filter, const StageMatrices& s);

/// A_aug + B1_aug [K1 -K1 0] + B2_aug [K2 0 -K2].
Mat closed_loop_matrix(const StageMatrices& s, const GainStage& K, const FilterStage& filter);

/// X = A X A^T + Q. Vectorized direct solve for A up to 60 x 60, fixed-point
/// iteration (tol 1e-12, at most 1e6 sweeps) beyond.
Mat solve_discrete_lyapunov(const Mat& A, const Mat& Q);

/// Stationary second moment of X; throws UnstableClosedLoop when rho(A_cl) >= 1.
Mat stationary_state_covariance(const StageMatrices& s, const GainStage& K, const FilterStage& filter);

/// tr(Lambda Sigma_X), Lambda = Q_aug + KK1^T R KK1 + KK2^T S KK2.
double lyapunov_cost(const StageMatrices& s, const GainStage& K, const FilterStage& filter);

}  // namespace asymgame
