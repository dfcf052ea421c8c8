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
#include "asymgame/model.hpp"
#include "asymgame/stage_types.hpp"

#include <cstddef>
#include <vector>

namespace asymgame {

/// J_t(X) = X^T P X + r over X = (x, e^1, e^2).
struct CostQuadratic {
    Mat P;  // 3n x 3n
    double r = 0.0;
    std::size_t stage = 0;
};

/// Blocks of the stage Q-matrix over (X, u1, u2).
struct QBlocks {
    Mat Q00, Q01, Q02, Q11, Q12, Q22;

    Mat assembled() const;
};

QBlocks q_matrix(const CostQuadratic& next, const AugmentedStepMatrices& aug, const Mat& R, const Mat& S);

/// Full saddle-point gains over X (m_i x 3n) and the estimate gains K^i
/// (their leftmost n columns).
struct EquilibriumGains {
    Mat Kbar1;
    Mat Kbar2;
    GainStage gains;
};

/// Throws ConvexityViolation (Q11 not > 0), ConcavityViolation (Q22 not < 0),
/// SchurSingular, or GainRouteMismatch when the Schur-complement formulas and
/// a direct solve of the joint first-order system disagree by more than 1e-8.
EquilibriumGains solve_equilibrium_gains(const QBlocks& q, Index n);

/// Relative residuals of Q11 K1 + Q12 K2 = -Q01^T and Q12^T K1 + Q22 K2 = -Q02^T.
struct StationarityResidual {
    double first = 0.0;
    double second = 0.0;
    double max() const { return first > second ? first : second; }
};
StationarityResidual stationarity_residual(const QBlocks& q, const Mat& Kbar1, const Mat& Kbar2);

/// P = T^T Q T, T = [I; [K1 -K1 0]; [K2 0 -K2]]; r = r' + tr(P' G W G^T).
CostQuadratic cost_update(const QBlocks& q, const GainStage& gains, const CostQuadratic& next,
                          const AugmentedStepMatrices& aug);

struct BackwardResult {
    std::vector<CostQuadratic> costs;                  // stages 0 .. T
    GainSequence gains;                                // stages 0 .. T-1
    std::vector<StationarityResidual> residuals;       // stages 0 .. T-1
};

/// Backward(M, F). Errors carry the failing stage.
BackwardResult backward_pass(const ValidatedGame& model, const FilterParams& filters);

}  // namespace asymgame
