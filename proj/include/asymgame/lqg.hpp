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

namespace asymgame {

/// Single-player LQG for the minimizer with the maximizer's input absent:
/// control Riccati for (A, B1, Q, R), one-step predictor Riccati for (A, C1, W, V1).
struct LqgSolution {
    Mat P;      ///< control cost-to-go
    Mat K;      ///< u = K z, m1 x n
    Mat sigma;  ///< stationary a priori error covariance
    Mat L;      ///< innovation gain sigma C^T (C sigma C^T + V)^{-1}
    double J = 0.0;  ///< tr(P W) + tr(K^T (R + B^T P B) K sigma)
    std::size_t iterations = 0;
    bool converged = false;
};

/// Iterates both Riccati maps to a relative change below tol.
LqgSolution classical_lqg(const StageMatrices& s, double tol = 1e-13, std::size_t max_iter = 10000000);

}  // namespace asymgame
