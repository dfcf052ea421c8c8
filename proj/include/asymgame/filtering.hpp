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

enum class CovariancePhase { APriori, APosteriori };

/// Second moment of (e^1, e^2), e^i = x - z^i.
struct JointCovariance {
    Mat sigma;  // 2n x 2n
    CovariancePhase phase = CovariancePhase::APriori;
    std::size_t stage = 0;

    Index n() const { return sigma.rows() / 2; }
    Mat s11() const { return sigma.topLeftCorner(n(), n()); }
    Mat s12() const { return sigma.topRightCorner(n(), n()); }
    Mat s22() const { return sigma.bottomRightCorner(n(), n()); }
};

/// Weight on the two estimation errors in the filter objective
/// tr(Gamma Sigma^+): the minimizer reduces, the maximizer increases it.
struct WeightMatrix {
    Mat gamma;  // 2n x 2n
    std::size_t stage = 0;

    Index n() const { return gamma.rows() / 2; }
    Mat g11() const { return gamma.topLeftCorner(n(), n()); }
    Mat g12() const { return gamma.topRightCorner(n(), n()); }
    Mat g22() const { return gamma.bottomRightCorner(n(), n()); }

    /// Gamma11 > 0 (tolerance 1e-10 relative).
    bool minimizer_block_positive() const;
    /// Gamma22 < 0.
    bool maximizer_block_negative() const;

    /// blockdiag(I, -I).
    static WeightMatrix standard(Index n, std::size_t stage = 0);
};

using WeightSequence = std::vector<WeightMatrix>;

struct InnovationOptions {
    double cond_cap = 1e12;  ///< largest accepted condition number of C S C^T + V
    double jitter = 0.0;     ///< eps * I added to the innovation covariance; off unless asked for
};

struct FilterGains {
    Mat L1;  // n x p1
    Mat L2;  // n x p2
};

/**
 * Equilibrium innovation gains at an a priori covariance. Zero gradient of
 * tr(Gamma Sigma^+) in L1 and L2:
 *
 *   L1 N1 + M1 L2 C2 a1 = S11 C1^T + M1 a1,   N1 = C1 S11 C1^T + V1, M1 = G11^{-1} G12, a1 = S12^T C1^T
 *   L2 N2 + M2 L1 C1 a2 = S22 C2^T + M2 a2,   N2 = C2 S22 C2^T + V2, M2 = G22^{-1} G12^T, a2 = S12 C2^T
 *
 * solved jointly in vec form. G12 = 0 gives two Kalman gains.
 */
FilterGains solve_filter_gains(const JointCovariance& sigma_minus, const WeightMatrix& gamma, const Mat& C1,
                               const Mat& C2, const Mat& V1, const Mat& V2, const InnovationOptions& opts = {});

/// Relative Frobenius residuals of the two gain equations above (no jitter).
struct GainResidual {
    double first = 0.0;
    double second = 0.0;
    double max() const { return first > second ? first : second; }
};
GainResidual filter_gain_residual(const FilterGains& gains, const JointCovariance& sigma_minus,
                                  const WeightMatrix& gamma, const Mat& C1, const Mat& C2, const Mat& V1,
                                  const Mat& V2);

/// Abar = blockdiag(A, A) at stage 0, else [[A + B2K2, -B2K2], [-B1K1, A + B1K1]].
Mat apriori_transition(const StageMatrices& s, const GainStage& k, bool initial_stage);

/// Sigma^-_{t+1} = Abar Sigma^+_t Abar^T + blockdiag(W, W).
JointCovariance apriori_cov(const JointCovariance& sigma_plus, const GainStage& k, const StageMatrices& s);

/// Joseph form: J Sigma^- J^T + Lbar Vbar Lbar^T, J = blockdiag(I - L1C1, I - L2C2).
JointCovariance aposteriori_cov(const JointCovariance& sigma_minus, const Mat& L1, const Mat& L2, const Mat& C1,
                                const Mat& C2, const Mat& V1, const Mat& V2);

/// Throws CovarianceIndefinite if min eigenvalue < -1e-10 * trace scale.
void check_covariance(const Mat& sigma, std::size_t stage);

struct ForwardResult {
    JointCovariance initial;                  // Sigma_0^+ = blockdiag(X0, X0)
    std::vector<JointCovariance> apriori;     // Sigma_1^- .. Sigma_T^-
    std::vector<JointCovariance> aposteriori; // Sigma_1^+ .. Sigma_{T-1}^+
    std::vector<FilterGains> innovation;      // L_0 (= 0) .. L_{T-1}
    FilterParams filters;                     // stages 0 .. T-1
};

/// Forward(M, K, Gamma). gains cover 0..T-1, gammas 0..T (entry 0 and T unused).
ForwardResult forward_pass(const ValidatedGame& model, const GainSequence& gains, const WeightSequence& gammas,
                           const InnovationOptions& opts = {});

/// z' = A^i z + Bbar^i u + Lbar^i (y - C^i z).
Vec filter_step(const Vec& z, const Vec& u, const Vec& y, const StageMatrices& s, const FilterStage& f, Player p);

/// z' = A^i z + Bbar^i u; the step with no measurement.
Vec filter_predict(const Vec& z, const Vec& u, const FilterStage& f, Player p);

}  // namespace asymgame
