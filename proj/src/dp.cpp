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
#include "asymgame/dp.hpp"

#include "asymgame/error.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace asymgame {

Mat QBlocks::assembled() const {
    const Index a = Q00.rows(), m1 = Q11.rows(), m2 = Q22.rows();
    Mat out(a + m1 + m2, a + m1 + m2);
    out << Q00, Q01, Q02,                                   //
        Q01.transpose(), Q11, Q12,                          //
        Q02.transpose(), Q12.transpose(), Q22;
    return out;
}

QBlocks q_matrix(const CostQuadratic& next, const AugmentedStepMatrices& aug, const Mat& R, const Mat& S) {
    const Mat& P = next.P;
    if (P.rows() != aug.A.rows() || R.rows() != aug.B1.cols() || S.rows() != aug.B2.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "Q-matrix inputs have inconsistent shapes");
    }
    const Mat PA = P * aug.A, PB1 = P * aug.B1, PB2 = P * aug.B2;
    QBlocks q;
    q.Q00 = symmetrized(aug.Q + aug.A.transpose() * PA);
    q.Q01 = aug.A.transpose() * PB1;
    q.Q02 = aug.A.transpose() * PB2;
    q.Q11 = symmetrized(R + aug.B1.transpose() * PB1);
    q.Q12 = aug.B1.transpose() * PB2;
    q.Q22 = symmetrized(S + aug.B2.transpose() * PB2);
    return q;
}

EquilibriumGains solve_equilibrium_gains(const QBlocks& q, Index n) {
    const Eigen::LLT<Mat> l11(q.Q11);
    if (l11.info() != Eigen::Success) {
        throw Error(ErrorKind::ConvexityViolation, "Q11 is not positive definite (minimizer problem not convex)");
    }
    const Mat negQ22 = -q.Q22;
    const Eigen::LLT<Mat> l22(negQ22);
    if (l22.info() != Eigen::Success) {
        throw Error(ErrorKind::ConcavityViolation, "Q22 is not negative definite (upper value unbounded)");
    }

    // Q22^{-1} X = -(-Q22)^{-1} X.
    const Mat Q22inv_Q12t = -l22.solve(Mat(q.Q12.transpose()));
    const Mat Q22inv_Q02t = -l22.solve(Mat(q.Q02.transpose()));
    const Mat Q11inv_Q12 = l11.solve(q.Q12);
    const Mat Q11inv_Q01t = l11.solve(Mat(q.Q01.transpose()));

    const Mat schur1 = symmetrized(q.Q11 - q.Q12 * Q22inv_Q12t);
    const Mat negschur2 = symmetrized(-(q.Q22 - q.Q12.transpose() * Q11inv_Q12));
    const Eigen::LLT<Mat> s1(schur1);
    const Eigen::LLT<Mat> s2(negschur2);
    if (s1.info() != Eigen::Success || s2.info() != Eigen::Success) {
        throw Error(ErrorKind::SchurSingular, "Schur complement of the saddle system is singular");
    }

    EquilibriumGains out;
    out.Kbar1 = s1.solve(Mat(q.Q12 * Q22inv_Q02t - q.Q01.transpose()));
    out.Kbar2 = -s2.solve(Mat(q.Q12.transpose() * Q11inv_Q01t - q.Q02.transpose()));

    // Second route: the joint first-order system in one solve.
    const Index m1 = q.Q11.rows(), m2 = q.Q22.rows();
    Mat H(m1 + m2, m1 + m2);
    H << q.Q11, q.Q12, q.Q12.transpose(), q.Q22;
    Mat rhs(m1 + m2, q.Q01.rows());
    rhs << -q.Q01.transpose(), -q.Q02.transpose();
    const Mat joint = H.partialPivLu().solve(rhs);
    Mat stacked(m1 + m2, q.Q01.rows());
    stacked << out.Kbar1, out.Kbar2;
    const double gap = (joint - stacked).norm();
    if (!(gap <= 1e-8 * std::max(1.0, stacked.norm()))) {
        throw Error(ErrorKind::GainRouteMismatch,
                    fmt::format("Schur-complement and joint gain solves differ by {:.3e}", gap));
    }

    out.gains.K1 = out.Kbar1.leftCols(n);
    out.gains.K2 = out.Kbar2.leftCols(n);
    return out;
}

StationarityResidual stationarity_residual(const QBlocks& q, const Mat& Kbar1, const Mat& Kbar2) {
    const auto rel = [](const Mat& a, const Mat& b, const Mat& c) {
        const double scale = a.norm() + b.norm() + c.norm();
        const double r = (a + b + c).norm();
        return scale > 0.0 ? r / scale : r;
    };
    return {rel(q.Q11 * Kbar1, q.Q12 * Kbar2, q.Q01.transpose()),
            rel(q.Q12.transpose() * Kbar1, q.Q22 * Kbar2, q.Q02.transpose())};
}

CostQuadratic cost_update(const QBlocks& q, const GainStage& gains, const CostQuadratic& next,
                          const AugmentedStepMatrices& aug) {
    const Mat KK1 = gains.closed_loop_embedding1();
    const Mat KK2 = gains.closed_loop_embedding2();
    // T^T Q T expanded blockwise.
    const Mat Q01K = q.Q01 * KK1, Q02K = q.Q02 * KK2;
    Mat P = q.Q00 + Q01K + Q01K.transpose() + Q02K + Q02K.transpose() + KK1.transpose() * q.Q11 * KK1 +
            KK2.transpose() * q.Q22 * KK2;
    const Mat cross = KK1.transpose() * q.Q12 * KK2;
    P += cross + cross.transpose();

    CostQuadratic out;
    out.P = symmetrized(P);
    out.r = next.r + (next.P * aug.noise_covariance()).trace();
    out.stage = next.stage > 0 ? next.stage - 1 : 0;
    return out;
}

BackwardResult backward_pass(const ValidatedGame& model, const FilterParams& filters) {
    const GameModel& m = model.get();
    const std::size_t T = m.horizon();
    const Index n = m.dims().n;
    if (filters.size() != T) {
        throw Error(ErrorKind::DimensionMismatch, fmt::format("{} filter stages for horizon {}", filters.size(), T));
    }
    BackwardResult out;
    out.costs.resize(T + 1);
    out.gains.resize(T);
    out.residuals.resize(T);
    out.costs[T] = {augmented_terminal_cost(m.Q_T), 0.0, T};
    for (std::size_t k = T; k-- > 0;) {
        try {
            const StageMatrices& s = m.stages[k];
            const AugmentedStepMatrices aug = augment(s, filters[k]);
            const QBlocks q = q_matrix(out.costs[k + 1], aug, s.R, s.S);
            const EquilibriumGains eg = solve_equilibrium_gains(q, n);
            out.residuals[k] = stationarity_residual(q, eg.Kbar1, eg.Kbar2);
            out.gains[k] = eg.gains;
            out.costs[k] = cost_update(q, eg.gains, out.costs[k + 1], aug);
            out.costs[k].stage = k;
        } catch (const Error& e) {
            throw e.at_stage(k);
        }
    }
    return out;
}

}  // namespace asymgame
