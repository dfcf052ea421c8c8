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
#include "asymgame/stationary_solver.hpp"

#include "asymgame/error.hpp"

#include <fmt/format.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <limits>

namespace asymgame {

StationaryInit StationaryInit::standard(const StationaryModel& m) {
    const Dimensions d = m.dims();
    StationaryInit init;
    init.sigma = Mat::Identity(2 * d.n, 2 * d.n);
    init.P = augmented_terminal_cost(m.m.Q);
    init.gains = GainStage::zero(d);
    const Mat block = init.P.bottomRightCorner(2 * d.n, 2 * d.n);
    init.gamma = block.isZero(0.0) ? WeightMatrix::standard(d.n) : WeightMatrix{block, 0};
    return init;
}

ForwardStep forward_operator(const ValidatedStationary& model, const JointCovariance& sigma, const GainStage& K,
                             const WeightMatrix& gamma, const InnovationOptions& opts) {
    const StageMatrices& s = model->m;
    ForwardStep out;
    out.L = solve_filter_gains(sigma, gamma, s.C1, s.C2, s.V1, s.V2, opts);
    const JointCovariance plus = aposteriori_cov(sigma, out.L.L1, out.L.L2, s.C1, s.C2, s.V1, s.V2);
    const Mat Ab = apriori_transition(s, K, false);
    out.sigma.sigma = symmetrized(Ab * plus.sigma * Ab.transpose() + block_diag(s.W, s.W));
    out.sigma.phase = CovariancePhase::APriori;
    check_covariance(out.sigma.sigma, 0);
    return out;
}

BackwardStep backward_operator(const ValidatedStationary& model, const CostQuadratic& P, const FilterStage& filter) {
    const StageMatrices& s = model->m;
    const AugmentedStepMatrices aug = augment(s, filter);
    const QBlocks q = q_matrix(P, aug, s.R, s.S);
    BackwardStep out;
    out.gains = solve_equilibrium_gains(q, s.A.rows());
    out.residual = stationarity_residual(q, out.gains.Kbar1, out.gains.Kbar2);
    out.P = cost_update(q, out.gains.gains, P, aug);
    out.P.r = 0.0;
    return out;
}

double average_cost(const CostQuadratic& P, const FilterStage& filter, const StageMatrices& s) {
    return (P.P * augment(s, filter).noise_covariance()).trace();
}

Mat closed_loop_matrix(const StageMatrices& s, const GainStage& K, const FilterStage& filter) {
    const AugmentedStepMatrices aug = augment(s, filter);
    return aug.A + aug.B1 * K.closed_loop_embedding1() + aug.B2 * K.closed_loop_embedding2();
}

Mat solve_discrete_lyapunov(const Mat& A, const Mat& Q) {
    const Index k = A.rows();
    if (A.cols() != k || Q.rows() != k || Q.cols() != k) {
        throw Error(ErrorKind::DimensionMismatch, "Lyapunov equation: shapes do not match");
    }
    if (k <= 60) {
        const Mat lhs = Mat::Identity(k * k, k * k) - Eigen::kroneckerProduct(A, A).eval();
        return symmetrized(unvec(lhs.partialPivLu().solve(vec(Q)), k, k));
    }
    Mat X = Q;
    for (int it = 0; it < 1000000; ++it) {
        const Mat next = A * X * A.transpose() + Q;
        const double change = (next - X).norm();
        X = next;
        if (change <= 1e-12 * std::max(1.0, X.norm())) break;
    }
    return symmetrized(X);
}

Mat stationary_state_covariance(const StageMatrices& s, const GainStage& K, const FilterStage& filter) {
    const Mat Acl = closed_loop_matrix(s, K, filter);
    const double rho = spectral_radius(Acl);
    if (!(rho < 1.0)) {
        throw Error(ErrorKind::UnstableClosedLoop,
                    fmt::format("closed-loop spectral radius {:.6f} is not below 1", rho));
    }
    return solve_discrete_lyapunov(Acl, augment(s, filter).noise_covariance());
}

double lyapunov_cost(const StageMatrices& s, const GainStage& K, const FilterStage& filter) {
    const Mat SX = stationary_state_covariance(s, K, filter);
    const Mat KK1 = K.closed_loop_embedding1(), KK2 = K.closed_loop_embedding2();
    const Mat Lambda =
        augmented_terminal_cost(s.Q) + KK1.transpose() * s.R * KK1 + KK2.transpose() * s.S * KK2;
    return (Lambda * SX).trace();
}

StationarySolution value_iterate(const ValidatedStationary& model, const StationaryOptions& opts,
                                 const std::optional<StationaryInit>& init_opt) {
    if (!(opts.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
    if (opts.max_iter == 0) throw Error(ErrorKind::InvalidArgument, "max_iter must be positive");
    const StageMatrices& s = model->m;
    const Dimensions d = model->dims();
    const StationaryInit init = init_opt ? *init_opt : StationaryInit::standard(model.get());
    if (init.sigma.rows() != 2 * d.n || init.P.rows() != 3 * d.n || init.gamma.gamma.rows() != 2 * d.n ||
        init.gains.K1.rows() != d.m1 || init.gains.K2.rows() != d.m2) {
        throw Error(ErrorKind::DimensionMismatch, "initial iterate does not match the model");
    }

    JointCovariance sigma{init.sigma, CovariancePhase::APriori, 0};
    CostQuadratic P{init.P, 0.0, 0};
    GainStage K = init.gains;
    WeightMatrix gamma = init.gamma;

    StationarySolution best;
    double best_residual = std::numeric_limits<double>::infinity();
    std::vector<double> history;
    std::size_t fallbacks = 0;
    bool converged = false;

    for (std::size_t k = 0; k < opts.max_iter; ++k) {
        ForwardStep fw;
        BackwardStep bw;
        try {
            fw = forward_operator(model, sigma, K, gamma, opts.innovation);
            const FilterStage F = make_filter_stage(s, K, fw.L.L1, fw.L.L2);
            bw = backward_operator(model, P, F);
        } catch (const Error& e) {
            throw Error(e.kind(), fmt::format("iteration {}: {}", k, e.detail()));
        }
        const double residual = (fw.sigma.sigma - sigma.sigma).norm() + (bw.P.P - P.P).norm();
        history.push_back(residual);
        sigma = std::move(fw.sigma);
        P = std::move(bw.P);
        K = bw.gains.gains;

        if (residual < best_residual) {
            best_residual = residual;
            best.sigma = sigma;
            best.P = P;
            best.gains = K;
            best.gamma = gamma;
            best.diagnostics.iterations = k + 1;
            best.diagnostics.residual = residual;
        }
        if (residual <= opts.tol) {
            converged = true;
            break;
        }
        if (opts.gamma == GammaPolicy::RefreshFromCost) {
            WeightMatrix g{P.P.bottomRightCorner(2 * d.n, 2 * d.n), 0};
            if (g.minimizer_block_positive() && g.maximizer_block_negative()) {
                gamma = std::move(g);
            } else {
                gamma = init.gamma;
                ++fallbacks;
            }
        }
    }

    // Filter consistent with the returned covariance and gains.
    const FilterGains L = solve_filter_gains(best.sigma, best.gamma, s.C1, s.C2, s.V1, s.V2, opts.innovation);
    best.filter = make_filter_stage(s, best.gains, L.L1, L.L2);
    best.J = average_cost(best.P, best.filter, s);

    StationaryDiagnostics& dg = best.diagnostics;
    dg.converged = converged;
    dg.history = std::move(history);
    dg.gamma_fallbacks = fallbacks;
    dg.sigma0 = init.sigma;
    const WeightMatrix extracted{best.P.P.bottomRightCorner(2 * d.n, 2 * d.n), 0};
    dg.gamma_flags = {extracted.minimizer_block_positive(), extracted.maximizer_block_negative()};
    dg.filter_gain_residual =
        filter_gain_residual(L, best.sigma, best.gamma, s.C1, s.C2, s.V1, s.V2).max();
    {
        const QBlocks q = q_matrix(best.P, augment(s, best.filter), s.R, s.S);
        const EquilibriumGains eg = solve_equilibrium_gains(q, d.n);
        dg.stationarity_residual = stationarity_residual(q, eg.Kbar1, eg.Kbar2).max();
    }
    dg.spectral_radius = spectral_radius(closed_loop_matrix(s, best.gains, best.filter));
    dg.stable = dg.spectral_radius < 1.0;
    if (dg.stable) {
        best.state_covariance = stationary_state_covariance(s, best.gains, best.filter);
        best.J_lyapunov = lyapunov_cost(s, best.gains, best.filter);
    } else {
        best.J_lyapunov = std::numeric_limits<double>::quiet_NaN();
    }
    return best;
}

}  // namespace asymgame
