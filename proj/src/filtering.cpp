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
#include "asymgame/filtering.hpp"

#include "asymgame/error.hpp"

#include <fmt/format.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>

namespace asymgame {

namespace {

bool definite(const Mat& m, double sign) {
    if (m.size() == 0) return true;
    const Vec ev = symmetric_eigenvalues(sign * m);
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    return ev.minCoeff() > 1e-10 * scale;
}

// Innovation covariance C S C^T + V (+ jitter I), with a condition check.
Mat innovation(const Mat& S, const Mat& C, const Mat& V, const InnovationOptions& opts, int player) {
    Mat N = symmetrized(C * S * C.transpose() + V);
    if (opts.jitter > 0.0) N += opts.jitter * Mat::Identity(N.rows(), N.cols());
    if (N.size() == 0) return N;
    const Vec ev = symmetric_eigenvalues(N);
    const double lo = ev.minCoeff(), hi = ev.cwiseAbs().maxCoeff();
    const double cond = lo > 0.0 ? hi / lo : INFINITY;
    if (!(cond < opts.cond_cap)) {
        throw Error(ErrorKind::SingularInnovation,
                    fmt::format("player {} innovation covariance has condition estimate {:.3e} (cap {:.0e})", player,
                                cond, opts.cond_cap));
    }
    return N;
}

void check_weight_block(const Mat& G, int player) {
    const Vec ev = symmetric_eigenvalues(G);
    const double hi = ev.cwiseAbs().maxCoeff();
    if (hi == 0.0 || ev.cwiseAbs().minCoeff() <= 1e-12 * hi) {
        throw Error(ErrorKind::SingularWeightBlock,
                    fmt::format("weight block Gamma{}{} is singular", player, player));
    }
}

struct GainTerms {
    Mat S11, S22, M1, M2, a1, a2, N1, N2;
};

GainTerms terms(const JointCovariance& sm, const WeightMatrix& g, const Mat& C1, const Mat& C2, const Mat& V1,
                const Mat& V2, const InnovationOptions& opts) {
    GainTerms t;
    t.S11 = sm.s11();
    t.S22 = sm.s22();
    const Mat S12 = sm.s12();
    t.N1 = innovation(t.S11, C1, V1, opts, 1);
    t.N2 = innovation(t.S22, C2, V2, opts, 2);
    const Mat G12 = g.g12();
    if (G12.isZero(0.0)) {
        t.M1 = Mat::Zero(G12.rows(), G12.cols());
        t.M2 = t.M1;
    } else {
        const Mat G11 = g.g11(), G22 = g.g22();
        check_weight_block(G11, 1);
        check_weight_block(G22, 2);
        t.M1 = G11.partialPivLu().solve(G12);
        t.M2 = G22.partialPivLu().solve(Mat(G12.transpose()));
    }
    t.a1 = S12.transpose() * C1.transpose();
    t.a2 = S12 * C2.transpose();
    return t;
}

void check_dims(const JointCovariance& sm, const WeightMatrix& g, const Mat& C1, const Mat& C2, const Mat& V1,
                const Mat& V2) {
    const Index n = sm.n();
    if (sm.sigma.rows() != 2 * n || sm.sigma.cols() != 2 * n || g.gamma.rows() != 2 * n ||
        g.gamma.cols() != 2 * n || C1.cols() != n || C2.cols() != n || V1.rows() != C1.rows() ||
        V2.rows() != C2.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "filter gain inputs have inconsistent shapes");
    }
}

}  // namespace

bool WeightMatrix::minimizer_block_positive() const { return definite(g11(), 1.0); }
bool WeightMatrix::maximizer_block_negative() const { return definite(g22(), -1.0); }

WeightMatrix WeightMatrix::standard(Index n, std::size_t stage) {
    Mat g = Mat::Zero(2 * n, 2 * n);
    g.topLeftCorner(n, n).setIdentity();
    g.bottomRightCorner(n, n) = -Mat::Identity(n, n);
    return {g, stage};
}

FilterGains solve_filter_gains(const JointCovariance& sigma_minus, const WeightMatrix& gamma, const Mat& C1,
                               const Mat& C2, const Mat& V1, const Mat& V2, const InnovationOptions& opts) {
    check_dims(sigma_minus, gamma, C1, C2, V1, V2);
    const Index n = sigma_minus.n(), p1 = C1.rows(), p2 = C2.rows();
    const GainTerms t = terms(sigma_minus, gamma, C1, C2, V1, V2, opts);

    const Index k1 = n * p1, k2 = n * p2;
    const Mat In = Mat::Identity(n, n);
    Mat lhs(k1 + k2, k1 + k2);
    Vec rhs(k1 + k2);
    // Each block row is scaled by its innovation norm so the two players'
    // equations stay comparable when V1 and V2 differ by many decades.
    const double s1 = 1.0 / std::max(t.N1.norm(), 1e-300);
    const double s2 = 1.0 / std::max(t.N2.norm(), 1e-300);
    lhs.topLeftCorner(k1, k1) = s1 * Eigen::kroneckerProduct(Mat(t.N1.transpose()), In);
    lhs.topRightCorner(k1, k2) = s1 * Eigen::kroneckerProduct(Mat((C2 * t.a1).transpose()), t.M1);
    lhs.bottomLeftCorner(k2, k1) = s2 * Eigen::kroneckerProduct(Mat((C1 * t.a2).transpose()), t.M2);
    lhs.bottomRightCorner(k2, k2) = s2 * Eigen::kroneckerProduct(Mat(t.N2.transpose()), In);
    rhs.head(k1) = s1 * vec(t.S11 * C1.transpose() + t.M1 * t.a1);
    rhs.tail(k2) = s2 * vec(t.S22 * C2.transpose() + t.M2 * t.a2);

    const Eigen::PartialPivLU<Mat> lu(lhs);
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) {
        throw Error(ErrorKind::CoupledSystemSingular,
                    fmt::format("coupled gain system reciprocal condition {:.3e}", rc));
    }
    const Vec x = lu.solve(rhs);
    return {unvec(x.head(k1), n, p1), unvec(x.tail(k2), n, p2)};
}

GainResidual filter_gain_residual(const FilterGains& g, const JointCovariance& sigma_minus, const WeightMatrix& gamma,
                                  const Mat& C1, const Mat& C2, const Mat& V1, const Mat& V2) {
    check_dims(sigma_minus, gamma, C1, C2, V1, V2);
    InnovationOptions loose;
    loose.cond_cap = INFINITY;
    const GainTerms t = terms(sigma_minus, gamma, C1, C2, V1, V2, loose);
    const auto rel = [](const Mat& a, const Mat& b, const Mat& rhs) {
        const double scale = a.norm() + b.norm() + rhs.norm();
        const double r = (a + b - rhs).norm();
        return scale > 0.0 ? r / scale : r;
    };
    GainResidual out;
    out.first = rel(g.L1 * t.N1, t.M1 * g.L2 * C2 * t.a1, t.S11 * C1.transpose() + t.M1 * t.a1);
    out.second = rel(g.L2 * t.N2, t.M2 * g.L1 * C1 * t.a2, t.S22 * C2.transpose() + t.M2 * t.a2);
    return out;
}

Mat apriori_transition(const StageMatrices& s, const GainStage& k, bool initial_stage) {
    const Index n = s.A.rows();
    Mat Ab = Mat::Zero(2 * n, 2 * n);
    if (initial_stage) {
        Ab.topLeftCorner(n, n) = s.A;
        Ab.bottomRightCorner(n, n) = s.A;
        return Ab;
    }
    const Mat B2K2 = s.B2 * k.K2, B1K1 = s.B1 * k.K1;
    Ab.topLeftCorner(n, n) = s.A + B2K2;
    Ab.topRightCorner(n, n) = -B2K2;
    Ab.bottomLeftCorner(n, n) = -B1K1;
    Ab.bottomRightCorner(n, n) = s.A + B1K1;
    return Ab;
}

JointCovariance apriori_cov(const JointCovariance& sigma_plus, const GainStage& k, const StageMatrices& s) {
    const Index n = s.A.rows();
    if (sigma_plus.sigma.rows() != 2 * n || k.K1.cols() != n || k.K2.cols() != n) {
        throw Error(ErrorKind::DimensionMismatch, "a priori update: shapes do not match the stage", sigma_plus.stage);
    }
    const Mat Ab = apriori_transition(s, k, sigma_plus.stage == 0);
    JointCovariance out;
    out.sigma = symmetrized(Ab * sigma_plus.sigma * Ab.transpose() + block_diag(s.W, s.W));
    out.phase = CovariancePhase::APriori;
    out.stage = sigma_plus.stage + 1;
    check_covariance(out.sigma, out.stage);
    return out;
}

JointCovariance aposteriori_cov(const JointCovariance& sigma_minus, const Mat& L1, const Mat& L2, const Mat& C1,
                                const Mat& C2, const Mat& V1, const Mat& V2) {
    const Index n = sigma_minus.n();
    if (L1.rows() != n || L2.rows() != n || L1.cols() != C1.rows() || L2.cols() != C2.rows() || C1.cols() != n ||
        C2.cols() != n) {
        throw Error(ErrorKind::DimensionMismatch, "a posteriori update: shapes do not match", sigma_minus.stage);
    }
    const Mat In = Mat::Identity(n, n);
    const Mat J = block_diag(Mat(In - L1 * C1), Mat(In - L2 * C2));
    const Mat Lb = block_diag(L1, L2);
    JointCovariance out;
    out.sigma = symmetrized(J * sigma_minus.sigma * J.transpose() + Lb * block_diag(V1, V2) * Lb.transpose());
    out.phase = CovariancePhase::APosteriori;
    out.stage = sigma_minus.stage;
    check_covariance(out.sigma, out.stage);
    return out;
}

void check_covariance(const Mat& sigma, std::size_t stage) {
    if (sigma.size() == 0) return;
    if (!sigma.allFinite()) throw Error(ErrorKind::CovarianceIndefinite, "covariance has non-finite entries", stage);
    const double scale = std::max(std::abs(sigma.trace()), sigma.norm());
    if (scale == 0.0) return;
    const double lo = symmetric_eigenvalues(sigma).minCoeff();
    if (lo < -1e-10 * scale) {
        throw Error(ErrorKind::CovarianceIndefinite,
                    fmt::format("joint error covariance has eigenvalue {:.6g} (scale {:.6g})", lo, scale), stage);
    }
}

ForwardResult forward_pass(const ValidatedGame& model, const GainSequence& gains, const WeightSequence& gammas,
                           const InnovationOptions& opts) {
    const GameModel& m = model.get();
    const std::size_t T = m.horizon();
    const Dimensions d = m.dims();
    if (gains.size() != T) {
        throw Error(ErrorKind::DimensionMismatch, fmt::format("{} gain stages for horizon {}", gains.size(), T));
    }
    if (T > 0 && gammas.size() < T) {
        throw Error(ErrorKind::DimensionMismatch, fmt::format("{} weight stages for horizon {}", gammas.size(), T));
    }

    ForwardResult out;
    out.initial.sigma = block_diag(m.x0_cov, m.x0_cov);
    out.initial.phase = CovariancePhase::APosteriori;
    out.initial.stage = 0;
    out.apriori.reserve(T);
    out.aposteriori.reserve(T > 0 ? T - 1 : 0);
    out.filters.reserve(T);
    out.innovation.reserve(T);

    JointCovariance plus = out.initial;
    for (std::size_t t = 0; t < T; ++t) {
        const StageMatrices& s = m.stages[t];
        FilterGains L{Mat::Zero(d.n, d.p1), Mat::Zero(d.n, d.p2)};
        try {
            if (t > 0) {
                const JointCovariance& minus = out.apriori.back();
                L = solve_filter_gains(minus, gammas[t], s.C1, s.C2, s.V1, s.V2, opts);
                plus = aposteriori_cov(minus, L.L1, L.L2, s.C1, s.C2, s.V1, s.V2);
                out.aposteriori.push_back(plus);
            }
            out.filters.push_back(make_filter_stage(s, gains[t], L.L1, L.L2));
            out.innovation.push_back(L);
            out.apriori.push_back(apriori_cov(plus, gains[t], s));
        } catch (const Error& e) {
            throw e.at_stage(t);
        }
    }
    return out;
}

Vec filter_step(const Vec& z, const Vec& u, const Vec& y, const StageMatrices& s, const FilterStage& f, Player p) {
    if (p == Player::Minimizer) return f.A1 * z + f.Bbar1 * u + f.Lbar1 * (y - s.C1 * z);
    return f.A2 * z + f.Bbar2 * u + f.Lbar2 * (y - s.C2 * z);
}

Vec filter_predict(const Vec& z, const Vec& u, const FilterStage& f, Player p) {
    if (p == Player::Minimizer) return f.A1 * z + f.Bbar1 * u;
    return f.A2 * z + f.Bbar2 * u;
}

}  // namespace asymgame
