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
// Reference computations used only by the tests. Each one derives its result
// along a different route from the library code it checks.
#pragma once

#include "asymgame/linalg.hpp"
#include "asymgame/stage_types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

namespace oracle {

using asymgame::Index;
using asymgame::Mat;
using asymgame::Vec;

/// Structure-preserving doubling for X = A'XA - A'XB (R + B'XB)^{-1} B'XA + Q.
inline Mat dare(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, int max_iter = 200) {
    const Index n = A.rows();
    const Mat I = Mat::Identity(n, n);
    Mat Ak = A;
    Mat G = B * R.inverse() * B.transpose();
    Mat H = Q;
    for (int k = 0; k < max_iter; ++k) {
        const Mat Winv = (I + G * H).inverse();
        const Mat A1 = Ak * Winv * Ak;
        const Mat G1 = G + Ak * Winv * G * Ak.transpose();
        const Mat H1 = H + Ak.transpose() * H * Winv * Ak;
        const double change = (H1 - H).norm();
        Ak = A1;
        G = 0.5 * (G1 + G1.transpose());
        H = 0.5 * (H1 + H1.transpose());
        if (change <= 1e-15 * H.norm()) break;
    }
    return H;
}

/// u = K x for the DARE above.
inline Mat dare_gain(const Mat& A, const Mat& B, const Mat& X, const Mat& R) {
    return -(R + B.transpose() * X * B).inverse() * B.transpose() * X * A;
}

/// Stationary a priori covariance of the one-step predictor (filtering DARE).
inline Mat filter_dare(const Mat& A, const Mat& C, const Mat& W, const Mat& V) {
    return dare(A.transpose(), C.transpose(), W, V);
}

inline Mat kalman_gain(const Mat& S, const Mat& C, const Mat& V) {
    return S * C.transpose() * (C * S * C.transpose() + V).inverse();
}

/// Single-player LQG average cost with the controller on the a priori estimate:
/// tr(P W) + tr(K'(R + B'PB)K Sigma^-).
inline double lqg_average_cost(const Mat& A, const Mat& B, const Mat& C, const Mat& W, const Mat& V, const Mat& Q,
                               const Mat& R) {
    const Mat P = dare(A, B, Q, R);
    const Mat K = dare_gain(A, B, P, R);
    const Mat S = filter_dare(A, C, W, V);
    return (P * W).trace() + (K.transpose() * (R + B.transpose() * P * B) * K * S).trace();
}

/// Kalman recursion in the short form: Sigma^+ = (I - LC) Sigma^-, no update at t = 0.
/// Returns the a priori covariances Sigma_1^- .. Sigma_T^-.
inline std::vector<Mat> kalman_priors(const Mat& A, const Mat& C, const Mat& W, const Mat& V, const Mat& X0, int T) {
    std::vector<Mat> out;
    Mat plus = X0;
    const Index n = A.rows();
    for (int t = 0; t < T; ++t) {
        if (t > 0) {
            const Mat& minus = out.back();
            const Mat L = kalman_gain(minus, C, V);
            plus = (Mat::Identity(n, n) - L * C) * minus;
        }
        out.push_back(A * plus * A.transpose() + W);
    }
    return out;
}

/// Coupled filter gain equations solved by fixed-point iteration from zero:
///   L1 = (S11 C1' + M1 a1 - M1 L2 C2 a1) N1^{-1},  L2 = (S22 C2' + M2 a2 - M2 L1 C1 a2) N2^{-1}.
inline std::pair<Mat, Mat> filter_gains_fixed_point(const Mat& Sigma, const Mat& Gamma, const Mat& C1, const Mat& C2,
                                                    const Mat& V1, const Mat& V2, int max_iter = 100000) {
    const Index n = Sigma.rows() / 2;
    const Mat S11 = Sigma.topLeftCorner(n, n), S12 = Sigma.topRightCorner(n, n), S22 = Sigma.bottomRightCorner(n, n);
    const Mat G11 = Gamma.topLeftCorner(n, n), G12 = Gamma.topRightCorner(n, n), G22 = Gamma.bottomRightCorner(n, n);
    const Mat N1inv = (C1 * S11 * C1.transpose() + V1).inverse();
    const Mat N2inv = (C2 * S22 * C2.transpose() + V2).inverse();
    const Mat M1 = G11.inverse() * G12, M2 = G22.inverse() * G12.transpose();
    const Mat a1 = S12.transpose() * C1.transpose(), a2 = S12 * C2.transpose();
    Mat L1 = Mat::Zero(n, C1.rows()), L2 = Mat::Zero(n, C2.rows());
    for (int k = 0; k < max_iter; ++k) {
        const Mat L1n = (S11 * C1.transpose() + M1 * a1 - M1 * L2 * C2 * a1) * N1inv;
        const Mat L2n = (S22 * C2.transpose() + M2 * a2 - M2 * L1 * C1 * a2) * N2inv;
        const double change = (L1n - L1).norm() + (L2n - L2).norm();
        L1 = L1n;
        L2 = L2n;
        if (change < 1e-15) break;
    }
    return {L1, L2};
}

/// Perfect-information zero-sum Riccati recursion on x with u = [u1; u2]:
/// P = Q + A'PA - A'PB (blockdiag(R, S) + B'PB)^{-1} B'PA. Returns gains per stage.
inline std::vector<std::pair<Mat, Mat>> zero_sum_riccati(const Mat& A, const Mat& B1, const Mat& B2, const Mat& Q,
                                                         const Mat& R, const Mat& S, const Mat& QT, int T,
                                                         Mat* P0 = nullptr) {
    const Index m1 = B1.cols(), m2 = B2.cols();
    Mat B(A.rows(), m1 + m2);
    B << B1, B2;
    Mat U = Mat::Zero(m1 + m2, m1 + m2);
    U.topLeftCorner(m1, m1) = R;
    U.bottomRightCorner(m2, m2) = S;
    std::vector<std::pair<Mat, Mat>> gains(T);
    Mat P = QT;
    for (int t = T - 1; t >= 0; --t) {
        const Mat K = -(U + B.transpose() * P * B).inverse() * B.transpose() * P * A;
        gains[t] = {K.topRows(m1), K.bottomRows(m2)};
        const Mat Acl = A + B * K;
        P = Q + K.transpose() * U * K + Acl.transpose() * P * Acl;
        P = 0.5 * (P + P.transpose());
    }
    if (P0) *P0 = P;
    return gains;
}

/// Single-player finite Riccati recursion (B2 absent); gains per stage.
inline std::vector<Mat> riccati_gains(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const Mat& QT, int T) {
    std::vector<Mat> gains(T);
    Mat P = QT;
    for (int t = T - 1; t >= 0; --t) {
        const Mat K = -(R + B.transpose() * P * B).inverse() * B.transpose() * P * A;
        gains[t] = K;
        const Mat Acl = A + B * K;
        P = Q + K.transpose() * R * K + Acl.transpose() * P * Acl;
    }
    return gains;
}

/// Deterministic pseudo-random matrix with entries in [-1, 1].
inline Mat random_matrix(Index r, Index c, unsigned seed) {
    Mat m(r, c);
    unsigned s = seed * 2654435761u + 12345u;
    for (Index i = 0; i < r; ++i) {
        for (Index k = 0; k < c; ++k) {
            s = s * 1664525u + 1013904223u;
            m(i, k) = static_cast<double>(s >> 8) / static_cast<double>(1u << 24) * 2.0 - 1.0;
        }
    }
    return m;
}

inline Mat random_spd(Index n, unsigned seed, double shift = 0.5) {
    const Mat a = random_matrix(n, n, seed);
    return a * a.transpose() + shift * Mat::Identity(n, n);
}

inline double rel(const Mat& a, const Mat& b) {
    const double s = std::max(a.norm(), b.norm());
    return s > 0.0 ? (a - b).norm() / s : 0.0;
}

}  // namespace oracle
