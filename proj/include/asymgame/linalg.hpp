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

#include <Eigen/Dense>

#include <initializer_list>

namespace asymgame {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

inline Mat symmetrized(const Mat& m) { return 0.5 * (m + m.transpose()); }

/// ||M - M^T||_F / ||M||_F, zero for the zero matrix.
inline double relative_asymmetry(const Mat& m) {
    const double scale = m.norm();
    if (scale == 0.0) return 0.0;
    return (m - m.transpose()).norm() / scale;
}

/// Eigenvalues of the symmetric part, ascending.
inline Vec symmetric_eigenvalues(const Mat& m) {
    if (m.size() == 0) return Vec();
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

inline Mat block_diag(std::initializer_list<const Mat*> blocks) {
    Index rows = 0, cols = 0;
    for (const Mat* b : blocks) {
        rows += b->rows();
        cols += b->cols();
    }
    Mat out = Mat::Zero(rows, cols);
    Index r = 0, c = 0;
    for (const Mat* b : blocks) {
        out.block(r, c, b->rows(), b->cols()) = *b;
        r += b->rows();
        c += b->cols();
    }
    return out;
}

inline Mat block_diag(const Mat& a, const Mat& b) { return block_diag({&a, &b}); }
inline Mat block_diag(const Mat& a, const Mat& b, const Mat& c) { return block_diag({&a, &b, &c}); }

/// Largest absolute eigenvalue of a general square matrix.
inline double spectral_radius(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::EigenSolver<Mat> es(a, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Column-major vectorization, vec(A X B) = (B^T kron A) vec(X).
inline Vec vec(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

inline Mat unvec(const Vec& v, Index rows, Index cols) { return Eigen::Map<const Mat>(v.data(), rows, cols); }

}  // namespace asymgame
