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

#include <vector>

namespace asymgame {

enum class Player { Minimizer = 1, Maximizer = 2 };

/// One stage of the common-knowledge model.
struct StageMatrices {
    Mat A, B1, B2, W, C1, C2, V1, V2, Q, R, S;
};

struct Dimensions {
    Index n = 0, m1 = 0, m2 = 0, p1 = 0, p2 = 0;
    bool operator==(const Dimensions&) const = default;
};

inline Dimensions dimensions_of(const StageMatrices& s) {
    return {s.A.rows(), s.B1.cols(), s.B2.cols(), s.C1.rows(), s.C2.rows()};
}

/// Feedback gains of one stage, u^i = K^i z^i, plus the fixed embeddings
/// into the augmented state X = (x, e^1, e^2).
struct GainStage {
    Mat K1;  // m1 x n
    Mat K2;  // m2 x n

    static GainStage zero(const Dimensions& d) { return {Mat::Zero(d.m1, d.n), Mat::Zero(d.m2, d.n)}; }

    /// [K1 0 0]: gain on the estimate-conditioned augmented state.
    Mat estimate_embedding1() const {
        const Index n = K1.cols();
        Mat out = Mat::Zero(K1.rows(), 3 * n);
        out.leftCols(n) = K1;
        return out;
    }
    Mat estimate_embedding2() const {
        const Index n = K2.cols();
        Mat out = Mat::Zero(K2.rows(), 3 * n);
        out.leftCols(n) = K2;
        return out;
    }
    /// [K1 -K1 0], since z^1 = x - e^1.
    Mat closed_loop_embedding1() const {
        const Index n = K1.cols();
        Mat out = Mat::Zero(K1.rows(), 3 * n);
        out.leftCols(n) = K1;
        out.middleCols(n, n) = -K1;
        return out;
    }
    /// [K2 0 -K2].
    Mat closed_loop_embedding2() const {
        const Index n = K2.cols();
        Mat out = Mat::Zero(K2.rows(), 3 * n);
        out.leftCols(n) = K2;
        out.rightCols(n) = -K2;
        return out;
    }
};

using GainSequence = std::vector<GainStage>;

/// One-step filter z' = A^i z + Bbar^i u^i + Lbar^i (y^i - C^i z), with the
/// innovation gains L^i it was assembled from.
struct FilterStage {
    Mat A1, A2;
    Mat Bbar1, Bbar2;
    Mat Lbar1, Lbar2;
    Mat L1, L2;
};

using FilterParams = std::vector<FilterStage>;

/// A^1 = A + B2 K2, A^2 = A + B1 K1, Bbar^i = B^i, Lbar^i = A^i L^i.
inline FilterStage make_filter_stage(const StageMatrices& s, const GainStage& k, const Mat& L1, const Mat& L2) {
    FilterStage f;
    f.A1 = s.A + s.B2 * k.K2;
    f.A2 = s.A + s.B1 * k.K1;
    f.Bbar1 = s.B1;
    f.Bbar2 = s.B2;
    f.L1 = L1;
    f.L2 = L2;
    f.Lbar1 = f.A1 * L1;
    f.Lbar2 = f.A2 * L2;
    return f;
}

}  // namespace asymgame
