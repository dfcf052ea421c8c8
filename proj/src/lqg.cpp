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
#include "asymgame/lqg.hpp"

#include "asymgame/error.hpp"

#include <algorithm>

namespace asymgame {

LqgSolution classical_lqg(const StageMatrices& s, double tol, std::size_t max_iter) {
    const Mat &A = s.A, &B = s.B1, &C = s.C1;
    LqgSolution out;
    Mat P = s.Q;
    Mat S = s.W;
    bool p_done = false, s_done = false;
    std::size_t it = 0;
    for (; it < max_iter && !(p_done && s_done); ++it) {
        if (!p_done) {
            const Mat BtP = B.transpose() * P;
            const Mat gain = (s.R + BtP * B).ldlt().solve(Mat(BtP * A));
            const Mat next = symmetrized(s.Q + A.transpose() * P * A - A.transpose() * P * B * gain);
            p_done = (next - P).norm() <= tol * std::max(1.0, next.norm());
            P = next;
        }
        if (!s_done) {
            const Mat CS = C * S;
            const Mat N = C * S * C.transpose() + s.V1;
            const Mat next = symmetrized(A * S * A.transpose() + s.W -
                                         A * CS.transpose() * N.ldlt().solve(Mat(CS * A.transpose())));
            s_done = (next - S).norm() <= tol * std::max(1.0, next.norm());
            S = next;
        }
    }
    out.iterations = it;
    out.converged = p_done && s_done;
    out.P = P;
    out.sigma = S;
    const Mat BtP = B.transpose() * P;
    const Mat H = s.R + BtP * B;
    out.K = -H.ldlt().solve(Mat(BtP * A));
    const Mat N = C * S * C.transpose() + s.V1;
    out.L = N.ldlt().solve(Mat(C * S)).transpose();
    out.J = (P * s.W).trace() + (out.K.transpose() * H * out.K * S).trace();
    return out;
}

}  // namespace asymgame
