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
// Models shared by the tests, built directly from matrices rather than through
// the config loader.
#pragma once

#include "asymgame/model.hpp"

namespace fixture {

using asymgame::Mat;
using asymgame::StageMatrices;
using asymgame::Vec;

struct PursuitOptions {
    double b1_y = 0.1;    // B1(4,2)
    Mat V1 = Mat::Identity(2, 2);
    Mat V2 = Mat::Identity(2, 2);
    double s = -8.0;      // S = s I
};

/// Planar double integrator on the relative state, dt = 0.1.
inline StageMatrices pursuit(const PursuitOptions& o = {}) {
    const double dt = 0.1;
    StageMatrices m;
    m.A = Mat::Identity(4, 4);
    m.A(0, 2) = dt;
    m.A(1, 3) = dt;
    Mat B = Mat::Zero(4, 2);
    B(2, 0) = dt;
    B(3, 1) = dt;
    m.B1 = B;
    m.B1(3, 1) = o.b1_y;
    m.B2 = -B;
    m.W = Mat::Zero(4, 4);
    m.W(2, 2) = m.W(3, 3) = dt * dt * 2e-2;
    m.C1 = Mat::Zero(2, 4);
    m.C1(0, 0) = m.C1(1, 1) = 1.0;
    m.C2 = m.C1;
    m.V1 = o.V1;
    m.V2 = o.V2;
    m.Q = 1e-3 * Mat::Identity(4, 4);
    m.R = Mat::Identity(2, 2);
    m.S = o.s * Mat::Identity(2, 2);
    return m;
}

inline asymgame::GameModel pursuit_game(std::size_t T, const PursuitOptions& o = {}) {
    asymgame::GameModel g;
    g.stages.assign(T, pursuit(o));
    g.Q_T = 1e-3 * Mat::Identity(4, 4);
    g.x0_mean = Vec::Zero(4);
    g.x0_cov = Mat::Zero(4, 4);
    return g;
}

/// All matrices 1 x 1.
inline StageMatrices scalar(double a = 1.0, double b1 = 1.0, double b2 = 1.0, double c = 1.0, double w = 1.0,
                            double v = 1.0, double q = 1.0, double r = 1.0, double s = -4.0) {
    const auto k = [](double x) { return Mat::Constant(1, 1, x); };
    return {k(a), k(b1), k(b2), k(w), k(c), k(c), k(v), k(v), k(q), k(r), k(s)};
}

}  // namespace fixture
