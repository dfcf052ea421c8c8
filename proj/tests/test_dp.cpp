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
#include "asymgame/filtering.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace asymgame;

namespace {

QBlocks random_saddle(Index a, Index m1, Index m2, unsigned seed) {
    QBlocks q;
    q.Q00 = oracle::random_spd(a, seed);
    q.Q01 = oracle::random_matrix(a, m1, seed + 1);
    q.Q02 = oracle::random_matrix(a, m2, seed + 2);
    q.Q11 = oracle::random_spd(m1, seed + 3, 2.0);
    q.Q22 = -oracle::random_spd(m2, seed + 4, 2.0);
    q.Q12 = 0.3 * oracle::random_matrix(m1, m2, seed + 5);
    return q;
}

FilterParams kalman_filters(const StageMatrices& s, std::size_t T) {
    // Filters from the decoupled forward pass.
    GameModel g;
    g.stages.assign(T, s);
    g.Q_T = s.Q;
    g.x0_mean = Vec::Zero(s.A.rows());
    g.x0_cov = Mat::Identity(s.A.rows(), s.A.rows());
    const auto model = validate_model(g);
    return forward_pass(model, GainSequence(T, GainStage::zero(g.dims())),
                        WeightSequence(T + 1, WeightMatrix::standard(s.A.rows())))
        .filters;
}

}  // namespace

TEST_CASE("saddle gains solve the first-order system") {
    const QBlocks q = random_saddle(6, 2, 3, 1);
    const auto eg = solve_equilibrium_gains(q, 2);
    const Mat H = [&] {
        Mat h(5, 5);
        h << q.Q11, q.Q12, q.Q12.transpose(), q.Q22;
        return h;
    }();
    Mat rhs(5, 6);
    rhs << -q.Q01.transpose(), -q.Q02.transpose();
    const Mat direct = H.inverse() * rhs;
    CHECK(oracle::rel(eg.Kbar1, direct.topRows(2)) < 1e-12);
    CHECK(oracle::rel(eg.Kbar2, direct.bottomRows(3)) < 1e-12);
    CHECK(stationarity_residual(q, eg.Kbar1, eg.Kbar2).max() < 1e-13);
    CHECK(eg.gains.K1 == eg.Kbar1.leftCols(2));
}

TEST_CASE("saddle inequality around the gains") {
    const QBlocks q = random_saddle(4, 2, 2, 7);
    const auto eg = solve_equilibrium_gains(q, 4);
    const Mat Q = q.assembled();
    const Vec X = oracle::random_matrix(4, 1, 99);
    const auto value = [&](const Vec& u1, const Vec& u2) {
        Vec v(8);
        v << X, u1, u2;
        return v.dot(Q * v);
    };
    const Vec u1 = eg.Kbar1 * X, u2 = eg.Kbar2 * X;
    const double mid = value(u1, u2);
    for (unsigned k = 0; k < 5; ++k) {
        const Vec d = oracle::random_matrix(2, 1, 200 + k);
        CHECK(value(u1 + d, u2) >= mid);
        CHECK(value(u1, u2 + d) <= mid);
    }
}

TEST_CASE("convexity and concavity failures") {
    QBlocks q = random_saddle(3, 1, 1, 3);
    q.Q11 = -q.Q11;
    try {
        solve_equilibrium_gains(q, 1);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConvexityViolation);
    }
    q = random_saddle(3, 1, 1, 3);
    q.Q22 = -q.Q22;
    try {
        solve_equilibrium_gains(q, 1);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConcavityViolation);
    }
}

TEST_CASE("cost update equals the quadratic form under the closed loop") {
    const auto s = fixture::pursuit();
    const auto filters = kalman_filters(s, 3);
    const AugmentedStepMatrices aug = augment(s, filters[2]);
    CostQuadratic next{oracle::random_spd(12, 4), 0.7, 3};
    const QBlocks q = q_matrix(next, aug, s.R, s.S);
    const GainStage k{oracle::random_matrix(2, 4, 5), oracle::random_matrix(2, 4, 6)};
    const auto c = cost_update(q, k, next, aug);

    Mat Tm(16, 12);
    Tm << Mat::Identity(12, 12), k.closed_loop_embedding1(), k.closed_loop_embedding2();
    CHECK(oracle::rel(c.P, Tm.transpose() * q.assembled() * Tm) < 1e-12);
    CHECK(c.r == doctest::Approx(0.7 + (next.P * aug.G * aug.W * aug.G.transpose()).trace()).epsilon(1e-13));
    CHECK(c.stage == 2);
}

TEST_CASE("last stage reduces to the perfect-information game") {
    const auto s = fixture::pursuit({.s = -3.0});
    GameModel g = fixture::pursuit_game(1, {.s = -3.0});
    g.Q_T = oracle::random_spd(4, 8);
    const auto model = validate_model(g);
    const auto bwd = backward_pass(model, kalman_filters(s, 1));
    Mat P0;
    const auto ref = oracle::zero_sum_riccati(s.A, s.B1, s.B2, s.Q, s.R, s.S, g.Q_T, 1, &P0);
    CHECK(oracle::rel(bwd.gains[0].K1, ref[0].first) < 1e-12);
    CHECK(oracle::rel(bwd.gains[0].K2, ref[0].second) < 1e-12);
    CHECK(oracle::rel(bwd.costs[0].P.topLeftCorner(4, 4), P0) < 1e-12);
}

TEST_CASE("backward pass residuals and stage tagging") {
    const std::size_t T = 20;
    const auto s = fixture::pursuit();
    const auto model = validate_model(fixture::pursuit_game(T));
    const auto bwd = backward_pass(model, kalman_filters(s, T));
    REQUIRE(bwd.costs.size() == T + 1);
    for (const auto& r : bwd.residuals) CHECK(r.max() < 1e-9);
    for (std::size_t t = 0; t <= T; ++t) CHECK(bwd.costs[t].stage == t);

    // A maximizer weight too weak to keep the game concave fails at the last stage.
    const auto weak = validate_model(fixture::pursuit_game(T, {.s = -1e-4}));
    GameModel g = weak.get();
    g.Q_T = 100.0 * Mat::Identity(4, 4);
    try {
        backward_pass(validate_model(g), kalman_filters(g.stages[0], T));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConcavityViolation);
        CHECK(e.stage() == std::optional<std::size_t>(T - 1));
    }
}
