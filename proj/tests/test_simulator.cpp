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
#include "asymgame/error.hpp"
#include "asymgame/random.hpp"
#include "asymgame/simulator.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace asymgame;

namespace {

struct Baseline {
    ValidatedStationary model = validate_model(StationaryModel{fixture::pursuit()});
    StationarySolution sol = value_iterate(model);
    ClosedLoop loop = ClosedLoop::stationary(model, sol);
};

const Baseline& baseline() {
    static const Baseline b;
    return b;
}

double max_abs_diff(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    double worst = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) worst = std::max(worst, (a[t] - b[t]).cwiseAbs().maxCoeff());
    return worst;
}

}  // namespace

TEST_CASE("Philox4x32-10 known answers") {
    using W = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const std::uint32_t f = 0xffffffffu;
    CHECK(philox4x32({f, f, f, f}, {f, f}) == W{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
}

TEST_CASE("random streams are pure functions of seed, stream and position") {
    RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    const Vec va = a.normals(9), vb = b.normals(9);
    CHECK(va == vb);
    CHECK(va != c.normals(9));
    CHECK(va != d.normals(9));
    CHECK(a.position() == 9);
    const double u = a.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
}

TEST_CASE("standard normal moments") {
    RandomStream rng(1, 0);
    const int N = 200000;
    double s = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < N; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    CHECK(std::abs(s / N) < 0.01);
    CHECK(s2 / N == doctest::Approx(1.0).epsilon(0.01));
    CHECK(s4 / N == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("Gaussian sampling") {
    RandomStream rng(3, 1);
    CHECK(sample_gaussian(Vec::Ones(3), Mat::Zero(3, 3), rng) == Vec::Ones(3));
    CHECK(rng.position() == 3);  // zero covariance still consumes its draws

    const Mat cov = Eigen::Vector2d(4.0, 9.0).asDiagonal();
    const GaussianFactor f(cov);
    Mat acc = Mat::Zero(2, 2);
    const int N = 100000;
    for (int i = 0; i < N; ++i) {
        const Vec x = f.sample(Vec::Zero(2), rng);
        acc += x * x.transpose();
    }
    acc /= N;
    CHECK(acc(0, 0) == doctest::Approx(4.0).epsilon(0.05));
    CHECK(acc(1, 1) == doctest::Approx(9.0).epsilon(0.05));
    CHECK(std::abs(acc(0, 1)) < 0.05 * 6.0);

    Mat rank1 = Mat::Ones(2, 2);
    rank1(0, 0) -= 1e-14;  // tiny negative eigenvalue is clipped
    CHECK_NOTHROW(GaussianFactor{rank1});
    Mat bad = Mat::Identity(2, 2);
    bad(1, 1) = -0.1;
    try {
        GaussianFactor g(bad);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IndefiniteCovariance);
    }
}

TEST_CASE("noise-free rollout with exact start tracks the truth") {
    auto s = fixture::pursuit();
    s.W.setZero();
    s.V1.setZero();
    s.V2.setZero();
    s.B2.setZero();
    const GainStage K{-0.5 * oracle::random_matrix(2, 4, 1).cwiseAbs(), Mat::Zero(2, 4)};
    ClosedLoop loop;
    loop.stages = {s};
    loop.gains = {K};
    loop.filters = {make_filter_stage(s, K, 0.3 * oracle::random_matrix(4, 2, 2), Mat::Zero(4, 2))};
    const Vec x0 = oracle::random_matrix(4, 1, 3);
    const auto tr = rollout(loop, InitSpec::fixed(x0, x0, x0), 50, 1, 0);
    CHECK(max_abs_diff(tr.x, tr.z1) == 0.0);
}

TEST_CASE("trajectory obeys the dynamics and the filters") {
    const auto& b = baseline();
    const Vec x0 = (Vec(4) << -10, 0, 0, 0).finished();
    const Vec z1 = (Vec(4) << -10, 0, 0, -10).finished();
    const auto tr = rollout(b.loop, InitSpec::fixed(x0, z1, x0), 30, 5, 2);
    const auto& s = b.model->m;
    const auto& K = b.sol.gains;
    const auto& F = b.sol.filter;
    REQUIRE(tr.y1.size() == 30);
    for (std::size_t t = 0; t < 30; ++t) {
        CHECK(tr.u1[t] == K.K1 * tr.z1[t]);
        CHECK(tr.u2[t] == K.K2 * tr.z2[t]);
        const Vec z1n = t == 0 ? filter_predict(tr.z1[t], tr.u1[t], F, Player::Minimizer)
                               : filter_step(tr.z1[t], tr.u1[t], tr.y1[t], s, F, Player::Minimizer);
        const Vec z2n = t == 0 ? filter_predict(tr.z2[t], tr.u2[t], F, Player::Maximizer)
                               : filter_step(tr.z2[t], tr.u2[t], tr.y2[t], s, F, Player::Maximizer);
        CHECK(z1n == tr.z1[t + 1]);
        CHECK(z2n == tr.z2[t + 1]);
        const double cost = tr.x[t].dot(s.Q * tr.x[t]) + tr.u1[t].dot(s.R * tr.u1[t]) + tr.u2[t].dot(s.S * tr.u2[t]);
        CHECK(cost == tr.stage_cost[t]);
    }
    // Replaying with the same stream is bit-identical.
    const auto again = rollout(b.loop, InitSpec::fixed(x0, z1, x0), 30, 5, 2);
    CHECK(max_abs_diff(tr.x, again.x) == 0.0);
    CHECK(tr.total_cost == again.total_cost);
}

TEST_CASE("one rollout of Monte Carlo equals the trajectory") {
    const auto& b = baseline();
    const auto init = InitSpec::gaussian(Vec::Zero(4), 0.1 * Mat::Identity(4, 4));
    const auto tr = rollout(b.loop, init, 40, 9, 0);
    const auto st = monte_carlo(b.loop, init, 1, 40, 9);
    CHECK(max_abs_diff(st.mean_x, tr.x) == 0.0);
    CHECK(st.mean_total_cost == tr.total_cost);
    CHECK(st.stderr_total_cost == 0.0);
}

TEST_CASE("serial and parallel Monte Carlo are bit-identical") {
    const auto& b = baseline();
    const auto init = InitSpec::stationary(b.sol.state_covariance);
    const auto serial = monte_carlo_serial(b.loop, init, 300, 60, 11, {10, 0});
    for (const int threads : {1, 2, 4}) {
        const auto par = monte_carlo(b.loop, init, 300, 60, 11, {10, threads});
        CHECK(par.total_costs == serial.total_costs);
        CHECK(par.average_stage_cost == serial.average_stage_cost);
        CHECK(par.error_moment == serial.error_moment);
        CHECK(max_abs_diff(par.mean_z2, serial.mean_z2) == 0.0);
    }
}

TEST_CASE("empirical average cost matches the analytic value") {
    const auto& b = baseline();
    const auto st = monte_carlo(b.loop, InitSpec::stationary(b.sol.state_covariance), 64, 2000, 21);
    CHECK(std::abs(st.average_stage_cost - b.sol.J) < 3.0 * st.stderr_average_stage_cost);
}

TEST_CASE("finite-horizon mean cost matches the value function") {
    const std::size_t T = 40;
    auto g = fixture::pursuit_game(T);
    g.x0_mean << -2.0, 1.0, 0.0, 0.0;
    g.x0_cov = 0.2 * Mat::Identity(4, 4);
    const auto model = validate_model(g);
    const auto eq = solve_finite(model);
    REQUIRE(eq.diagnostics.converged);
    const auto loop = ClosedLoop::finite(model, eq);
    const auto st = monte_carlo(loop, InitSpec::gaussian(g.x0_mean, g.x0_cov), 4000, T, 5);
    const double v = finite_value(eq, g.x0_mean, g.x0_cov);
    CHECK(std::abs(st.mean_total_cost - v) < 3.0 * st.stderr_total_cost);
    CHECK_THROWS_AS(monte_carlo(loop, InitSpec::gaussian(g.x0_mean, g.x0_cov), 10, T + 1, 5), Error);
}

TEST_CASE("decoupled Kalman filters reach the stationary error covariance") {
    const auto s = fixture::pursuit({.V1 = 2.0 * Mat::Identity(2, 2)});
    const Mat S1 = oracle::filter_dare(s.A, s.C1, s.W, s.V1);
    const Mat S2 = oracle::filter_dare(s.A, s.C2, s.W, s.V2);
    const GainStage K = GainStage::zero(dimensions_of(s));
    ClosedLoop loop;
    loop.stages = {s};
    loop.gains = {K};
    loop.filters = {make_filter_stage(s, K, oracle::kalman_gain(S1, s.C1, s.V1), oracle::kalman_gain(S2, s.C2, s.V2))};
    const auto st = monte_carlo(loop, InitSpec::fixed(Vec::Zero(4), Vec::Zero(4), Vec::Zero(4)), 512, 400, 8, {200, 0});
    CHECK(oracle::rel(st.error_moment.topLeftCorner(4, 4), S1) < 0.1);
    CHECK(oracle::rel(st.error_moment.bottomRightCorner(4, 4), S2) < 0.1);
}

// The realized error covariance is the error block of the closed-loop Lyapunov
// solution. The filter-design recursion (Abar applied to Sigma^+) propagates the
// opponent's a posteriori error and is not the same matrix off the decoupled case.
TEST_CASE("equilibrium estimates are unbiased and match the stationary covariance") {
    const auto& b = baseline();
    const auto st = monte_carlo(b.loop, InitSpec::stationary(b.sol.state_covariance), 10000, 100, 13, {0, 0});
    CHECK(st.time_avg_error_mean.norm() < 3.0 * st.time_avg_error_stderr.norm());
    const Mat expected = b.sol.state_covariance.bottomRightCorner(8, 8);
    CHECK(oracle::rel(st.error_moment, expected) < 0.1);
}

TEST_CASE("wrong velocity belief produces a y excursion of the pursuer") {
    const auto& b = baseline();
    const Vec x0 = (Vec(4) << -10, 0, 0, 0).finished();
    const Vec z1 = (Vec(4) << -10, 0, 0, -10).finished();
    const std::size_t T = 200;
    const auto st = monte_carlo(b.loop, InitSpec::fixed(x0, z1, x0), 1000, T, 17);
    // Pursuer position from its own (mean) input through the double integrator.
    const auto& s = b.model->m;
    Vec p = Vec::Zero(4);
    Mat Bp = Mat::Zero(4, 2);
    Bp.bottomRows(2) = s.B1.bottomRows(2);
    double max_y = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        p = s.A * p + Bp * st.mean_u1[t];
        max_y = std::max(max_y, std::abs(p(1)));
    }
    CHECK(max_y > 0.1);
}
