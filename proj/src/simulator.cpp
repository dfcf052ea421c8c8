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
#include "asymgame/simulator.hpp"

#include "asymgame/error.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace asymgame {

ClosedLoop ClosedLoop::finite(const ValidatedGame& model, const FiniteEquilibrium& eq) {
    ClosedLoop loop;
    loop.stages = model->stages;
    loop.gains = eq.gains;
    loop.filters = eq.filters();
    loop.terminal_cost = model->Q_T;
    if (loop.stages.empty()) throw Error(ErrorKind::InvalidArgument, "cannot simulate a zero-horizon game");
    return loop;
}

ClosedLoop ClosedLoop::stationary(const ValidatedStationary& model, const StationarySolution& sol) {
    ClosedLoop loop;
    loop.stages = {model->m};
    loop.gains = {sol.gains};
    loop.filters = {sol.filter};
    return loop;
}

InitSpec InitSpec::fixed(Vec x0, Vec z1, Vec z2) {
    InitSpec s;
    s.kind = InitKind::Fixed;
    s.x0 = std::move(x0);
    s.z0_1 = std::move(z1);
    s.z0_2 = std::move(z2);
    return s;
}

InitSpec InitSpec::gaussian(Vec mean, Mat cov) {
    InitSpec s;
    s.kind = InitKind::Gaussian;
    s.mean = std::move(mean);
    s.cov = std::move(cov);
    return s;
}

InitSpec InitSpec::stationary(Mat state_covariance) {
    InitSpec s;
    s.kind = InitKind::Stationary;
    s.cov = std::move(state_covariance);
    return s;
}

namespace {

struct StageNoise {
    GaussianFactor w, v1, v2;
};

struct Prepared {
    std::vector<StageNoise> noise;
    GaussianFactor initial;
};

Prepared prepare(const ClosedLoop& loop, const InitSpec& init, std::size_t T) {
    if (loop.stages.empty() || loop.gains.size() != loop.stages.size() || loop.filters.size() != loop.stages.size()) {
        throw Error(ErrorKind::DimensionMismatch, "closed loop needs one gain and filter per stage");
    }
    if (!loop.broadcast() && T != loop.stages.size()) {
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("finite-horizon policy covers {} steps, {} requested", loop.stages.size(), T));
    }
    const Dimensions d = loop.dims();
    switch (init.kind) {
        case InitKind::Fixed:
            if (init.x0.size() != d.n || init.z0_1.size() != d.n || init.z0_2.size() != d.n) {
                throw Error(ErrorKind::DimensionMismatch,
                            fmt::format("initial vectors must have length {}", d.n));
            }
            break;
        case InitKind::Gaussian:
            if (init.mean.size() != d.n || init.cov.rows() != d.n || init.cov.cols() != d.n) {
                throw Error(ErrorKind::DimensionMismatch, "initial mean/covariance do not match the state");
            }
            break;
        case InitKind::Stationary:
            if (init.cov.rows() != 3 * d.n || init.cov.cols() != 3 * d.n) {
                throw Error(ErrorKind::DimensionMismatch, "stationary covariance must be 3n x 3n");
            }
            break;
    }
    Prepared p;
    p.noise.reserve(loop.stages.size());
    for (const StageMatrices& s : loop.stages) {
        p.noise.push_back({GaussianFactor(s.W), GaussianFactor(s.V1), GaussianFactor(s.V2)});
    }
    if (init.kind != InitKind::Fixed) p.initial = GaussianFactor(init.cov);
    return p;
}

Trajectory run(const ClosedLoop& loop, const Prepared& prep, const InitSpec& init, std::size_t T, std::uint64_t seed,
               std::uint64_t stream, bool noise) {
    const Dimensions d = loop.dims();
    RandomStream rng(seed, stream);
    const auto draw = [&](const GaussianFactor& f, Index dim) -> Vec {
        if (!noise) return Vec::Zero(dim);
        return f.sample(Vec::Zero(dim), rng);
    };

    Trajectory tr;
    tr.seed = seed;
    tr.stream = stream;
    tr.x.reserve(T + 1);
    tr.z1.reserve(T + 1);
    tr.z2.reserve(T + 1);
    tr.u1.reserve(T);
    tr.u2.reserve(T);
    tr.y1.reserve(T);
    tr.y2.reserve(T);
    tr.stage_cost.reserve(T);

    Vec x, z1, z2;
    switch (init.kind) {
        case InitKind::Fixed:
            x = init.x0;
            z1 = init.z0_1;
            z2 = init.z0_2;
            break;
        case InitKind::Gaussian:
            x = init.mean + draw(prep.initial, d.n);
            z1 = init.mean;
            z2 = init.mean;
            break;
        case InitKind::Stationary: {
            const Vec X = draw(prep.initial, 3 * d.n);
            x = X.head(d.n);
            z1 = x - X.segment(d.n, d.n);
            z2 = x - X.tail(d.n);
            break;
        }
    }
    const bool measure_first = init.kind == InitKind::Stationary;

    double total = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const std::size_t i = loop.index(t);
        const StageMatrices& s = loop.stages[i];
        const GainStage& K = loop.gains[i];
        const FilterStage& F = loop.filters[i];

        const Vec u1 = K.K1 * z1;
        const Vec u2 = K.K2 * z2;
        const double cost = x.dot(s.Q * x) + u1.dot(s.R * u1) + u2.dot(s.S * u2);

        const Vec w = draw(prep.noise[i].w, d.n);
        const Vec v1 = draw(prep.noise[i].v1, d.p1);
        const Vec v2 = draw(prep.noise[i].v2, d.p2);

        tr.x.push_back(x);
        tr.z1.push_back(z1);
        tr.z2.push_back(z2);
        tr.u1.push_back(u1);
        tr.u2.push_back(u2);
        tr.stage_cost.push_back(cost);
        total += cost;

        const Vec y1 = s.C1 * x + v1;
        const Vec y2 = s.C2 * x + v2;
        tr.y1.push_back(y1);
        tr.y2.push_back(y2);
        if (t > 0 || measure_first) {
            z1 = filter_step(z1, u1, y1, s, F, Player::Minimizer);
            z2 = filter_step(z2, u2, y2, s, F, Player::Maximizer);
        } else {
            z1 = filter_predict(z1, u1, F, Player::Minimizer);
            z2 = filter_predict(z2, u2, F, Player::Maximizer);
        }
        x = s.A * x + s.B1 * u1 + s.B2 * u2 + w;
    }
    tr.x.push_back(x);
    tr.z1.push_back(z1);
    tr.z2.push_back(z2);
    if (loop.terminal_cost.size() > 0) tr.terminal_cost = x.dot(loop.terminal_cost * x);
    tr.total_cost = total + tr.terminal_cost;
    return tr;
}

// Partial sums over a contiguous range of rollouts.
struct Accumulator {
    std::vector<Vec> x, z1, z2, u1, u2;
    std::vector<double> stage_cost;
    Mat error_moment;
    Vec err_sum, err_sumsq;
    double total = 0.0, total_sq = 0.0, avg = 0.0, avg_sq = 0.0;

    Accumulator(const Dimensions& d, std::size_t T)
        : x(T + 1, Vec::Zero(d.n)),
          z1(T + 1, Vec::Zero(d.n)),
          z2(T + 1, Vec::Zero(d.n)),
          u1(T, Vec::Zero(d.m1)),
          u2(T, Vec::Zero(d.m2)),
          stage_cost(T, 0.0),
          error_moment(Mat::Zero(2 * d.n, 2 * d.n)),
          err_sum(Vec::Zero(2 * d.n)),
          err_sumsq(Vec::Zero(2 * d.n)) {}

    void add(const Trajectory& tr, std::size_t error_from) {
        const std::size_t T = tr.steps();
        const Index n = tr.x.front().size();
        Vec e(2 * n), time_avg = Vec::Zero(2 * n);
        for (std::size_t t = 0; t <= T; ++t) {
            x[t] += tr.x[t];
            z1[t] += tr.z1[t];
            z2[t] += tr.z2[t];
            e << tr.x[t] - tr.z1[t], tr.x[t] - tr.z2[t];
            time_avg += e;
            if (t >= error_from) error_moment.noalias() += e * e.transpose();
        }
        for (std::size_t t = 0; t < T; ++t) {
            u1[t] += tr.u1[t];
            u2[t] += tr.u2[t];
            stage_cost[t] += tr.stage_cost[t];
        }
        time_avg /= static_cast<double>(T + 1);
        err_sum += time_avg;
        err_sumsq += time_avg.cwiseProduct(time_avg);
        total += tr.total_cost;
        total_sq += tr.total_cost * tr.total_cost;
        double stage_sum = 0.0;
        for (double c : tr.stage_cost) stage_sum += c;
        const double a = T > 0 ? stage_sum / static_cast<double>(T) : 0.0;
        avg += a;
        avg_sq += a * a;
    }

    void merge(const Accumulator& o) {
        for (std::size_t t = 0; t < x.size(); ++t) {
            x[t] += o.x[t];
            z1[t] += o.z1[t];
            z2[t] += o.z2[t];
        }
        for (std::size_t t = 0; t < u1.size(); ++t) {
            u1[t] += o.u1[t];
            u2[t] += o.u2[t];
            stage_cost[t] += o.stage_cost[t];
        }
        error_moment += o.error_moment;
        err_sum += o.err_sum;
        err_sumsq += o.err_sumsq;
        total += o.total;
        total_sq += o.total_sq;
        avg += o.avg;
        avg_sq += o.avg_sq;
    }
};

constexpr std::size_t kBlock = 64;

double std_error(double sum, double sumsq, std::size_t N) {
    if (N < 2) return 0.0;
    const double mean = sum / static_cast<double>(N);
    const double var = std::max(0.0, (sumsq - static_cast<double>(N) * mean * mean) / static_cast<double>(N - 1));
    return std::sqrt(var / static_cast<double>(N));
}

RolloutStats finish(Accumulator& acc, std::vector<double> totals, std::size_t N, std::size_t T,
                    std::size_t error_from) {
    const double inv = 1.0 / static_cast<double>(N);
    RolloutStats st;
    st.rollouts = N;
    st.steps = T;
    for (auto& v : acc.x) v *= inv;
    for (auto& v : acc.z1) v *= inv;
    for (auto& v : acc.z2) v *= inv;
    for (auto& v : acc.u1) v *= inv;
    for (auto& v : acc.u2) v *= inv;
    for (auto& c : acc.stage_cost) c *= inv;
    st.mean_x = std::move(acc.x);
    st.mean_z1 = std::move(acc.z1);
    st.mean_z2 = std::move(acc.z2);
    st.mean_u1 = std::move(acc.u1);
    st.mean_u2 = std::move(acc.u2);
    st.mean_stage_cost = std::move(acc.stage_cost);
    st.total_costs = std::move(totals);
    st.mean_total_cost = acc.total * inv;
    st.stderr_total_cost = std_error(acc.total, acc.total_sq, N);
    st.average_stage_cost = acc.avg * inv;
    st.stderr_average_stage_cost = std_error(acc.avg, acc.avg_sq, N);
    st.time_avg_error_mean = acc.err_sum * inv;
    st.time_avg_error_stderr = Vec(acc.err_sum.size());
    for (Index i = 0; i < acc.err_sum.size(); ++i) {
        st.time_avg_error_stderr(i) = std_error(acc.err_sum(i), acc.err_sumsq(i), N);
    }
    const std::size_t samples = T >= error_from ? (T - error_from + 1) * N : 0;
    st.error_moment = samples > 0 ? Mat(acc.error_moment / static_cast<double>(samples)) : acc.error_moment;
    return st;
}

RolloutStats aggregate(const ClosedLoop& loop, const InitSpec& init, std::size_t N, std::size_t T, std::uint64_t seed,
                       const MonteCarloOptions& opts, int threads) {
    if (N == 0) throw Error(ErrorKind::InvalidArgument, "need at least one rollout");
    const Prepared prep = prepare(loop, init, T);
    const Dimensions d = loop.dims();
    const std::size_t blocks = (N + kBlock - 1) / kBlock;
    // Blocks are produced a wave at a time to bound memory, then folded in index order.
    const std::size_t wave = std::max<std::size_t>(1, static_cast<std::size_t>(threads) * 4);

    Accumulator total(d, T);
    std::vector<double> totals(N, 0.0);
    for (std::size_t first = 0; first < blocks; first += wave) {
        const std::size_t count = std::min(wave, blocks - first);
        std::vector<Accumulator> partial(count, Accumulator(d, T));
        const auto fill = [&](std::size_t j) {
            const std::size_t b = first + j;
            const std::size_t lo = b * kBlock, hi = std::min(N, lo + kBlock);
            for (std::size_t k = lo; k < hi; ++k) {
                const Trajectory tr = run(loop, prep, init, T, seed, k, true);
                totals[k] = tr.total_cost;
                partial[j].add(tr, opts.error_from);
            }
        };
        if (threads > 1) {
            const auto n_jobs = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
            for (std::ptrdiff_t j = 0; j < n_jobs; ++j) fill(static_cast<std::size_t>(j));
        } else {
            for (std::size_t j = 0; j < count; ++j) fill(j);
        }
        for (const Accumulator& a : partial) total.merge(a);
    }
    return finish(total, std::move(totals), N, T, opts.error_from);
}

}  // namespace

Trajectory rollout(const ClosedLoop& loop, const InitSpec& init, std::size_t T, std::uint64_t seed,
                   std::uint64_t stream, bool noise) {
    return run(loop, prepare(loop, init, T), init, T, seed, stream, noise);
}

int rollout_threads(int requested) {
    int t = requested > 0 ? requested : omp_get_max_threads();
    if (const char* env = std::getenv("ASYMGAME_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap > 0) t = std::min(t, cap);
        } catch (const std::exception&) {
            // Ignore malformed values.
        }
    }
    return std::max(1, t);
}

RolloutStats monte_carlo(const ClosedLoop& loop, const InitSpec& init, std::size_t N, std::size_t T,
                         std::uint64_t seed, const MonteCarloOptions& opts) {
    return aggregate(loop, init, N, T, seed, opts, rollout_threads(opts.threads));
}

RolloutStats monte_carlo_serial(const ClosedLoop& loop, const InitSpec& init, std::size_t N, std::size_t T,
                                std::uint64_t seed, const MonteCarloOptions& opts) {
    return aggregate(loop, init, N, T, seed, opts, 1);
}

}  // namespace asymgame
