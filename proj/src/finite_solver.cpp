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
#include "asymgame/finite_solver.hpp"

#include "asymgame/error.hpp"

#include <fmt/format.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <limits>

namespace asymgame {

ExtractedGamma extract_gamma(const std::vector<CostQuadratic>& costs) {
    ExtractedGamma out;
    out.gammas.reserve(costs.size());
    out.flags.reserve(costs.size());
    for (std::size_t t = 0; t < costs.size(); ++t) {
        const Index n = costs[t].P.rows() / 3;
        WeightMatrix w{costs[t].P.bottomRightCorner(2 * n, 2 * n), t};
        out.flags.push_back({w.minimizer_block_positive(), w.maximizer_block_negative()});
        out.gammas.push_back(std::move(w));
    }
    return out;
}

double gain_distance(const GainSequence& a, const GainSequence& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        s += (a[t].K1 - b[t].K1).squaredNorm() + (a[t].K2 - b[t].K2).squaredNorm();
    }
    return std::sqrt(s);
}

double filter_distance(const FilterParams& a, const FilterParams& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        s += (a[t].A1 - b[t].A1).squaredNorm() + (a[t].A2 - b[t].A2).squaredNorm() +
             (a[t].Bbar1 - b[t].Bbar1).squaredNorm() + (a[t].Bbar2 - b[t].Bbar2).squaredNorm() +
             (a[t].Lbar1 - b[t].Lbar1).squaredNorm() + (a[t].Lbar2 - b[t].Lbar2).squaredNorm();
    }
    return std::sqrt(s);
}

namespace {

WeightSequence default_gammas(std::size_t T, Index n) {
    WeightSequence g;
    g.reserve(T + 1);
    for (std::size_t t = 0; t <= T; ++t) g.push_back(WeightMatrix::standard(n, t));
    return g;
}

double max_filter_residual(const GameModel& m, const ForwardResult& fw, const WeightSequence& gammas) {
    double worst = 0.0;
    for (std::size_t t = 1; t < m.horizon(); ++t) {
        const StageMatrices& s = m.stages[t];
        const GainResidual r =
            filter_gain_residual(fw.innovation[t], fw.apriori[t - 1], gammas[t], s.C1, s.C2, s.V1, s.V2);
        worst = std::max(worst, r.max());
    }
    return worst;
}

}  // namespace

FiniteEquilibrium solve_finite(const ValidatedGame& model, const FiniteOptions& opts,
                               const std::optional<GainSequence>& K_init,
                               const std::optional<WeightSequence>& gamma_init) {
    if (!(opts.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
    if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "damping must lie in (0, 1]");
    }
    if (opts.max_iter == 0) throw Error(ErrorKind::InvalidArgument, "max_iter must be positive");

    const GameModel& m = model.get();
    const std::size_t T = m.horizon();
    const Dimensions d = m.dims();

    GainSequence K = K_init ? *K_init : GainSequence(T, GainStage::zero(d));
    if (K.size() != T) throw Error(ErrorKind::DimensionMismatch, "initial gains do not cover the horizon");
    const WeightSequence gamma0 = gamma_init ? *gamma_init : default_gammas(T, d.n);
    if (gamma0.size() != T + 1) throw Error(ErrorKind::DimensionMismatch, "initial Gamma does not cover 0..T");
    WeightSequence gammas = gamma0;

    FiniteEquilibrium best;
    double best_residual = std::numeric_limits<double>::infinity();
    bool have_best = false;
    std::vector<double> history;
    std::optional<FilterParams> F_prev;
    std::size_t fallbacks = 0;
    std::vector<GammaFlags> flags;

    for (std::size_t k = 0; k < opts.max_iter; ++k) {
        ForwardResult fw = forward_pass(model, K, gammas, opts.innovation);
        BackwardResult bw = backward_pass(model, fw.filters);

        GainSequence K_new = std::move(bw.gains);
        if (opts.damping < 1.0) {
            for (std::size_t t = 0; t < T; ++t) {
                K_new[t].K1 = (1.0 - opts.damping) * K[t].K1 + opts.damping * K_new[t].K1;
                K_new[t].K2 = (1.0 - opts.damping) * K[t].K2 + opts.damping * K_new[t].K2;
            }
        }
        const double residual = F_prev ? gain_distance(K_new, K) + filter_distance(fw.filters, *F_prev)
                                       : std::numeric_limits<double>::infinity();
        history.push_back(residual);

        const ExtractedGamma ex = extract_gamma(bw.costs);
        flags = ex.flags;

        double stat = 0.0;
        for (const auto& r : bw.residuals) stat = std::max(stat, r.max());

        if (!have_best || residual < best_residual) {
            best.gains = K_new;
            best.forward = fw;
            best.costs = bw.costs;
            best.gammas = gammas;
            best.diagnostics.iterations = k + 1;
            best.diagnostics.residual = residual;
            best.diagnostics.gamma_flags = flags;
            best.diagnostics.max_stationarity_residual = stat;
            best_residual = residual;
            have_best = true;
        }

        F_prev = std::move(fw.filters);
        K = std::move(K_new);
        if (residual <= opts.tol) {
            best.diagnostics.converged = true;
            break;
        }

        if (opts.gamma == GammaPolicy::RefreshFromCost) {
            fallbacks = 0;
            for (std::size_t t = 0; t <= T; ++t) {
                if (ex.flags[t].ok()) {
                    gammas[t] = ex.gammas[t];
                } else {
                    gammas[t] = gamma0[t];
                    ++fallbacks;
                }
            }
        }
    }

    best.diagnostics.history = std::move(history);
    best.diagnostics.gamma_fallbacks = fallbacks;
    best.diagnostics.max_filter_gain_residual = max_filter_residual(m, best.forward, best.gammas);
    return best;
}

double finite_value(const CostQuadratic& c0, const Vec& x0_mean, const Mat& X0) {
    const Index n = x0_mean.size();
    if (c0.P.rows() != 3 * n || X0.rows() != n) {
        throw Error(ErrorKind::DimensionMismatch, "finite_value: shapes do not match");
    }
    Vec mean = Vec::Zero(3 * n);
    mean.head(n) = x0_mean;
    // x_0, e^1_0 and e^2_0 all equal x_0 - xbar_0 up to the mean, so every block is X0.
    const Mat cov = Eigen::kroneckerProduct(Mat::Ones(3, 3), X0).eval();
    return mean.dot(c0.P * mean) + (c0.P * cov).trace() + c0.r;
}

double finite_value(const FiniteEquilibrium& eq, const Vec& x0_mean, const Mat& X0) {
    return finite_value(eq.costs.front(), x0_mean, X0);
}

}  // namespace asymgame
