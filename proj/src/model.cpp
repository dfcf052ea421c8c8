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
#include "asymgame/model.hpp"

#include "asymgame/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace asymgame {

namespace {

enum class Sign { PositiveSemidefinite, PositiveDefinite, NegativeDefinite };

std::string where(std::optional<std::size_t> stage) {
    return stage ? fmt::format(" at stage {}", *stage) : std::string();
}

void check_shape(const char* name, const Mat& m, Index rows, Index cols, std::optional<std::size_t> stage) {
    if (m.rows() != rows || m.cols() != cols) {
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("{}{} is {}x{}, expected {}x{}", name, where(stage), m.rows(), m.cols(), rows, cols),
                    stage);
    }
}

void symmetrize_checked(const char* name, Mat& m, std::optional<std::size_t> stage) {
    const double asym = relative_asymmetry(m);
    if (asym > kSymmetryTolerance) {
        throw Error(ErrorKind::AsymmetryBeyondTolerance,
                    fmt::format("{}{} has relative asymmetry {:.3e} (tolerance {:.0e})", name, where(stage), asym,
                                kSymmetryTolerance),
                    stage);
    }
    m = symmetrized(m);
}

void check_sign(const char* name, const Mat& m, Sign sign, std::optional<std::size_t> stage) {
    if (m.size() == 0) return;
    const Vec ev = symmetric_eigenvalues(m);
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    const double tol = kDefinitenessTolerance * scale;
    switch (sign) {
        case Sign::PositiveSemidefinite:
            if (ev.minCoeff() < -tol) {
                throw Error(ErrorKind::DefinitenessViolation,
                            fmt::format("{}{} has eigenvalue {:.6g}; must be positive semidefinite", name,
                                        where(stage), ev.minCoeff()),
                            stage);
            }
            break;
        case Sign::PositiveDefinite:
            if (ev.minCoeff() <= tol) {
                throw Error(ErrorKind::DefinitenessViolation,
                            fmt::format("{}{} has eigenvalue {:.6g}; must be positive definite", name, where(stage),
                                        ev.minCoeff()),
                            stage);
            }
            break;
        case Sign::NegativeDefinite:
            if (ev.maxCoeff() >= -tol) {
                throw Error(ErrorKind::DefinitenessViolation,
                            fmt::format("{}{} has eigenvalue {:.6g}; must be negative definite", name, where(stage),
                                        ev.maxCoeff()),
                            stage);
            }
            break;
    }
}

void validate_stage(StageMatrices& s, const Dimensions& d, std::optional<std::size_t> stage) {
    check_shape("A", s.A, d.n, d.n, stage);
    check_shape("B1", s.B1, d.n, d.m1, stage);
    check_shape("B2", s.B2, d.n, d.m2, stage);
    check_shape("W", s.W, d.n, d.n, stage);
    check_shape("C1", s.C1, d.p1, d.n, stage);
    check_shape("C2", s.C2, d.p2, d.n, stage);
    check_shape("V1", s.V1, d.p1, d.p1, stage);
    check_shape("V2", s.V2, d.p2, d.p2, stage);
    check_shape("Q", s.Q, d.n, d.n, stage);
    check_shape("R", s.R, d.m1, d.m1, stage);
    check_shape("S", s.S, d.m2, d.m2, stage);

    symmetrize_checked("W", s.W, stage);
    symmetrize_checked("V1", s.V1, stage);
    symmetrize_checked("V2", s.V2, stage);
    symmetrize_checked("Q", s.Q, stage);
    symmetrize_checked("R", s.R, stage);
    symmetrize_checked("S", s.S, stage);

    check_sign("W", s.W, Sign::PositiveSemidefinite, stage);
    check_sign("V1", s.V1, Sign::PositiveSemidefinite, stage);
    check_sign("V2", s.V2, Sign::PositiveSemidefinite, stage);
    check_sign("Q", s.Q, Sign::PositiveSemidefinite, stage);
    check_sign("R", s.R, Sign::PositiveDefinite, stage);
    check_sign("S", s.S, Sign::NegativeDefinite, stage);

    for (const Mat* m : {&s.A, &s.B1, &s.B2, &s.C1, &s.C2, &s.W, &s.V1, &s.V2, &s.Q, &s.R, &s.S}) {
        if (!m->allFinite()) {
            throw Error(ErrorKind::InvalidArgument, fmt::format("non-finite entry{}", where(stage)), stage);
        }
    }
}

}  // namespace

Dimensions GameModel::dims() const {
    if (!stages.empty()) return dimensions_of(stages.front());
    return {Q_T.rows(), 0, 0, 0, 0};
}

ValidatedGame validate_model(GameModel raw) {
    if (raw.Q_T.rows() == 0 && raw.stages.empty()) {
        throw Error(ErrorKind::DimensionMismatch, "model has neither stages nor a terminal cost");
    }
    const Dimensions d = raw.dims();
    if (d.n == 0) throw Error(ErrorKind::DimensionMismatch, "state dimension is zero");
    for (std::size_t t = 0; t < raw.stages.size(); ++t) validate_stage(raw.stages[t], d, t);

    check_shape("Q_T", raw.Q_T, d.n, d.n, std::nullopt);
    symmetrize_checked("Q_T", raw.Q_T, std::nullopt);
    check_sign("Q_T", raw.Q_T, Sign::PositiveSemidefinite, std::nullopt);

    if (raw.x0_mean.size() != d.n) {
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("x0_mean has length {}, expected {}", raw.x0_mean.size(), d.n));
    }
    check_shape("x0_cov", raw.x0_cov, d.n, d.n, std::nullopt);
    symmetrize_checked("x0_cov", raw.x0_cov, std::nullopt);
    check_sign("x0_cov", raw.x0_cov, Sign::PositiveSemidefinite, std::nullopt);
    return ValidatedGame(std::move(raw));
}

ValidatedStationary validate_model(StationaryModel raw) {
    const Dimensions d = raw.dims();
    if (d.n == 0) throw Error(ErrorKind::DimensionMismatch, "state dimension is zero");
    validate_stage(raw.m, d, std::nullopt);
    return ValidatedStationary(std::move(raw));
}

GameModel finite_from_stationary(const StationaryModel& m, std::size_t horizon, const Mat& Q_T, const Vec& x0_mean,
                                 const Mat& x0_cov) {
    GameModel g;
    g.stages.assign(horizon, m.m);
    g.Q_T = Q_T;
    g.x0_mean = x0_mean;
    g.x0_cov = x0_cov;
    return g;
}

AugmentedStepMatrices augment(const StageMatrices& s, const FilterStage& f) {
    const Dimensions d = dimensions_of(s);
    const Index n = d.n;
    const auto check = [&](const char* name, const Mat& m, Index rows, Index cols) {
        if (m.rows() != rows || m.cols() != cols) {
            throw Error(ErrorKind::DimensionMismatch,
                        fmt::format("filter {} is {}x{}, expected {}x{}", name, m.rows(), m.cols(), rows, cols));
        }
    };
    check("A1", f.A1, n, n);
    check("A2", f.A2, n, n);
    check("Bbar1", f.Bbar1, n, d.m1);
    check("Bbar2", f.Bbar2, n, d.m2);
    check("Lbar1", f.Lbar1, n, d.p1);
    check("Lbar2", f.Lbar2, n, d.p2);

    AugmentedStepMatrices out;
    out.A = Mat::Zero(3 * n, 3 * n);
    out.A.block(0, 0, n, n) = s.A;
    out.A.block(n, 0, n, n) = s.A - f.A1;
    out.A.block(n, n, n, n) = f.A1 - f.Lbar1 * s.C1;
    out.A.block(2 * n, 0, n, n) = s.A - f.A2;
    out.A.block(2 * n, 2 * n, n, n) = f.A2 - f.Lbar2 * s.C2;

    out.B1.resize(3 * n, d.m1);
    out.B1 << s.B1, s.B1 - f.Bbar1, s.B1;
    out.B2.resize(3 * n, d.m2);
    out.B2 << s.B2, s.B2, s.B2 - f.Bbar2;

    const Index nw = n + d.p1 + d.p2;
    const Mat I = Mat::Identity(n, n);
    out.G = Mat::Zero(3 * n, nw);
    out.G.block(0, 0, n, n) = I;
    out.G.block(n, 0, n, n) = I;
    out.G.block(n, n, n, d.p1) = -f.Lbar1;
    out.G.block(2 * n, 0, n, n) = I;
    out.G.block(2 * n, n + d.p1, n, d.p2) = -f.Lbar2;

    out.W = block_diag(s.W, s.V1, s.V2);
    out.Q = augmented_terminal_cost(s.Q);
    return out;
}

Mat augmented_terminal_cost(const Mat& Q_T) {
    const Index n = Q_T.rows();
    Mat out = Mat::Zero(3 * n, 3 * n);
    out.topLeftCorner(n, n) = Q_T;
    return out;
}

}  // namespace asymgame
