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
#include "asymgame/random.hpp"

#include "asymgame/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace asymgame {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u, kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u, kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

namespace {

double to_unit(std::uint32_t hi, std::uint32_t lo) {
    // 53 bits, mapped to the open interval (0, 1).
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> RandomStream::next_block() {
    const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                          static_cast<std::uint32_t>(stream_),
                                          static_cast<std::uint32_t>(stream_ >> 32)};
    ++block_;
    return philox4x32(ctr, {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
}

double RandomStream::normal() {
    if (cached_) {
        cached_ = false;
        return spare_;
    }
    const auto b = next_block();
    const double u1 = to_unit(b[0], b[1]);
    const double u2 = to_unit(b[2], b[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    cached_ = true;
    return radius * std::cos(angle);
}

Vec RandomStream::normals(Index k) {
    Vec out(k);
    for (Index i = 0; i < k; ++i) out(i) = normal();
    return out;
}

double RandomStream::uniform() {
    cached_ = false;
    const auto b = next_block();
    return to_unit(b[0], b[1]);
}

GaussianFactor::GaussianFactor(const Mat& cov) {
    if (cov.rows() != cov.cols()) throw Error(ErrorKind::DimensionMismatch, "covariance must be square");
    const Index k = cov.rows();
    factor_ = Mat::Zero(k, k);
    if (k == 0 || cov.isZero(0.0)) return;
    const Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(cov));
    const Vec ev = es.eigenvalues();
    const double floor = -1e-10 * std::abs(cov.trace());
    if (ev.minCoeff() < floor) {
        throw Error(ErrorKind::IndefiniteCovariance,
                    fmt::format("covariance has eigenvalue {:.6g} below the clip threshold {:.3g}", ev.minCoeff(),
                                floor));
    }
    factor_ = es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    zero_ = false;
}

Vec GaussianFactor::sample(const Vec& mean, RandomStream& rng) const {
    const Vec xi = rng.normals(dim());
    if (zero_) return mean;
    return mean + factor_ * xi;
}

}  // namespace asymgame
