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

#include <array>
#include <cstdint>

namespace asymgame {

/// Philox4x32-10 block: 128-bit counter, 64-bit key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/**
 * Deterministic stream of standard normals. Value j of stream s under seed k
 * is a pure function of (k, s, j): counter = (j/2 low, j/2 high, s low, s high),
 * key = seed; each block gives two 53-bit uniforms and, by Box-Muller, two normals.
 */
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    double normal();
    Vec normals(Index k);
    /// Uniform in (0, 1).
    double uniform();

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }
    /// Normals consumed so far (a uniform counts as two).
    std::uint64_t position() const noexcept { return block_ * 2 - (cached_ ? 1 : 0); }

private:
    std::array<std::uint32_t, 4> next_block();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    bool cached_ = false;
    double spare_ = 0.0;
};

/// F with F F^T = cov, from an eigen-factorization. Eigenvalues in
/// [-1e-10 * trace, 0) are clipped to zero; anything lower is IndefiniteCovariance.
class GaussianFactor {
public:
    GaussianFactor() = default;
    explicit GaussianFactor(const Mat& cov);

    Index dim() const { return factor_.rows(); }
    const Mat& factor() const { return factor_; }
    bool zero() const { return zero_; }

    /// mean + F xi; always consumes dim() normals so streams stay aligned.
    Vec sample(const Vec& mean, RandomStream& rng) const;

private:
    Mat factor_;
    bool zero_ = true;
};

inline Vec sample_gaussian(const Vec& mean, const Mat& cov, RandomStream& rng) {
    return GaussianFactor(cov).sample(mean, rng);
}

}  // namespace asymgame
