// nomabf - fairness beamforming toolkit for two-user MISO-NOMA downlinks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

#include "nomabf/common.hpp"

namespace nomabf {

/// splitmix64 finalizer; used both as the generator step and to derive
/// independent substreams from (seed, key...) tuples.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for an independent stream keyed by up to three indices.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t k0,
                                 std::uint64_t k1 = 0, std::uint64_t k2 = 0) {
    std::uint64_t s = mix64(seed ^ 0x6a09e667f3bcc909ULL);
    s = mix64(s ^ k0);
    s = mix64(s ^ k1);
    s = mix64(s ^ k2);
    return s;
}

/// Small counter-based PRNG (splitmix64). Every consumer owns its stream, so
/// draws are reproducible independently of evaluation order elsewhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static Rng stream(std::uint64_t seed, std::uint64_t k0, std::uint64_t k1 = 0,
                      std::uint64_t k2 = 0) {
        return Rng(stream_seed(seed, k0, k1, k2));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /// Circularly symmetric complex Gaussian, total variance 1.
    /// Box-Muller consumes exactly two uniforms per draw.
    cplx cgaussian() {
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1));  // already includes the 1/sqrt(2) split
        return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
    }

private:
    std::uint64_t state_;
};

}  // namespace nomabf
