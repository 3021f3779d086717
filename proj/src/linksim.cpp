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

#include "nomabf/linksim.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "nomabf/rng.hpp"

namespace nomabf {

namespace {

constexpr std::uint64_t kBlockSymbols = 1u << 16;

std::uint32_t gray_decode(std::uint32_t g) {
    std::uint32_t p = 0;
    for (; g; g >>= 1) p ^= g;
    return p;
}

/// Index of the nearest candidate c*symbols[w] to z; ties go to the lowest word.
std::uint32_t detect(const cplx& z, const cplx& coeff, const std::vector<cplx>& symbols) {
    std::uint32_t best = 0;
    double best_d = std::norm(z - coeff * symbols[0]);
    for (std::uint32_t w = 1; w < symbols.size(); ++w) {
        const double d = std::norm(z - coeff * symbols[w]);
        if (d < best_d) {
            best_d = d;
            best = w;
        }
    }
    return best;
}

}  // namespace

GrayMap GrayMap::make(int order) {
    if (order != 4 && order != 16 && order != 64) {
        throw std::invalid_argument("GrayMap: unsupported order");
    }
    GrayMap m;
    m.order = order;
    m.bits = 0;
    for (int v = order; v > 1; v >>= 1) ++m.bits;
    m.side = 1 << (m.bits / 2);
    m.energy = 2.0 / 3.0 * (order - 1);

    const double inv_sqrt_e = 1.0 / std::sqrt(m.energy);
    const int half = m.bits / 2;
    m.symbols.resize(order);
    for (std::uint32_t word = 0; word < static_cast<std::uint32_t>(order); ++word) {
        const std::uint32_t gi = word >> half;
        const std::uint32_t gq = word & ((1u << half) - 1u);
        const double ai = static_cast<double>(m.side - 1) - 2.0 * gray_decode(gi);
        const double aq = static_cast<double>(m.side - 1) - 2.0 * gray_decode(gq);
        m.symbols[word] = cplx(ai, aq) * inv_sqrt_e;
    }
    return m;
}

cplx modulate_gray(const std::vector<int>& bits, const GrayMap& map) {
    if (static_cast<int>(bits.size()) != map.bits) {
        throw std::invalid_argument("modulate_gray: expected log2(M) bits");
    }
    std::uint32_t word = 0;
    for (int b : bits) word = (word << 1) | (b ? 1u : 0u);
    return map.symbol(word);
}

SimResult simulate_ber_pair(const cvec& w1, const cvec& w2, const Scenario& scenario,
                            const ModulationSpec& mods, double n0_eff,
                            std::uint64_t n_symbols, std::uint64_t seed) {
    if (n_symbols < 1) throw std::domain_error("simulate_ber_pair: need at least one symbol");
    if (!(n0_eff >= 0.0)) throw std::domain_error("simulate_ber_pair: negative noise variance");

    const GrayMap map1 = GrayMap::make(mods.m1);
    const GrayMap map2 = GrayMap::make(mods.m2);

    // Scalar decision-statistic gains c_{receiver,beam}; the antenna
    // dimension drops out here.
    const cplx c11 = inner(scenario.h1, w1);
    const cplx c12 = inner(scenario.h1, w2);
    const cplx c21 = inner(scenario.h2, w1);
    const cplx c22 = inner(scenario.h2, w2);

    const cplx rot1 = std::polar(1.0, -(std::abs(c11) > 0.0 ? std::arg(c11) : 0.0));
    const cplx rot2 = std::polar(1.0, -(std::abs(c22) > 0.0 ? std::arg(c22) : 0.0));
    const cplx a11(std::abs(c11), 0.0);  // weak user's corrected s1 coefficient
    const cplx ct21 = c21 * rot2;        // strong user's corrected s1 coefficient
    const cplx a22(std::abs(c22), 0.0);

    const double noise_scale = std::sqrt(n0_eff);
    const std::uint32_t shift1 = 64 - mods.bits1;
    const std::uint32_t shift2 = 64 - mods.bits2;

    SimResult res;
    res.symbols = n_symbols;
    const std::uint64_t n_blocks = (n_symbols + kBlockSymbols - 1) / kBlockSymbols;
    for (std::uint64_t blk = 0; blk < n_blocks; ++blk) {
        Rng rng = Rng::stream(seed, 0x51b0, blk);
        const std::uint64_t lo = blk * kBlockSymbols;
        const std::uint64_t hi = std::min(n_symbols, lo + kBlockSymbols);
        for (std::uint64_t t = lo; t < hi; ++t) {
            const auto word1 = static_cast<std::uint32_t>(rng.next_u64() >> shift1);
            const auto word2 = static_cast<std::uint32_t>(rng.next_u64() >> shift2);
            const cplx s1 = map1.symbol(word1);
            const cplx s2 = map2.symbol(word2);
            const cplx nu1 = noise_scale * rng.cgaussian();
            const cplx nu2 = noise_scale * rng.cgaussian();

            // Weak user: phase-correct, single-user ML over its own constellation.
            const cplx y1 = (c11 * s1 + c12 * s2 + nu1) * rot1;
            const std::uint32_t det1 = detect(y1, a11, map1.symbols);
            res.bit_errors1 += std::popcount(det1 ^ word1);

            // Strong user: phase-correct by its s2 coefficient, detect s1,
            // subtract, then detect s2.
            const cplx y2 = (c21 * s1 + c22 * s2 + nu2) * rot2;
            const std::uint32_t s1_hat = detect(y2, ct21, map1.symbols);
            if (s1_hat != word1) ++res.sic_symbol_errors;
            const cplx residual = y2 - ct21 * map1.symbol(s1_hat);
            const std::uint32_t det2 = detect(residual, a22, map2.symbols);
            res.bit_errors2 += std::popcount(det2 ^ word2);
        }
    }

    res.bits_sent1 = n_symbols * static_cast<std::uint64_t>(mods.bits1);
    res.bits_sent2 = n_symbols * static_cast<std::uint64_t>(mods.bits2);
    res.ber1 = static_cast<double>(res.bit_errors1) / static_cast<double>(res.bits_sent1);
    res.ber2 = static_cast<double>(res.bit_errors2) / static_cast<double>(res.bits_sent2);
    res.sic_symbol_error_rate =
        static_cast<double>(res.sic_symbol_errors) / static_cast<double>(n_symbols);
    return res;
}

double standard_error(double ber, double n_bits) {
    if (!(n_bits > 0.0)) throw std::domain_error("standard_error: need a positive bit count");
    return std::sqrt(ber * (1.0 - ber) / n_bits);
}

}  // namespace nomabf
