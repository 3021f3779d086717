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
#include <vector>

#include "nomabf/channel.hpp"
#include "nomabf/modulation.hpp"

namespace nomabf {

/// Gray-coded square QAM table. Bit words index the constellation: the first
/// log2(sqrt(M)) bits select the in-phase level, the rest the quadrature
/// level, each sub-word binary-reflected Gray over the descending amplitude
/// levels (word 0 maps to the top-right point).
struct GrayMap {
    int order = 0;
    int side = 0;                     // sqrt(M)
    int bits = 0;                     // log2(M)
    double energy = 0.0;              // E = (2/3)(M-1)
    std::vector<cplx> symbols;        // indexed by bit word

    static GrayMap make(int order);

    const cplx& symbol(std::uint32_t word) const { return symbols[word]; }
};

/// Bits as an explicit vector (MSB-first per the word layout above).
cplx modulate_gray(const std::vector<int>& bits, const GrayMap& map);

struct SimResult {
    std::uint64_t bits_sent1 = 0, bits_sent2 = 0;
    std::uint64_t bit_errors1 = 0, bit_errors2 = 0;
    std::uint64_t symbols = 0;
    std::uint64_t sic_symbol_errors = 0;  // strong-user frames with s1' != s1
    double ber1 = 0.0, ber2 = 0.0;
    double sic_symbol_error_rate = 0.0;
};

/// Symbol-level simulation of the full downlink: superposed transmission,
/// phase correction and ML detection at the weak user, SIC (detect s1,
/// subtract, detect s2) at the strong user. Deterministic per seed; symbols
/// are processed in blocks with per-block substreams.
SimResult simulate_ber_pair(const cvec& w1, const cvec& w2, const Scenario& scenario,
                            const ModulationSpec& mods, double n0_eff,
                            std::uint64_t n_symbols, std::uint64_t seed);

/// Binomial standard error of an error-rate estimate.
double standard_error(double ber, double n_bits);

}  // namespace nomabf
