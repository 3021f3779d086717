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

#include "nomabf/ber.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nomabf {

namespace {

int int_sqrt(int m) {
    const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    return r;
}

void require_validated(const ModulationSpec& mods) {
    if (!mods.validated_pair()) {
        throw std::runtime_error("unvalidated modulation pair (M1=" + std::to_string(mods.m1) +
                                 ", M2=" + std::to_string(mods.m2) +
                                 "): closed-form BER requires a passed Monte Carlo check");
    }
}

void require_noise(double n0_eff) {
    if (!(n0_eff > 0.0)) throw std::domain_error("ber: effective noise variance must be positive");
}

/// Sums of Q terms can go epsilon-negative through cancellation; anything
/// beyond rounding noise is a formula bug, not an input problem.
double clamp_probability(double p) {
    if (p < 0.0) {
        if (p < -1e-12) throw std::logic_error("ber: probability fell below 0 beyond rounding noise");
        return 0.0;
    }
    if (p > 1.0) {
        if (p > 1.0 + 1e-12) throw std::logic_error("ber: probability exceeded 1 beyond rounding noise");
        return 1.0;
    }
    return p;
}

// floor(num / den + 1/2) for non-negative integers, exactly.
long floor_half_up(long num, long den) { return (2 * num + den) / (2 * den); }

}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

double psi(double pe1, double pe2) { return pe1 > pe2 ? pe1 : pe2; }

double ber_user1_gains(double a1, double b1, double tau1, const ModulationSpec& mods,
                       double n0_eff) {
    require_validated(mods);
    require_noise(n0_eff);

    const long sqrt_m1 = int_sqrt(mods.m1);
    const long sqrt_m2 = int_sqrt(mods.m2);
    const int half_bits = mods.bits1 / 2;  // log2(sqrt(M1))
    const double inv_sigma = 1.0 / std::sqrt(n0_eff / 2.0);
    const double sig = a1 / std::sqrt(mods.e1);
    const double intf = b1 / std::sqrt(mods.e2);
    const double cos_t = std::cos(tau1), sin_t = std::sin(tau1);

    double sum_bits = 0.0;
    for (int i = 1; i <= half_bits; ++i) {
        const long weight = 1L << (i - 1);  // 2^(i-1)
        const long k_max = sqrt_m1 - sqrt_m1 / (2L * weight) - 1;  // (1 - 2^-i)*sqrt(M1) - 1
        double p_bi = 0.0;
        for (long k = 0; k <= k_max; ++k) {
            const long parity = (k * weight) / sqrt_m1;
            double d1 = static_cast<double>(weight - floor_half_up(k * weight, sqrt_m1));
            if (parity & 1) d1 = -d1;
            const double a_term = static_cast<double>(2 * k + 1) * sig;
            for (long l = 0; l < sqrt_m2; ++l) {
                const double b = static_cast<double>(2 * l - sqrt_m2 + 1);
                for (long m = 0; m < sqrt_m2; ++m) {
                    const double c = static_cast<double>(2 * m - sqrt_m2 + 1);
                    const double arg = (a_term + intf * (b * cos_t + c * sin_t)) * inv_sigma;
                    p_bi += d1 * q_function(arg);
                }
            }
        }
        sum_bits += p_bi;
    }
    const double pe = 2.0 / half_bits * sum_bits /
                      (static_cast<double>(mods.m2) * static_cast<double>(sqrt_m1));
    return clamp_probability(pe);
}

double ber_user2_gains(double gain_s1, double gain_s2, const ModulationSpec& mods,
                       double n0_eff) {
    require_validated(mods);
    require_noise(n0_eff);

    const long sqrt_m1 = int_sqrt(mods.m1);
    const long sqrt_m2 = int_sqrt(mods.m2);
    const int half_bits1 = mods.bits1 / 2;
    const int half_bits2 = mods.bits2 / 2;
    const double inv_sigma = 1.0 / std::sqrt(n0_eff / 2.0);
    const double a_unit = gain_s1 / std::sqrt(mods.e1);
    const double b_unit = gain_s2 / std::sqrt(mods.e2);
    // Exponent of the D3 divisor; integer (= 1) for 4-QAM, irrational for
    // higher orders, which the validation gate keeps out anyway.
    const double log2_lam1 = std::log2(static_cast<double>(sqrt_m1) - 1.0);

    double sum_bits = 0.0;
    for (int i = 1; i <= half_bits2; ++i) {
        const long weight = 1L << (i - 1);
        const long k_max = sqrt_m2 - sqrt_m2 / (2L * weight) - 1;
        double p_bi = 0.0;
        for (long k = 0; k <= k_max; ++k) {
            const long lambda2 = (k * weight) / sqrt_m2;
            const double d2 = static_cast<double>(weight - floor_half_up(k * weight, sqrt_m2));
            const double b = static_cast<double>(2 * k + 1) * b_unit;
            for (long l = 0; l <= 2 * (sqrt_m1 - 1); ++l) {
                const long s_exp = (l * (1L << (half_bits2 + i - 1))) / sqrt_m2 + lambda2;
                const double sign = (s_exp & 1) ? -1.0 : 1.0;
                const double d3_div = std::exp2(1.0 - (i - 1) * log2_lam1);
                const double d3 = static_cast<double>(1L << half_bits1) -
                                  std::floor(static_cast<double>(l) / d3_div + 0.5);
                const double coeff = sign * d2 * d3;
                const double a = static_cast<double>(l) * a_unit;
                p_bi += coeff * q_function((a + b) * inv_sigma);
                if (l >= 1) p_bi -= coeff * q_function((a - b) * inv_sigma);
            }
        }
        sum_bits += p_bi / std::sqrt(static_cast<double>(mods.m1) * static_cast<double>(mods.m2));
    }
    return clamp_probability(2.0 / half_bits2 * sum_bits);
}

double ber_user1(const BeamParams& p, const BasisProjections& proj,
                 const ModulationSpec& mods, double n0_eff) {
    return ber_user1_gains(p.rho1 * proj.h1_norm, p.delta1 * proj.h1_norm, p.tau1, mods, n0_eff);
}

double ber_user2(const BeamParams& p, const BasisProjections& proj,
                 const ModulationSpec& mods, double n0_eff) {
    return ber_user2_gains(composite_gain_s1(p, proj), composite_gain_s2(p, proj), mods, n0_eff);
}

BerPair ber_pair(const BeamParams& p, const BasisProjections& proj,
                 const ModulationSpec& mods, double n0_eff) {
    BerPair out;
    out.pe1 = ber_user1(p, proj, mods, n0_eff);
    out.pe2 = ber_user2(p, proj, mods, n0_eff);
    out.psi = psi(out.pe1, out.pe2);
    return out;
}

BerPair ber_4qam_appendix(const BeamParams& p, const BasisProjections& proj,
                          double n0_eff) {
    require_noise(n0_eff);
    const double sqrt_e = std::sqrt(2.0);  // E1 = E2 = 2 for 4-QAM
    const double inv_sigma = 1.0 / std::sqrt(n0_eff / 2.0);

    const double a1 = p.rho1 * proj.h1_norm / sqrt_e;
    const double b1 = p.delta1 * proj.h1_norm / sqrt_e;
    const double cos_t = std::cos(p.tau1), sin_t = std::sin(p.tau1);
    auto g1 = [&](double a, double b, double c) {
        return (a * a1 + b1 * (b * cos_t + c * sin_t)) * inv_sigma;
    };

    const double ga = composite_gain_s1(p, proj) / sqrt_e;
    const double gb = composite_gain_s2(p, proj) / sqrt_e;
    auto g2p = [&](double a, double b) { return (a * ga + b * gb) * inv_sigma; };
    auto g2m = [&](double a, double b) { return (a * ga - b * gb) * inv_sigma; };

    BerPair out;
    out.pe1 = clamp_probability(0.25 * (q_function(g1(1, -1, -1)) + q_function(g1(1, -1, 1)) +
                                        q_function(g1(1, 1, -1)) + q_function(g1(1, 1, 1))));
    out.pe2 = clamp_probability(0.5 * (2.0 * q_function(g2p(0, 1)) - q_function(g2p(1, 1)) +
                                       q_function(g2p(2, 1)) + q_function(g2m(1, 1)) -
                                       q_function(g2m(2, 1))));
    out.psi = psi(out.pe1, out.pe2);
    return out;
}

BerPair ber_4qam_appendix(const BeamParams& p, const BasisProjections& proj,
                          const ModulationSpec& mods, double n0_eff) {
    if (mods.m1 != 4 || mods.m2 != 4) {
        throw std::invalid_argument("ber_4qam_appendix: expressions are specific to M1 = M2 = 4");
    }
    return ber_4qam_appendix(p, proj, n0_eff);
}

}  // namespace nomabf
