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

#include <array>
#include <cstdint>
#include <utility>

#include "nomabf/common.hpp"

namespace nomabf {

/// Link budget of the cell. Transmit power is folded into an effective noise
/// variance so that beamformers can be kept on the unit power budget.
struct LinkBudget {
    double carrier_freq_hz = 2.0e9;
    double bandwidth_hz = 10.0e6;
    double noise_density_dbm_hz = -174.0;
    double tx_power_watt = 0.1;

    /// Receiver noise variance N0 in watts: N_PD + 10*log10(B), converted from dBm.
    double noise_variance_watt() const;

    /// N0 divided by the transmit power; the noise level seen by unit-power beamformers.
    double effective_noise_watt() const { return noise_variance_watt() / tx_power_watt; }

    /// Throws std::domain_error unless bandwidth and transmit power are positive.
    void validate() const;
};

/// One channel realization for a user pair. Invariant: ||h1|| <= ||h2||
/// (user roles are swapped at generation if the draw violates it).
struct Scenario {
    int nt = 0;
    cvec h1, h2;
    double d1_m = 0.0, d2_m = 0.0;
    double beta1 = 0.0, beta2 = 0.0;  // linear large-scale gains
    std::uint64_t seed = 0;
};

/// Orthonormal pair spanning {h1, h2}: u1 along h1, u2 the normalized
/// residual of h2. By construction h1^H u1 and h2^H u2 are real positive.
struct OrthonormalBasis {
    cvec u1, u2;
};

/// The scalars that fully determine both users' error rates.
struct BasisProjections {
    double h1_norm = 0.0;   // ||h1|| = h1^H u1
    double g21_mag = 0.0;   // |h2^H u1|
    double g21_angle = 0.0; // angle of h2^H u1, in [0, 2*pi)
    double g22 = 0.0;       // h2^H u2, real positive

    cplx g21() const;       // g21_mag * e^{j*g21_angle}
    double h2_norm() const; // sqrt(g21_mag^2 + g22^2); h2 lies in span{u1,u2}
};

/// Fixed 7x1 network input, identical layout for every antenna count:
/// [xi*|h1^H u1|, xi*|h2^H u2|, xi*|h2^H u1|, the three squares, angle(h2^H u1)].
struct FeatureVector {
    std::array<double, 7> v{};
};

/// 128.1 + 37.6*log10(d), d in km. Throws std::domain_error for d <= 0.
double path_loss_db(double d_km);

/// Rayleigh + path-loss realization: d_n uniform in its interval,
/// beta_n = 10^(-PL_n/10), h_n = sqrt(beta_n) * CN(0, I). Deterministic per seed.
Scenario sample_scenario(int nt, std::pair<double, double> d1_range_m,
                         std::pair<double, double> d2_range_m,
                         const LinkBudget& budget, std::uint64_t seed);

/// Gram-Schmidt pair for the scenario's channels. Throws std::runtime_error
/// when h2 is (numerically) parallel to h1.
OrthonormalBasis build_basis(const Scenario& s);

BasisProjections project_channels(const Scenario& s, const OrthonormalBasis& b);

/// xi > 0 scales the magnitudes; squared entries are (xi*magnitude)^2.
FeatureVector extract_features(const BasisProjections& p, double xi);

}  // namespace nomabf
