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

#include "nomabf/channel.hpp"

#include <stdexcept>

#include "nomabf/rng.hpp"

namespace nomabf {

double LinkBudget::noise_variance_watt() const {
    validate();
    const double n0_dbm = noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz);
    return std::pow(10.0, (n0_dbm - 30.0) / 10.0);
}

void LinkBudget::validate() const {
    if (!(bandwidth_hz > 0.0) || !(tx_power_watt > 0.0) || !(carrier_freq_hz > 0.0)) {
        throw std::domain_error("LinkBudget: powers and frequencies must be positive");
    }
}

cplx BasisProjections::g21() const { return std::polar(g21_mag, g21_angle); }

double BasisProjections::h2_norm() const {
    return std::sqrt(g21_mag * g21_mag + g22 * g22);
}

double path_loss_db(double d_km) {
    if (!(d_km > 0.0)) throw std::domain_error("path_loss_db: distance must be positive");
    return 128.1 + 37.6 * std::log10(d_km);
}

namespace {

double attenuation_from_distance(double d_m) {
    return std::pow(10.0, -path_loss_db(d_m / 1000.0) / 10.0);
}

}  // namespace

Scenario sample_scenario(int nt, std::pair<double, double> d1_range_m,
                         std::pair<double, double> d2_range_m,
                         const LinkBudget& budget, std::uint64_t seed) {
    if (nt < 2) throw std::domain_error("sample_scenario: need at least two antennas");
    if (!(d1_range_m.first > 0.0) || !(d1_range_m.second >= d1_range_m.first) ||
        !(d2_range_m.first > 0.0) || !(d2_range_m.second >= d2_range_m.first)) {
        throw std::domain_error("sample_scenario: invalid distance interval");
    }
    budget.validate();

    Rng rng = Rng::stream(seed, 0x5ce0);
    Scenario s;
    s.nt = nt;
    s.seed = seed;
    s.d1_m = rng.uniform(d1_range_m.first, d1_range_m.second);
    s.d2_m = rng.uniform(d2_range_m.first, d2_range_m.second);
    s.beta1 = attenuation_from_distance(s.d1_m);
    s.beta2 = attenuation_from_distance(s.d2_m);

    const double a1 = std::sqrt(s.beta1);
    const double a2 = std::sqrt(s.beta2);
    s.h1.resize(nt);
    s.h2.resize(nt);
    for (int i = 0; i < nt; ++i) s.h1[i] = a1 * rng.cgaussian();
    for (int i = 0; i < nt; ++i) s.h2[i] = a2 * rng.cgaussian();

    // Keep the weak user first; swap roles rather than resampling so the
    // configured distance distributions are preserved.
    if (vec_norm(s.h1) > vec_norm(s.h2)) {
        std::swap(s.h1, s.h2);
        std::swap(s.d1_m, s.d2_m);
        std::swap(s.beta1, s.beta2);
    }
    return s;
}

OrthonormalBasis build_basis(const Scenario& s) {
    const double n1 = vec_norm(s.h1);
    if (!(n1 > 0.0)) throw std::runtime_error("build_basis: h1 is zero");

    OrthonormalBasis b;
    b.u1.resize(s.h1.size());
    for (std::size_t i = 0; i < s.h1.size(); ++i) b.u1[i] = s.h1[i] / n1;

    // Two projection passes; a single pass can leave an O(eps*cond) overlap
    // when the channels are nearly parallel.
    cvec r = s.h2;
    for (int pass = 0; pass < 2; ++pass) {
        const cplx c = inner(b.u1, r);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * b.u1[i];
    }
    const double rn = vec_norm(r);
    if (rn < 1e-14 * vec_norm(s.h2)) {
        throw std::runtime_error("build_basis: channels are parallel (degenerate basis)");
    }
    b.u2.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) b.u2[i] = r[i] / rn;
    return b;
}

BasisProjections project_channels(const Scenario& s, const OrthonormalBasis& b) {
    BasisProjections p;
    p.h1_norm = vec_norm(s.h1);
    const cplx g21 = inner(s.h2, b.u1);  // h2^H u1
    p.g21_mag = std::abs(g21);
    p.g21_angle = p.g21_mag > 0.0 ? wrap_angle(std::arg(g21)) : 0.0;
    p.g22 = std::real(inner(s.h2, b.u2));  // imaginary part is rounding noise
    return p;
}

FeatureVector extract_features(const BasisProjections& p, double xi) {
    if (!(xi > 0.0)) throw std::domain_error("extract_features: xi must be positive");
    FeatureVector f;
    const double a = xi * p.h1_norm;
    const double b = xi * p.g22;
    const double c = xi * p.g21_mag;
    f.v = {a, b, c, a * a, b * b, c * c, p.g21_angle};
    return f;
}

}  // namespace nomabf
