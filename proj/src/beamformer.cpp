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

#include "nomabf/beamformer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nomabf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTrigZeroTol = 1e-12;  // floating-point reading of cos-sin == 0
constexpr int kRepairLoopCap = 10000;

cplx delta_combination(const BeamParams& p, const BasisProjections& proj) {
    return p.delta1 * std::polar(1.0, p.phi1) * proj.g21() +
           p.delta2 * std::polar(1.0, p.phi2) * cplx(proj.g22, 0.0);
}

/// Ratio of the intra-pair overlap condition; +inf when vacuous (no
/// u1-component interference, or the trig factor vanishes).
double overlap_ratio(const BeamParams& p, double lambda2) {
    if (p.delta1 == 0.0) return kInf;
    const double trig = std::cos(p.tau1) - std::sin(p.tau1);
    if (std::abs(trig) <= kTrigZeroTol) return kInf;
    return std::abs(p.rho1 / (p.delta1 * trig * lambda2));
}

}  // namespace

double composite_gain_s1(const BeamParams& p, const BasisProjections& proj) {
    return p.rho1 * proj.g21_mag + p.rho2 * proj.g22;
}

double composite_gain_s2(const BeamParams& p, const BasisProjections& proj) {
    return std::abs(delta_combination(p, proj));
}

ConstraintContext ConstraintContext::from_modulation(const ModulationSpec& mods) {
    ConstraintContext ctx;
    const double sqrt_m2 = std::sqrt(static_cast<double>(mods.m2));
    ctx.lambda2 = sqrt_m2 - 1.0;
    ctx.y1 = (static_cast<double>(mods.m1) - 1.0) / (static_cast<double>(mods.m2) - 1.0) *
             (sqrt_m2 - 1.0) * (sqrt_m2 - 1.0);
    return ctx;
}

BeamPair assemble_beamformers(const BeamParams& p, const OrthonormalBasis& b,
                              const BasisProjections& proj) {
    const double theta1 = p.phi1 - p.tau1;
    const double theta2 = theta1 + proj.g21_angle;
    const cplx a1 = p.rho1 * std::polar(1.0, theta1);
    const cplx a2 = p.rho2 * std::polar(1.0, theta2);
    const cplx c1 = p.delta1 * std::polar(1.0, p.phi1);
    const cplx c2 = p.delta2 * std::polar(1.0, p.phi2);

    BeamPair pair;
    pair.w1.resize(b.u1.size());
    pair.w2.resize(b.u1.size());
    for (std::size_t i = 0; i < b.u1.size(); ++i) {
        pair.w1[i] = a1 * b.u1[i] + a2 * b.u2[i];
        pair.w2[i] = c1 * b.u1[i] + c2 * b.u2[i];
    }
    return pair;
}

RecoveredParams params_from_vectors(const cvec& w1, const cvec& w2,
                                    const OrthonormalBasis& b,
                                    const BasisProjections& proj) {
    const cplx p1 = inner(b.u1, w1), p2 = inner(b.u2, w1);
    const cplx q1 = inner(b.u1, w2), q2 = inner(b.u2, w2);

    for (const auto* w : {&w1, &w2}) {
        const cplx a = (w == &w1) ? p1 : q1;
        const cplx c = (w == &w1) ? p2 : q2;
        double res2 = 0.0;
        for (std::size_t i = 0; i < w->size(); ++i) {
            res2 += std::norm((*w)[i] - a * b.u1[i] - c * b.u2[i]);
        }
        if (std::sqrt(res2) > 1e-9 * vec_norm(*w)) {
            throw std::runtime_error("params_from_vectors: vector has a component outside span{u1,u2}");
        }
    }

    RecoveredParams r;
    r.params.rho1 = std::abs(p1);
    r.params.rho2 = std::abs(p2);
    r.params.delta1 = std::abs(q1);
    r.params.delta2 = std::abs(q2);
    const double theta1 = r.params.rho1 > 0.0 ? std::arg(p1) : 0.0;
    r.params.phi1 = r.params.delta1 > 0.0 ? wrap_angle(std::arg(q1)) : 0.0;
    r.params.phi2 = r.params.delta2 > 0.0 ? wrap_angle(std::arg(q2)) : 0.0;
    r.params.tau1 = wrap_angle(r.params.phi1 - theta1);

    // s1/s2 coefficients at the strong user, reachable through the projections
    // since both channels live in span{u1, u2}.
    const cplx c_s1 = proj.g21() * p1 + cplx(proj.g22, 0.0) * p2;
    const cplx c_s2 = proj.g21() * q1 + cplx(proj.g22, 0.0) * q2;
    const cplx corrected = c_s1 * std::polar(1.0, -std::arg(c_s2));
    const double scale = proj.h2_norm() * std::max(vec_norm(w1), 1e-300);
    r.alignment_flag = std::abs(corrected.imag()) <= 1e-9 * scale &&
                       corrected.real() >= -1e-9 * scale;
    return r;
}

BeamPair mrt_pair(const cvec& h1, const cvec& h2, std::pair<double, double> power_split) {
    const double n1 = vec_norm(h1), n2 = vec_norm(h2);
    if (!(n1 > 0.0) || !(n2 > 0.0)) throw std::runtime_error("mrt_pair: zero channel");
    BeamPair pair;
    pair.w1.resize(h1.size());
    pair.w2.resize(h2.size());
    const double s1 = std::sqrt(power_split.first) / n1;
    const double s2 = std::sqrt(power_split.second) / n2;
    for (std::size_t i = 0; i < h1.size(); ++i) {
        pair.w1[i] = s1 * h1[i];
        pair.w2[i] = s2 * h2[i];
    }
    return pair;
}

BeamPair zfbf_pair(const cvec& h1, const cvec& h2, std::pair<double, double> power_split) {
    const double n1 = vec_norm(h1), n2 = vec_norm(h2);
    if (!(n1 > 0.0) || !(n2 > 0.0)) throw std::runtime_error("zfbf_pair: zero channel");

    auto reject = [](const cvec& target, const cvec& other) {
        const cplx c = inner(other, target) / cplx(norm2(other), 0.0);
        cvec r(target.size());
        for (std::size_t i = 0; i < target.size(); ++i) r[i] = target[i] - c * other[i];
        return r;
    };

    cvec r1 = reject(h1, h2);
    cvec r2 = reject(h2, h1);
    const double rn1 = vec_norm(r1), rn2 = vec_norm(r2);
    if (rn1 < 1e-14 * n1 || rn2 < 1e-14 * n2) {
        throw std::runtime_error("zfbf_pair: channels are parallel");
    }

    BeamPair pair;
    pair.w1.resize(h1.size());
    pair.w2.resize(h2.size());
    const double s1 = std::sqrt(power_split.first) / rn1;
    const double s2 = std::sqrt(power_split.second) / rn2;
    for (std::size_t i = 0; i < h1.size(); ++i) {
        pair.w1[i] = s1 * r1[i];
        pair.w2[i] = s2 * r2[i];
    }
    return pair;
}

FeasibilityReport check_constraints(const BeamParams& p, const BasisProjections& proj,
                                    const ConstraintContext& ctx) {
    FeasibilityReport rep;
    const double threshold = ctx.y1 * (1.0 + ctx.strict_margin);

    rep.overlap_ratio = overlap_ratio(p, ctx.lambda2);
    rep.overlap_ok = rep.overlap_ratio >= threshold;

    const double z = std::abs(delta_combination(p, proj));
    // A zero s2 component is a throughput concern, not a SIC-ordering
    // violation; report it as satisfied with infinite margin.
    rep.sic_gain_ratio = z > 0.0 ? composite_gain_s1(p, proj) / z : kInf;
    rep.sic_gain_ok = rep.sic_gain_ratio >= threshold;

    rep.amplitude_sum_squares = p.amplitude_sum_squares();
    rep.power_budget_ok = rep.amplitude_sum_squares <= 1.0 + 1e-12;
    return rep;
}

BeamParams repair_params(const BeamParams& raw, const BasisProjections& proj,
                         const ConstraintContext& ctx, const RepairConfig& cfg) {
    BeamParams p = raw;
    p.tau1 = wrap_angle(p.tau1);
    p.phi1 = wrap_angle(p.phi1);
    p.phi2 = wrap_angle(p.phi2);

    if (p.rho1 <= 0.0) p.rho1 = cfg.rho_defaults[0];
    if (p.rho2 <= 0.0) p.rho2 = cfg.rho_defaults[1];
    if (p.delta1 <= 0.0) p.delta1 = cfg.delta_defaults[0];
    if (p.delta2 <= 0.0) p.delta2 = cfg.delta_defaults[1];

    auto rescale_to_budget = [&p]() {
        const double s = p.amplitude_sum_squares();
        if (s > 1.0) {
            const double inv = 1.0 / std::sqrt(s);
            p.rho1 *= inv;
            p.rho2 *= inv;
            p.delta1 *= inv;
            p.delta2 *= inv;
        }
    };
    rescale_to_budget();

    if (std::abs(std::cos(p.tau1) - std::sin(p.tau1)) <= kTrigZeroTol) {
        p.tau1 = wrap_angle(p.tau1 + cfg.kappa1);
    }

    const double threshold = ctx.y1 * (1.0 + ctx.strict_margin);

    // Both shrink loops divide by a constant factor per pass, so the number
    // of passes has a closed form. Fast-forward, then run the literal loop to
    // absorb rounding; small amplitudes would otherwise need millions of
    // passes and trip the guard.
    auto fast_forward = [](double current, double target, double factor) {
        if (!(current > target) || !(factor > 1.0)) return 1.0;
        const double n = std::ceil(std::log(current / target) / std::log1p(factor - 1.0));
        return std::exp(-n * std::log1p(factor - 1.0));
    };

    if (overlap_ratio(p, ctx.lambda2) < threshold) {
        const double trig = std::abs(std::cos(p.tau1) - std::sin(p.tau1));
        const double delta1_max = p.rho1 / (threshold * trig * ctx.lambda2);
        p.delta1 *= fast_forward(p.delta1, delta1_max, p.rho1 + 1.0);
    }
    int guard = 0;
    while (overlap_ratio(p, ctx.lambda2) < threshold) {
        p.delta1 /= p.rho1 + 1.0;
        if (++guard > kRepairLoopCap) throw std::runtime_error("repair_params: overlap loop did not terminate");
    }

    if (std::abs(delta_combination(p, proj)) == 0.0) p.delta2 += cfg.kappa2;

    {
        const double z = std::abs(delta_combination(p, proj));
        const double g1 = composite_gain_s1(p, proj);
        if (z > 0.0 && g1 / z < threshold) {
            const double scale = fast_forward(z, g1 / threshold, p.rho1 + p.rho2 + 1.0);
            p.delta1 *= scale;
            p.delta2 *= scale;
        }
    }
    guard = 0;
    while (true) {
        const double z = std::abs(delta_combination(p, proj));
        if (z == 0.0 || composite_gain_s1(p, proj) / z >= threshold) break;
        const double shrink = p.rho1 + p.rho2 + 1.0;
        p.delta1 /= shrink;
        p.delta2 /= shrink;
        if (++guard > kRepairLoopCap) throw std::runtime_error("repair_params: SIC gain loop did not terminate");
    }

    rescale_to_budget();
    return p;
}

double aligned_tau1(const BeamParams& p, const BasisProjections& proj) {
    // Relative phase of w2's two components as seen through h2, measured
    // against the coherently combined s1 phase.
    const double psi = wrap_angle(p.phi1 + proj.g21_angle - p.phi2);
    const cplx combo = p.delta1 * proj.g21_mag * std::polar(1.0, psi) + cplx(p.delta2 * proj.g22, 0.0);
    const double chi = std::abs(combo) > 0.0 ? std::arg(combo) : 0.0;
    return wrap_angle(psi - chi);
}

BeamParams aligned_random_params(const BasisProjections& proj, Rng& rng) {
    BeamParams p;
    p.rho1 = rng.uniform();
    p.rho2 = rng.uniform();
    p.delta1 = rng.uniform();
    p.delta2 = rng.uniform();
    const double s = p.amplitude_sum_squares();
    if (s > 1.0) {
        const double inv = 1.0 / std::sqrt(s);
        p.rho1 *= inv;
        p.rho2 *= inv;
        p.delta1 *= inv;
        p.delta2 *= inv;
    }
    p.phi1 = rng.uniform(0.0, kTwoPi);
    p.phi2 = rng.uniform(0.0, kTwoPi);
    p.tau1 = aligned_tau1(p, proj);
    return p;
}

}  // namespace nomabf
