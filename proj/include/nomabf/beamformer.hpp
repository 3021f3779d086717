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
#include <utility>

#include "nomabf/channel.hpp"
#include "nomabf/modulation.hpp"
#include "nomabf/rng.hpp"

namespace nomabf {

/// The 7-tuple that parameterizes both beamformers in the 2-D basis:
/// amplitudes (rho1, rho2) for w1 and (delta1, delta2) for w2, the phase gap
/// tau1 seen by the weak user, and w2's component phases (phi1, phi2).
struct BeamParams {
    double rho1 = 0.0;
    double rho2 = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double tau1 = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;

    double amplitude_sum_squares() const {
        return rho1 * rho1 + rho2 * rho2 + delta1 * delta1 + delta2 * delta2;
    }

    std::array<double, 7> as_array() const {
        return {rho1, rho2, delta1, delta2, tau1, phi1, phi2};
    }
    static BeamParams from_array(const std::array<double, 7>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
    }
};

struct BeamPair {
    cvec w1, w2;
};

/// Fallback amplitudes and nudge constants for the post-prediction repair.
struct RepairConfig {
    std::array<double, 2> rho_defaults{0.5, 0.5};
    std::array<double, 2> delta_defaults{0.5, 0.5};
    double kappa1 = 1e-5;
    double kappa2 = 1e-5;
};

/// Thresholds of the SIC reliability constraints:
/// Y1 = (M1-1)/(M2-1) * (sqrt(M2)-1)^2 and Lambda2 = sqrt(M2)-1.
struct ConstraintContext {
    double y1 = 1.0;
    double lambda2 = 1.0;
    double strict_margin = 1e-9;  // strict ">" realized as ratio >= Y1*(1+margin)

    static ConstraintContext from_modulation(const ModulationSpec& mods);
};

struct FeasibilityReport {
    bool overlap_ok = false;       // |rho1 / (delta1*(cos tau1 - sin tau1)*Lambda2)| > Y1
    bool sic_gain_ok = false;      // (rho1*|g21| + rho2*g22) / |delta-combination| > Y1
    bool power_budget_ok = false;  // sum of squared amplitudes <= 1
    double overlap_ratio = 0.0;    // +inf when the constraint is vacuous
    double sic_gain_ratio = 0.0;
    double amplitude_sum_squares = 0.0;

    bool all_ok() const { return overlap_ok && sic_gain_ok && power_budget_ok; }
};

/// Full transmit vectors from the reduced parameters:
///   w2 = delta1*e^{j phi1} u1 + delta2*e^{j phi2} u2,
///   w1 = rho1*e^{j theta1} u1 + rho2*e^{j theta2} u2
/// with theta1 = phi1 - tau1 and theta2 = theta1 + angle(h2^H u1), so w1's
/// components add coherently at the strong user.
BeamPair assemble_beamformers(const BeamParams& p, const OrthonormalBasis& b,
                              const BasisProjections& proj);

struct RecoveredParams {
    BeamParams params;
    /// True when the strong user's s1 coefficient, phase-corrected by the s2
    /// coefficient's angle, is real and non-negative (a zero coefficient
    /// counts). Only then is the closed-form strong-user BER exact.
    bool alignment_flag = false;
};

/// Inverse of assemble_beamformers for pairs lying in span{u1, u2}
/// (tolerance 1e-9 relative). Throws std::runtime_error otherwise.
RecoveredParams params_from_vectors(const cvec& w1, const cvec& w2,
                                    const OrthonormalBasis& b,
                                    const BasisProjections& proj);

/// w_k = sqrt(split_k) * h_k / ||h_k||. Throws on a zero channel.
BeamPair mrt_pair(const cvec& h1, const cvec& h2,
                  std::pair<double, double> power_split = {0.5, 0.5});

/// w1 orthogonal to h2 and w2 orthogonal to h1, scaled by sqrt(split_k).
/// Throws on (numerically) parallel channels.
BeamPair zfbf_pair(const cvec& h1, const cvec& h2,
                   std::pair<double, double> power_split = {0.5, 0.5});

/// Reports the three feasibility conditions; never throws.
FeasibilityReport check_constraints(const BeamParams& p, const BasisProjections& proj,
                                    const ConstraintContext& ctx);

/// Post-prediction repair: default out non-positive amplitudes, rescale to the
/// power budget, nudge tau1 off the degenerate direction, then shrink the
/// delta amplitudes until both SIC constraints hold. Angles are wrapped to
/// [0, 2*pi). The result always passes check_constraints.
BeamParams repair_params(const BeamParams& raw, const BasisProjections& proj,
                         const ConstraintContext& ctx, const RepairConfig& cfg);

/// Coherent s1 gain at the strong user: rho1*|h2^H u1| + rho2*|h2^H u2|.
double composite_gain_s1(const BeamParams& p, const BasisProjections& proj);

/// |delta1*e^{j phi1} h2^H u1 + delta2*e^{j phi2} h2^H u2|.
double composite_gain_s2(const BeamParams& p, const BasisProjections& proj);

/// tau1 value for which the assembled pair realizes the aligned detection
/// model at the strong user exactly (s1 and s2 coefficients in phase).
double aligned_tau1(const BeamParams& p, const BasisProjections& proj);

/// Random parameters on the aligned manifold: amplitudes uniform (rescaled
/// into the power budget), phases uniform, tau1 derived via aligned_tau1.
BeamParams aligned_random_params(const BasisProjections& proj, Rng& rng);

}  // namespace nomabf
