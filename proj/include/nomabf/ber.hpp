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

#include "nomabf/beamformer.hpp"
#include "nomabf/channel.hpp"
#include "nomabf/modulation.hpp"

namespace nomabf {

struct BerPair {
    double pe1 = 0.0;
    double pe2 = 0.0;
    double psi = 0.0;  // max of the two
};

/// Gaussian tail probability Q(x) = P(Z > x).
double q_function(double x);

/// The fairness objective: max of the two error rates.
double psi(double pe1, double pe2);

/// Weak-user conditional BER from the decision-statistic quantities:
/// a1 = |h1^H w1|, b1 = |h1^H w2|, tau1 the phase gap between them. Per-bit
/// error terms are summed over the interfering constellation.
double ber_user1_gains(double a1, double b1, double tau1, const ModulationSpec& mods,
                       double n0_eff);

/// Strong-user conditional BER under the aligned detection model, from the
/// composite gains gain_s1 = |h2^H w1| and gain_s2 = |h2^H w2|. Covers both
/// SIC error propagation branches.
double ber_user2_gains(double gain_s1, double gain_s2, const ModulationSpec& mods,
                       double n0_eff);

/// Parameter-level wrappers. The weak user depends on the parameters only
/// through (rho1, delta1, tau1); the strong user through the composite gains.
double ber_user1(const BeamParams& p, const BasisProjections& proj,
                 const ModulationSpec& mods, double n0_eff);
double ber_user2(const BeamParams& p, const BasisProjections& proj,
                 const ModulationSpec& mods, double n0_eff);

/// Both users plus the objective in one call.
BerPair ber_pair(const BeamParams& p, const BasisProjections& proj,
                 const ModulationSpec& mods, double n0_eff);

/// Hand-specialized 4-QAM expressions (independent of the general sums; the
/// two routes are cross-checked in the tests).
BerPair ber_4qam_appendix(const BeamParams& p, const BasisProjections& proj,
                          double n0_eff);

/// Checked variant: throws std::invalid_argument unless M1 = M2 = 4.
BerPair ber_4qam_appendix(const BeamParams& p, const BasisProjections& proj,
                          const ModulationSpec& mods, double n0_eff);

}  // namespace nomabf
