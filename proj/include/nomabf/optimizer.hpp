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
#include <vector>

#include "nomabf/ber.hpp"

namespace nomabf {

struct CoConfig {
    int n_starts = 20;
    int max_iterations = 200;  // simplex iterations per penalty round
    std::array<double, 2> penalty_weights{1e2, 1e4};
    double tolerance = 1e-12;  // objective spread at which a round stops
    std::uint64_t seed = 0;
};

struct StartTrace {
    int start_index = 0;
    double psi = 0.0;
    bool feasible = false;
    bool iteration_capped = false;
};

struct CoSolution {
    BeamParams params;
    double psi_value = 0.0;
    std::vector<StartTrace> trace;
};

/// max-BER objective plus mu * sum of squared normalized constraint
/// violations (relative shortfall of the two SIC ratios, power-budget excess).
/// Feasible parameters give exactly the objective.
double penalized_objective(const BeamParams& p, const BasisProjections& proj,
                           const ModulationSpec& mods, double n0_eff, double mu);

struct LocalSearchResult {
    BeamParams params;  // repaired, always feasible
    double psi = 0.0;
    bool iteration_capped = false;
};

/// Derivative-free simplex descent of the penalized objective over the box
/// [0,1]^4 x [0,2pi)^3 (angles wrapped, amplitudes clamped), with penalty
/// continuation, finished by the feasibility repair. Deterministic.
LocalSearchResult local_search(const BeamParams& start, const BasisProjections& proj,
                               const ModulationSpec& mods, double n0_eff,
                               const CoConfig& cfg);

/// Multi-start search; starts are drawn from per-index substreams so a run
/// with more starts extends (never reshuffles) a run with fewer.
CoSolution co_solve(const BasisProjections& proj, const ModulationSpec& mods,
                    double n0_eff, const CoConfig& cfg);

}  // namespace nomabf
