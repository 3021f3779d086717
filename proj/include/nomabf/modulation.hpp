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

namespace nomabf {

/// Square-QAM orders for the user pair, with the Gray-coding convention
/// assumed throughout. E_n = (2/3)(M_n - 1) normalizes the mean symbol
/// energy to one.
struct ModulationSpec {
    int m1 = 4;
    int m2 = 4;
    double e1 = 2.0;
    double e2 = 2.0;
    int bits1 = 2;  // log2(M1)
    int bits2 = 2;

    /// Throws std::invalid_argument unless both orders are square QAM in {4, 16, 64}.
    static ModulationSpec make(int m1, int m2);

    /// True when the closed-form error expressions have been checked against
    /// the symbol-level simulator for this order pair. Only (4,4) so far;
    /// higher orders stay locked out of the analytic path until then.
    bool validated_pair() const { return m1 == 4 && m2 == 4; }
};

}  // namespace nomabf
