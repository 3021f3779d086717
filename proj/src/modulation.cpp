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

#include "nomabf/modulation.hpp"

#include <stdexcept>
#include <string>

namespace nomabf {

namespace {

int bits_for_order(int m) {
    if (m != 4 && m != 16 && m != 64) {
        throw std::invalid_argument("ModulationSpec: order " + std::to_string(m) +
                                    " is not a supported square QAM (4, 16, 64)");
    }
    int bits = 0;
    for (int v = m; v > 1; v >>= 1) ++bits;
    return bits;
}

}  // namespace

ModulationSpec ModulationSpec::make(int m1, int m2) {
    ModulationSpec s;
    s.bits1 = bits_for_order(m1);
    s.bits2 = bits_for_order(m2);
    s.m1 = m1;
    s.m2 = m2;
    s.e1 = 2.0 / 3.0 * (m1 - 1);
    s.e2 = 2.0 / 3.0 * (m2 - 1);
    return s;
}

}  // namespace nomabf
