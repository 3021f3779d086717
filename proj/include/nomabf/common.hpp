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

#include <cmath>
#include <complex>
#include <vector>

namespace nomabf {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;

/// Map an angle to [0, 2*pi).
inline double wrap_angle(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;  // fmod can land exactly on 2*pi after the add
    return w;
}

/// Hermitian inner product a^H b.
inline cplx inner(const cvec& a, const cvec& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm2(const cvec& a) {
    double s = 0.0;
    for (const auto& x : a) s += std::norm(x);
    return s;
}

inline double vec_norm(const cvec& a) { return std::sqrt(norm2(a)); }

}  // namespace nomabf
