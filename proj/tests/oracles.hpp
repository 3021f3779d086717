// Test-only numerical oracles, kept independent of the library's
// implementation paths.
#pragma once

#include <array>
#include <cmath>

namespace oracles {

/// Gaussian tail probability by composite 20-point Gauss-Legendre quadrature
/// over [x, x+45]. Double-precision limited (~1e-15 relative), no erfc.
inline double q_reference(double x) {
    // 20-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; the
    // rule is symmetric).
    static const std::array<double, 10> nodes = {
        0.0765265211334973, 0.2277858511416451, 0.3737060887154195, 0.5108670019508271,
        0.6360536807265150, 0.7463319064601508, 0.8391169718222188, 0.9122344282513259,
        0.9639719272779138, 0.9931285991850949};
    static const std::array<double, 10> weights = {
        0.1527533871307258, 0.1491729864726037, 0.1420961093183820, 0.1316886384491766,
        0.1181945319615184, 0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
        0.0406014298003869, 0.0176140071391521};

    const double inv_sqrt_2pi = 0.3989422804014326779399461;
    auto phi = [&](double t) { return inv_sqrt_2pi * std::exp(-0.5 * t * t); };

    const double panel = 0.5;
    const int n_panels = 90;  // spans 45 sigma past x; the remainder underflows
    double total = 0.0;
    for (int p = 0; p < n_panels; ++p) {
        const double a = x + p * panel;
        const double b = a + panel;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double acc = 0.0;
        for (int i = 0; i < 10; ++i) {
            acc += weights[i] * (phi(mid + half * nodes[i]) + phi(mid - half * nodes[i]));
        }
        total += half * acc;
    }
    return total;
}

}  // namespace oracles
