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

#include "nomabf/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nomabf {

namespace {

using Point = std::array<double, 7>;

/// Amplitudes are folded (reflected) into [0,1] rather than clamped: a clamp
/// parks coordinates exactly on 0 where the repair's default replacement
/// kicks in, walling off the delta -> 0+ boundary that interference-nulling
/// solutions live on. Angles are periodic and simply wrapped.
Point boxed(const Point& x) {
    Point b = x;
    for (int i = 0; i < 4; ++i) {
        double t = std::fmod(b[i], 2.0);
        if (t < 0.0) t += 2.0;
        b[i] = t <= 1.0 ? t : 2.0 - t;
    }
    for (int i = 4; i < 7; ++i) b[i] = wrap_angle(b[i]);
    return b;
}

struct Objective {
    const BasisProjections& proj;
    const ModulationSpec& mods;
    double n0_eff;
    double mu;

    double operator()(const Point& x) const {
        return penalized_objective(BeamParams::from_array(boxed(x)), proj, mods, n0_eff, mu);
    }
};

/// One Nelder-Mead run (reflection/expansion/contraction/shrink with the
/// standard coefficients). Returns the best vertex.
template <typename F>
Point nelder_mead(const F& f, const Point& x0, int max_iters, double spread_tol,
                  bool* capped) {
    constexpr int n = 7;
    constexpr double alpha = 1.0, gamma = 2.0, beta = 0.5, sigma = 0.5;

    std::array<Point, n + 1> xs;
    std::array<double, n + 1> fs;
    xs[0] = x0;
    for (int i = 0; i < n; ++i) {
        Point p = x0;
        const double step = i < 4 ? 0.15 : 0.5;
        p[i] += (i < 4 && p[i] + step > 1.0) ? -step : step;
        xs[i + 1] = p;
    }
    for (int i = 0; i <= n; ++i) fs[i] = f(xs[i]);

    std::array<int, n + 1> order;
    *capped = true;
    for (int iter = 0; iter < max_iters; ++iter) {
        for (int i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        const int best = order[0], second_worst = order[n - 1], worst = order[n];

        if (fs[worst] - fs[best] < spread_tol) {
            *capped = false;
            break;
        }

        Point centroid{};
        for (int i = 0; i < n; ++i) {
            for (int d = 0; d < n; ++d) centroid[d] += xs[order[i]][d] / n;
        }
        auto along = [&](double t) {
            Point p;
            for (int d = 0; d < n; ++d) p[d] = centroid[d] + t * (centroid[d] - xs[worst][d]);
            return p;
        };

        const Point xr = along(alpha);
        const double fr = f(xr);
        if (fr < fs[best]) {
            const Point xe = along(gamma);
            const double fe = f(xe);
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr < fs[second_worst]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            const bool outside = fr < fs[worst];
            const Point xc = along(outside ? beta : -beta);
            const double fc = f(xc);
            if (fc < (outside ? fr : fs[worst])) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    const int idx = order[i];
                    for (int d = 0; d < n; ++d) {
                        xs[idx][d] = xs[best][d] + sigma * (xs[idx][d] - xs[best][d]);
                    }
                    fs[idx] = f(xs[idx]);
                }
            }
        }
    }

    int best = 0;
    for (int i = 1; i <= n; ++i) {
        if (fs[i] < fs[best]) best = i;
    }
    return xs[best];
}

}  // namespace

double penalized_objective(const BeamParams& p, const BasisProjections& proj,
                           const ModulationSpec& mods, double n0_eff, double mu) {
    if (mu < 0.0) throw std::domain_error("penalized_objective: mu must be non-negative");
    const double base = ber_pair(p, proj, mods, n0_eff).psi;
    if (mu == 0.0) return base;

    const ConstraintContext ctx = ConstraintContext::from_modulation(mods);
    const FeasibilityReport rep = check_constraints(p, proj, ctx);

    auto shortfall = [&](double ratio) {
        if (std::isinf(ratio)) return 0.0;
        return std::max(0.0, (ctx.y1 - ratio) / ctx.y1);
    };
    const double v27 = shortfall(rep.overlap_ratio);
    const double v28 = shortfall(rep.sic_gain_ratio);
    const double v29 = std::max(0.0, rep.amplitude_sum_squares - 1.0);
    return base + mu * (v27 * v27 + v28 * v28 + v29 * v29);
}

LocalSearchResult local_search(const BeamParams& start, const BasisProjections& proj,
                               const ModulationSpec& mods, double n0_eff,
                               const CoConfig& cfg) {
    const ConstraintContext ctx = ConstraintContext::from_modulation(mods);
    const RepairConfig repair_cfg;

    LocalSearchResult best;
    best.psi = std::numeric_limits<double>::infinity();
    auto consider = [&](const Point& candidate) {
        const BeamParams repaired =
            repair_params(BeamParams::from_array(boxed(candidate)), proj, ctx, repair_cfg);
        const double value = ber_pair(repaired, proj, mods, n0_eff).psi;
        if (value < best.psi) {
            best.psi = value;
            best.params = repaired;
        }
    };

    consider(start.as_array());

    Point x = start.as_array();
    best.iteration_capped = false;
    for (double mu : cfg.penalty_weights) {
        bool capped = false;
        x = nelder_mead(Objective{proj, mods, n0_eff, mu}, x, cfg.max_iterations,
                        cfg.tolerance, &capped);
        best.iteration_capped = best.iteration_capped || capped;
        consider(x);
    }
    return best;
}

CoSolution co_solve(const BasisProjections& proj, const ModulationSpec& mods,
                    double n0_eff, const CoConfig& cfg) {
    if (cfg.n_starts < 1) throw std::domain_error("co_solve: need at least one start");

    CoSolution sol;
    sol.psi_value = std::numeric_limits<double>::infinity();
    const ConstraintContext ctx = ConstraintContext::from_modulation(mods);

    for (int k = 0; k < cfg.n_starts; ++k) {
        Rng rng = Rng::stream(cfg.seed, 0xc0, static_cast<std::uint64_t>(k));
        BeamParams start;
        start.rho1 = rng.uniform();
        start.rho2 = rng.uniform();
        start.delta1 = rng.uniform();
        start.delta2 = rng.uniform();
        const double s = start.amplitude_sum_squares();
        if (s > 1.0) {
            const double inv = 1.0 / std::sqrt(s);
            start.rho1 *= inv;
            start.rho2 *= inv;
            start.delta1 *= inv;
            start.delta2 *= inv;
        }
        start.tau1 = rng.uniform(0.0, kTwoPi);
        start.phi1 = rng.uniform(0.0, kTwoPi);
        start.phi2 = rng.uniform(0.0, kTwoPi);

        const LocalSearchResult r = local_search(start, proj, mods, n0_eff, cfg);
        const bool feasible = check_constraints(r.params, proj, ctx).all_ok();
        sol.trace.push_back({k, r.psi, feasible, r.iteration_capped});
        if (feasible && r.psi < sol.psi_value) {
            sol.psi_value = r.psi;
            sol.params = r.params;
        }
    }
    if (!std::isfinite(sol.psi_value)) {
        throw std::runtime_error("co_solve: no feasible start (repair should make this impossible)");
    }

    // Gauge fix: every objective and constraint depends on (phi1, phi2) only
    // through their difference, so solutions from different starts land on
    // arbitrary representatives of the same orbit. Rotate to phi2 = 0 to make
    // the label map single-valued for the learner.
    sol.params.phi1 = wrap_angle(sol.params.phi1 - sol.params.phi2);
    sol.params.phi2 = 0.0;
    return sol;
}

}  // namespace nomabf
