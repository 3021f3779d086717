#include <doctest.h>

#include <cmath>

#include "nomabf/optimizer.hpp"
#include "nomabf/rng.hpp"

using namespace nomabf;

namespace {

const ModulationSpec kQpsk = ModulationSpec::make(4, 4);
const ConstraintContext kCtx = ConstraintContext::from_modulation(kQpsk);

struct Fixture {
    Scenario sc;
    OrthonormalBasis basis;
    BasisProjections proj;
};

Fixture random_fixture(int nt, std::uint64_t seed) {
    Fixture f;
    f.sc = sample_scenario(nt, {600, 650}, {350, 400}, LinkBudget{}, seed);
    f.basis = build_basis(f.sc);
    f.proj = project_channels(f.sc, f.basis);
    return f;
}

const double kNoise = LinkBudget{}.effective_noise_watt();

BeamParams feasible_start(const BasisProjections& proj, Rng& rng) {
    BeamParams p;
    p.rho1 = rng.uniform(0.1, 0.9);
    p.rho2 = rng.uniform(0.1, 0.9);
    p.delta1 = rng.uniform(0.1, 0.9);
    p.delta2 = rng.uniform(0.1, 0.9);
    p.tau1 = rng.uniform(0.0, kTwoPi);
    p.phi1 = rng.uniform(0.0, kTwoPi);
    p.phi2 = rng.uniform(0.0, kTwoPi);
    return repair_params(p, proj, kCtx, RepairConfig{});
}

}  // namespace

TEST_CASE("penalized objective: exact on feasible points, quadratic outside") {
    const Fixture f = random_fixture(2, 7);
    Rng rng(1);
    const BeamParams p = feasible_start(f.proj, rng);
    const double base = ber_pair(p, f.proj, kQpsk, kNoise).psi;
    CHECK(penalized_objective(p, f.proj, kQpsk, kNoise, 100.0) == base);
    CHECK(penalized_objective(p, f.proj, kQpsk, kNoise, 0.0) == base);

    BeamParams heavy = p;  // push the power budget to S = 1.21
    const double scale = std::sqrt(1.21 / heavy.amplitude_sum_squares());
    heavy.rho1 *= scale;
    heavy.rho2 *= scale;
    heavy.delta1 *= scale;
    heavy.delta2 *= scale;
    const double value = penalized_objective(heavy, f.proj, kQpsk, kNoise, 10.0);
    const double plain = ber_pair(heavy, f.proj, kQpsk, kNoise).psi;
    // Other constraints stay satisfied under a uniform amplitude scale.
    CHECK(value - plain == doctest::Approx(10.0 * 0.21 * 0.21).epsilon(1e-9));

    CHECK_THROWS_AS(penalized_objective(p, f.proj, kQpsk, kNoise, -1.0), std::domain_error);
}

TEST_CASE("local search descends from feasible starts and is deterministic") {
    Rng rng(9);
    CoConfig cfg;
    cfg.max_iterations = 120;
    for (int trial = 0; trial < 10; ++trial) {
        const Fixture f = random_fixture(2 + trial % 4, 40 + trial);
        const BeamParams start = feasible_start(f.proj, rng);
        const double start_psi = ber_pair(start, f.proj, kQpsk, kNoise).psi;
        const LocalSearchResult r = local_search(start, f.proj, kQpsk, kNoise, cfg);
        CHECK(r.psi <= start_psi + 1e-12);
        CHECK(check_constraints(r.params, f.proj, kCtx).all_ok());

        const LocalSearchResult again = local_search(start, f.proj, kQpsk, kNoise, cfg);
        CHECK(r.psi == again.psi);
        CHECK(r.params.rho1 == again.params.rho1);
        CHECK(r.params.tau1 == again.params.tau1);
    }
}

TEST_CASE("local search copes with an orthogonal-channel degenerate scenario") {
    Scenario sc;
    sc.nt = 2;
    sc.h1 = {{1e-6, 0}, {0, 0}};
    sc.h2 = {{0, 0}, {2e-6, 0}};
    sc.beta1 = sc.beta2 = 1.0;
    const OrthonormalBasis basis = build_basis(sc);
    const BasisProjections proj = project_channels(sc, basis);
    CHECK(proj.g21_mag == 0.0);

    Rng rng(2);
    const BeamParams start = feasible_start(proj, rng);
    CoConfig cfg;
    cfg.max_iterations = 100;
    const LocalSearchResult r = local_search(start, proj, kQpsk, kNoise, cfg);
    CHECK(check_constraints(r.params, proj, kCtx).all_ok());
    CHECK(std::isfinite(r.psi));
}

TEST_CASE("multi-start: nested monotonicity, feasibility, objective consistency") {
    for (int trial = 0; trial < 12; ++trial) {
        const Fixture f = random_fixture(2, 600 + trial);
        CoConfig one;
        one.n_starts = 1;
        one.max_iterations = 80;
        one.seed = 99;
        CoConfig twenty = one;
        twenty.n_starts = 20;

        const CoSolution s1 = co_solve(f.proj, kQpsk, kNoise, one);
        const CoSolution s20 = co_solve(f.proj, kQpsk, kNoise, twenty);
        CHECK(s20.psi_value <= s1.psi_value);
        CHECK(s20.trace.size() == 20);
        CHECK(s20.trace[0].psi == s1.trace[0].psi);  // same start stream per index

        CHECK(check_constraints(s20.params, f.proj, kCtx).all_ok());
        const double re_eval = ber_pair(s20.params, f.proj, kQpsk, kNoise).psi;
        CHECK(std::abs(s20.psi_value - re_eval) <= 1e-12);
        for (const StartTrace& t : s20.trace) CHECK(t.feasible);
    }
}

TEST_CASE("solver beats zero forcing on most scenarios") {
    // Zero forcing's exact interference null at the strong user is not
    // expressible in the reduced parameter space (the coherent-phase
    // convention keeps the s1 gain positive), so on draws whose geometry
    // favors the null the solver legitimately concedes; measured ~13% at
    // this budget. This test pins the regression floor; the acceptance
    // suite reports the full comparison.
    CoConfig cfg;
    cfg.n_starts = 20;
    cfg.max_iterations = 150;
    cfg.seed = 1234;

    int wins = 0;
    const int n = 60;
    for (int trial = 0; trial < n; ++trial) {
        const Fixture f = random_fixture(2, 3000 + trial);
        const CoSolution sol = co_solve(f.proj, kQpsk, kNoise, cfg);

        const BeamPair z = zfbf_pair(f.sc.h1, f.sc.h2);
        const RecoveredParams rec = params_from_vectors(z.w1, z.w2, f.basis, f.proj);
        const double zf_pe1 = ber_user1(rec.params, f.proj, kQpsk, kNoise);
        const double zf_pe2 = ber_user2_gains(std::abs(inner(f.sc.h2, z.w1)),
                                              std::abs(inner(f.sc.h2, z.w2)), kQpsk, kNoise);
        if (sol.psi_value <= psi(zf_pe1, zf_pe2) + 1e-15) ++wins;
    }
    CHECK(wins >= static_cast<int>(0.8 * n));
}
