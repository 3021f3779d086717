#include <doctest.h>

#include <cmath>

#include "nomabf/ber.hpp"
#include "nomabf/rng.hpp"
#include "oracles.hpp"

using namespace nomabf;

namespace {

const ModulationSpec kQpsk = ModulationSpec::make(4, 4);

BasisProjections unit_proj() {
    BasisProjections p;
    p.h1_norm = 1.0;
    p.g21_mag = 0.6;
    p.g21_angle = 0.9;
    p.g22 = 0.8;
    return p;
}

BasisProjections random_proj(Rng& rng) {
    BasisProjections p;
    p.h1_norm = rng.uniform(0.5e-6, 2.5e-6);
    const double h2 = rng.uniform(1.0e-6, 4.0e-6);
    const double frac = rng.uniform(0.05, 0.95);
    p.g21_mag = h2 * std::sqrt(frac);
    p.g22 = h2 * std::sqrt(1.0 - frac);
    p.g21_angle = rng.uniform(0.0, kTwoPi);
    return p;
}

BeamParams random_params(Rng& rng) {
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
    p.tau1 = rng.uniform(0.0, kTwoPi);
    p.phi1 = rng.uniform(0.0, kTwoPi);
    p.phi2 = rng.uniform(0.0, kTwoPi);
    return p;
}

}  // namespace

TEST_CASE("q function against the quadrature reference") {
    CHECK(q_function(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(q_function(1.2816) == doctest::Approx(0.1000).epsilon(1e-3));
    CHECK(std::abs(q_function(1.2816) - oracles::q_reference(1.2816)) < 1e-14);
    CHECK(std::abs(q_function(2.0) - 0.02275) < 1e-5);

    for (double x = -8.0; x <= 8.0 + 1e-9; x += 0.25) {
        const double ref = oracles::q_reference(x);
        CHECK(std::abs(q_function(x) - ref) <= 2e-12 * ref);
    }

    double prev = q_function(-8.0);
    for (double x = -7.9; x <= 8.0; x += 0.1) {
        const double cur = q_function(x);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("psi is the exact maximum") {
    CHECK(psi(1e-3, 2e-4) == 1e-3);
    CHECK(psi(0.37, 0.37) == 0.37);
    CHECK(psi(0.0, 0.5) == 0.5);
}

TEST_CASE("weak user BER, interference-free operating points") {
    const double n0 = 0.02;
    BeamParams p;
    p.rho1 = 2.0 * std::sqrt(n0);  // rho1*||h1||/sqrt(n0) = 2
    p.delta1 = 0.0;
    BasisProjections proj = unit_proj();
    proj.h1_norm = 1.0;
    CHECK(ber_user1(p, proj, kQpsk, n0) == doctest::Approx(0.02275).epsilon(5e-4));
    CHECK(std::abs(ber_user1(p, proj, kQpsk, n0) - oracles::q_reference(2.0)) < 1e-12);

    BeamParams zero;
    CHECK(ber_user1(zero, proj, kQpsk, n0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ber_user2(zero, proj, kQpsk, n0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("general theorem evaluation equals the 4-QAM specialization") {
    Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const BasisProjections proj = random_proj(rng);
        const BeamParams p = random_params(rng);
        const double n0 = std::pow(10.0, rng.uniform(-14.0, -11.0));
        const BerPair appendix = ber_4qam_appendix(p, proj, n0);
        const double pe1 = ber_user1(p, proj, kQpsk, n0);
        const double pe2 = ber_user2(p, proj, kQpsk, n0);
        CHECK(std::abs(pe1 - appendix.pe1) <= 1e-12);
        CHECK(std::abs(pe2 - appendix.pe2) <= 1e-12);
    }
}

TEST_CASE("appendix expressions: collapsed and limiting forms") {
    const double n0 = 1.3e-13;
    BasisProjections proj = unit_proj();
    proj.h1_norm = 1.2e-6;
    proj.g21_mag = 0.9e-6;
    proj.g22 = 1.4e-6;

    BeamParams p;
    p.rho1 = 0.6;
    p.delta1 = 0.0;
    p.tau1 = 2.13;  // arbitrary; must not matter without interference
    const BerPair a = ber_4qam_appendix(p, proj, n0);
    const double expected = q_function(p.rho1 * proj.h1_norm / std::sqrt(n0));
    CHECK(a.pe1 == doctest::Approx(expected).epsilon(1e-12));

    // Huge s1 gain at the strong user: SIC is error-free, so the strong user
    // sees a clean constellation with its own gain.
    const double pe2_limit = ber_user2_gains(1e3, 1.0, kQpsk, 0.02);
    CHECK(pe2_limit == doctest::Approx(q_function(1.0 / std::sqrt(0.02))).epsilon(1e-9));

    // Zero s1 gain leaves the subtraction inert; same clean constellation.
    const double pe2_zero = ber_user2_gains(0.0, 1.0, kQpsk, 0.02);
    CHECK(pe2_zero == doctest::Approx(q_function(1.0 / std::sqrt(0.02))).epsilon(1e-12));
}

TEST_CASE("both error rates fall as transmit SNR rises") {
    BasisProjections proj = unit_proj();
    proj.h1_norm = 1.2e-6;
    proj.g21_mag = 0.9e-6;
    proj.g22 = 1.4e-6;
    BeamParams p;
    p.rho1 = 0.7;
    p.rho2 = 0.4;
    p.delta1 = 0.05;
    p.delta2 = 0.35;
    p.tau1 = 3.6;

    double prev1 = 1.0, prev2 = 1.0;
    for (double n0 = 1e-11; n0 > 1e-14; n0 *= 0.5) {
        const BerPair b = ber_pair(p, proj, kQpsk, n0);
        CHECK(b.pe1 <= prev1 + 1e-15);
        CHECK(b.pe2 <= prev2 + 1e-15);
        prev1 = b.pe1;
        prev2 = b.pe2;
    }
}

TEST_CASE("weak user BER is gauge invariant and ignores w2 phases") {
    Rng rng(77);
    const BasisProjections proj = random_proj(rng);
    const double n0 = 4e-13;
    for (int trial = 0; trial < 50; ++trial) {
        const BeamParams p = random_params(rng);
        const double base1 = ber_user1(p, proj, kQpsk, n0);
        const double base2 = ber_user2(p, proj, kQpsk, n0);

        const double c = rng.uniform(0.0, kTwoPi);
        BeamParams shifted = p;  // common rotation of both transmit vectors
        shifted.phi1 = wrap_angle(p.phi1 + c);
        shifted.phi2 = wrap_angle(p.phi2 + c);
        CHECK(ber_user1(shifted, proj, kQpsk, n0) == doctest::Approx(base1).epsilon(1e-12));
        CHECK(ber_user2(shifted, proj, kQpsk, n0) == doctest::Approx(base2).epsilon(1e-12));

        BeamParams phi1_only = p;  // tau1 fixed; the weak user cannot see phi1
        phi1_only.phi1 = rng.uniform(0.0, kTwoPi);
        CHECK(ber_user1(phi1_only, proj, kQpsk, n0) == base1);
    }
}

TEST_CASE("probabilities stay in range and improve with rho1") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const BasisProjections proj = random_proj(rng);
        BeamParams p = random_params(rng);
        p.rho1 = rng.uniform(0.0, 2.0);  // deliberately allows infeasible inputs
        const double n0 = std::pow(10.0, rng.uniform(-14.0, -11.0));
        const BerPair b = ber_pair(p, proj, kQpsk, n0);
        CHECK(b.pe1 >= 0.0);
        CHECK(b.pe1 <= 1.0);
        CHECK(b.pe2 >= 0.0);
        CHECK(b.pe2 <= 1.0);
    }

    const BasisProjections proj = unit_proj();
    BeamParams p;
    p.delta1 = 0.0;
    double prev = 1.0;
    for (double rho = 0.0; rho <= 1.0; rho += 0.05) {
        p.rho1 = rho;
        const double pe = ber_user1(p, proj, kQpsk, 0.05);
        CHECK(pe <= prev + 1e-15);
        prev = pe;
    }
}

TEST_CASE("modulation gates") {
    CHECK_THROWS_AS(ModulationSpec::make(8, 4), std::invalid_argument);
    CHECK_THROWS_AS(ModulationSpec::make(4, 32), std::invalid_argument);

    const ModulationSpec m16 = ModulationSpec::make(16, 16);
    CHECK(m16.e1 == doctest::Approx(10.0));
    CHECK_FALSE(m16.validated_pair());
    const BasisProjections proj = unit_proj();
    const BeamParams p;
    CHECK_THROWS_WITH_AS(ber_user1(p, proj, m16, 0.01),
                         doctest::Contains("unvalidated modulation"), std::runtime_error);
    CHECK_THROWS_AS(ber_user2(p, proj, m16, 0.01), std::runtime_error);
    CHECK_THROWS_AS(ber_4qam_appendix(p, proj, m16, 0.01), std::invalid_argument);

    CHECK_THROWS_AS(ber_user1(p, proj, kQpsk, 0.0), std::domain_error);
}
