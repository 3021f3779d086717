#include <doctest.h>

#include <cmath>

#include "nomabf/channel.hpp"
#include "nomabf/rng.hpp"

using namespace nomabf;

namespace {

Scenario make_scenario(const cvec& h1, const cvec& h2) {
    Scenario s;
    s.nt = static_cast<int>(h1.size());
    s.h1 = h1;
    s.h2 = h2;
    s.beta1 = s.beta2 = 1.0;
    s.d1_m = s.d2_m = 1.0;
    return s;
}

}  // namespace

TEST_CASE("rng streams are deterministic and distinct") {
    Rng a = Rng::stream(42, 1), b = Rng::stream(42, 1), c = Rng::stream(42, 2);
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_u64() != c.next_u64());
    Rng u(7);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("complex gaussian has unit total variance") {
    Rng rng(123);
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += std::norm(rng.cgaussian());
    CHECK(acc / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("path loss matches the log-distance law") {
    CHECK(path_loss_db(1.0) == doctest::Approx(128.1).epsilon(1e-12));
    CHECK(path_loss_db(0.6) == doctest::Approx(119.76).epsilon(1e-4));
    CHECK(path_loss_db(0.375) == doctest::Approx(112.08).epsilon(1e-4));
    CHECK_THROWS_AS(path_loss_db(0.0), std::domain_error);
    CHECK_THROWS_AS(path_loss_db(-1.0), std::domain_error);
}

TEST_CASE("link budget derives the effective noise variance") {
    const LinkBudget budget;  // 10 MHz, -174 dBm/Hz, 100 mW
    CHECK(budget.noise_variance_watt() == doctest::Approx(std::pow(10.0, -13.4)).epsilon(1e-12));
    CHECK(budget.effective_noise_watt() ==
          doctest::Approx(budget.noise_variance_watt() / 0.1).epsilon(1e-12));
    LinkBudget bad = budget;
    bad.tx_power_watt = 0.0;
    CHECK_THROWS_AS(bad.effective_noise_watt(), std::domain_error);
}

TEST_CASE("scenario sampling is ordered, reproducible, and in range") {
    const LinkBudget budget;
    const Scenario s = sample_scenario(2, {600, 650}, {350, 400}, budget, 7);
    CHECK(vec_norm(s.h1) <= vec_norm(s.h2));

    const Scenario t = sample_scenario(2, {600, 650}, {350, 400}, budget, 7);
    CHECK(s.d1_m == t.d1_m);
    for (int i = 0; i < 2; ++i) {
        CHECK(s.h1[i] == t.h1[i]);
        CHECK(s.h2[i] == t.h2[i]);
    }

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Scenario u = sample_scenario(3, {600, 650}, {350, 400}, budget, seed);
        CHECK(vec_norm(u.h1) <= vec_norm(u.h2));
        const double dmin = std::min(u.d1_m, u.d2_m), dmax = std::max(u.d1_m, u.d2_m);
        CHECK(dmin >= 350.0);
        CHECK(dmax <= 650.0);
    }
}

TEST_CASE("small-scale fading has per-antenna unit power") {
    const LinkBudget budget;
    for (int nt : {2, 5}) {
        double acc = 0.0;
        const int n = 10000;
        for (int i = 0; i < n; ++i) {
            const Scenario s = sample_scenario(nt, {600, 650}, {350, 400}, budget,
                                               stream_seed(99, nt, i));
            // Pool both slots: the role swap permutes the pair, so the pooled
            // fading power is unbiased while either slot alone is not.
            acc += 0.5 * (norm2(s.h1) / s.beta1 + norm2(s.h2) / s.beta2);
        }
        CHECK(acc / n == doctest::Approx(static_cast<double>(nt)).epsilon(0.05));
    }
}

TEST_CASE("basis construction on a hand example") {
    const Scenario s = make_scenario({{1, 0}, {0, 0}}, {{0.6, 0}, {0.8, 0}});
    const OrthonormalBasis b = build_basis(s);
    CHECK(std::abs(b.u1[0] - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(b.u1[1]) < 1e-15);
    CHECK(std::abs(b.u2[0]) < 1e-15);
    CHECK(std::abs(b.u2[1] - cplx(1, 0)) < 1e-15);

    const BasisProjections p = project_channels(s, b);
    CHECK(p.h1_norm == doctest::Approx(1.0));
    CHECK(p.g21_mag == doctest::Approx(0.6));
    CHECK(p.g21_angle == doctest::Approx(0.0));
    CHECK(p.g22 == doctest::Approx(0.8));
}

TEST_CASE("parallel channels are rejected") {
    const Scenario s = make_scenario({{1, 0}, {2, 1}}, {{2, 0}, {4, 2}});
    CHECK_THROWS_AS(build_basis(s), std::runtime_error);
}

TEST_CASE("orthogonal channels give zero cross projection") {
    const Scenario s = make_scenario({{1, 0}, {0, 0}}, {{0, 0}, {1, 0}});
    const BasisProjections p = project_channels(s, build_basis(s));
    CHECK(p.g21_mag == doctest::Approx(0.0));
}

TEST_CASE("basis invariants over random scenarios") {
    const LinkBudget budget;
    int idx = 0;
    for (int nt : {2, 3, 4, 5}) {
        for (int i = 0; i < 250; ++i, ++idx) {
            const Scenario s = sample_scenario(nt, {600, 650}, {350, 400}, budget,
                                               stream_seed(5, nt, i));
            const OrthonormalBasis b = build_basis(s);
            CHECK(std::abs(vec_norm(b.u1) - 1.0) <= 1e-12);
            CHECK(std::abs(vec_norm(b.u2) - 1.0) <= 1e-12);
            CHECK(std::abs(inner(b.u1, b.u2)) <= 1e-12);
            CHECK(std::abs(std::imag(inner(s.h1, b.u1))) <= 1e-12);
            CHECK(std::abs(std::imag(inner(s.h2, b.u2))) <= 1e-12);

            // h2 is fully captured by the two basis vectors.
            const cplx c1 = inner(b.u1, s.h2), c2 = inner(b.u2, s.h2);
            double res2 = 0.0;
            for (int d = 0; d < nt; ++d) {
                res2 += std::norm(s.h2[d] - c1 * b.u1[d] - c2 * b.u2[d]);
            }
            CHECK(std::sqrt(res2) <= 1e-9 * vec_norm(s.h2));

            const BasisProjections p = project_channels(s, b);
            const double lhs = p.g22 * p.g22 + p.g21_mag * p.g21_mag;
            const double rhs = norm2(s.h2);
            CHECK(std::abs(lhs - rhs) <= 1e-9 * rhs);
            CHECK(p.g22 > 0.0);
            CHECK(p.g21_angle >= 0.0);
            CHECK(p.g21_angle < kTwoPi);
        }
    }
}

TEST_CASE("feature extraction layout and scaling") {
    BasisProjections p;
    p.h1_norm = 1.4e-6;
    p.g21_mag = 5e-7;
    p.g21_angle = 1.0;
    p.g22 = 1.2e-6;
    const FeatureVector f = extract_features(p, 1e6);
    const std::array<double, 7> expected{1.4, 1.2, 0.5, 1.96, 1.44, 0.25, 1.0};
    for (int i = 0; i < 7; ++i) CHECK(f.v[i] == doctest::Approx(expected[i]).epsilon(1e-12));

    // With xi = 1 the squared entries are the squares of the magnitudes.
    const FeatureVector g = extract_features(p, 1.0);
    for (int i = 0; i < 3; ++i) CHECK(std::sqrt(g.v[i + 3]) == doctest::Approx(g.v[i]));

    CHECK_THROWS_AS(extract_features(p, 0.0), std::domain_error);

    // Same dimension regardless of antenna count.
    const LinkBudget budget;
    for (int nt : {2, 5}) {
        const Scenario s = sample_scenario(nt, {600, 650}, {350, 400}, budget, 3);
        const FeatureVector h = extract_features(project_channels(s, build_basis(s)), 1e6);
        CHECK(h.v.size() == 7);
    }
}
