#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "gkdv/energetics.hpp"
#include "gkdv/multilinear.hpp"
#include "gkdv/random_fields.hpp"
#include "gkdv/symbol_ops.hpp"

using namespace gkdv;

namespace {

constexpr double pi = std::numbers::pi;

SpectralField cosine_field(GridPtr grid, double amplitude, int mode) {
    std::vector<double> samples(static_cast<size_t>(grid->num_modes));
    for (int m = 0; m < grid->num_modes; ++m)
        samples[static_cast<size_t>(m)] =
            amplitude * std::cos(2.0 * pi * mode * m / grid->num_modes);
    return forward_transform(samples, grid);
}

double grad_norm(const SpectralField& field) { return sobolev_norm(field, 1.0, true); }

}  // namespace

TEST_CASE("mass") {
    const auto g = make_grid(50.0, 1024);
    CHECK(mass(zero_field(g)) == 0.0);

    const auto q = soliton_profile({1.0, 25.0, g});
    const double m = mass(q);
    CHECK(m * m == doctest::Approx(std::sqrt(3.0) * pi / 2.0).epsilon(1e-10));
    CHECK(ground_state_mass() * ground_state_mass() ==
          doctest::Approx(std::sqrt(3.0) * pi / 2.0).epsilon(1e-10));
}

TEST_CASE("energy closed forms") {
    const auto g = make_grid(2.0 * pi, 128);
    CHECK(energy(zero_field(g)) == 0.0);

    SUBCASE("tiny single mode is all kinetic") {
        const double a = 1e-4;
        const auto u = cosine_field(g, a, 1);
        CHECK(energy(u) == doctest::Approx(0.5 * a * a * pi).epsilon(1e-9));
    }

    SUBCASE("order-one cosine against the exact integrals") {
        // ||u_x||^2 = A^2 pi and int cos^6 = 5 pi / 8 over the period.
        const double a = 1.3;
        const auto u = cosine_field(g, a, 3);
        const double exact =
            0.5 * a * a * 9.0 * pi - std::pow(a, 6.0) * (5.0 * pi / 8.0) / 6.0;
        CHECK(energy(u) == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("soliton profile") {
    const auto g = make_grid(50.0, 1024);

    SUBCASE("peak value") {
        for (const double c : {1.0, 2.3}) {
            const auto q = soliton_profile({c, 25.0, g});
            const auto samples = inverse_transform(q);
            CHECK(samples[512] == doctest::Approx(std::pow(3.0 * c, 0.25)).epsilon(1e-12));
        }
    }

    SUBCASE("traveling wave equation Q'' - cQ + Q^5 = 0") {
        for (const double c : {1.0, 4.0}) {
            auto q = soliton_profile({c, 25.0, g});
            auto second = q;
            for (int k = 0; k < g->num_modes; ++k) {
                const double xi = g->xi[static_cast<size_t>(k)];
                second.coeff[static_cast<size_t>(k)] *= -xi * xi;
            }
            const auto qs = inverse_transform(q);
            const auto q2 = inverse_transform(second);
            double worst = 0.0;
            for (size_t m = 0; m < qs.size(); ++m)
                worst = std::max(worst,
                                 std::abs(q2[m] - c * qs[m] + std::pow(qs[m], 5.0)));
            CHECK(worst < 1e-8);
        }
    }

    SUBCASE("mass is independent of the speed") {
        const double m1 = mass(soliton_profile({1.0, 25.0, g}));
        const double m2 = mass(soliton_profile({2.7, 25.0, g}));
        CHECK(m1 == doctest::Approx(m2).epsilon(1e-10));
    }

    SUBCASE("profile that does not fit is rejected") {
        CHECK_THROWS_AS(soliton_profile({0.01, 5.0, make_grid(10.0, 128)}),
                        std::invalid_argument);
    }
}

TEST_CASE("sharp interpolation functional") {
    const auto g = make_grid(50.0, 1024);
    const auto q = soliton_profile({1.0, 25.0, g});

    CHECK(gn_ratio(q) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(gn_ratio(q) <= 1.0 + 1e-6);

    SUBCASE("scale invariance") {
        auto scaled = q;
        for (auto& ck : scaled.coeff) ck *= 0.37;
        CHECK(gn_ratio(scaled) == doctest::Approx(gn_ratio(q)).epsilon(1e-12));
    }

    SUBCASE("gaussian is strictly suboptimal") {
        std::vector<double> samples(1024);
        for (int m = 0; m < 1024; ++m) {
            const double x = g->x(m) - 25.0;
            samples[static_cast<size_t>(m)] = std::exp(-x * x);
        }
        CHECK(gn_ratio(forward_transform(samples, g)) < 1.0);
    }

    SUBCASE("inequality over random fields") {
        const auto gr = make_grid(30.0, 256);
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const auto u = random_band_field(gr, {1, 60}, 1.0, seed);
            CHECK(gn_ratio(u) <= 1.0 + 1e-6);
        }
    }

    SUBCASE("zero field rejected") {
        CHECK_THROWS_AS(gn_ratio(zero_field(g)), std::invalid_argument);
    }
}

TEST_CASE("smallness check") {
    // Reference quadrature lives on this exact grid, so the borderline case
    // compares a value against itself and the strict inequality is decisive.
    const auto g = make_grid(50.0, 4096);
    const auto q = soliton_profile({1.0, 25.0, g});

    auto half = q;
    for (auto& ck : half.coeff) ck *= 0.5;
    const auto small = smallness_check(half);
    CHECK(small.ratio == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(small.pass);

    const auto borderline = smallness_check(q);
    CHECK(borderline.ratio == 1.0);
    CHECK_FALSE(borderline.pass);

    auto big = q;
    for (auto& ck : big.coeff) ck *= 1.1;
    const auto large = smallness_check(big);
    CHECK(large.ratio == doctest::Approx(1.1).epsilon(1e-12));
    CHECK_FALSE(large.pass);
}

TEST_CASE("energy positivity under smallness") {
    const auto g = make_grid(30.0, 256);
    for (const double ratio : {0.3, 0.7, 0.95}) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto u = random_band_field_with_norm(
                g, {1, 60}, ratio * ground_state_mass(), seed);
            const double floor =
                (1.0 - std::pow(ratio, 4.0)) * 0.5 * grad_norm(u) * grad_norm(u);
            CHECK(energy(u) >= floor * (1.0 - 1e-9));
            CHECK(energy(u) >= 0.0);
        }
    }
}

TEST_CASE("first modified energy") {
    const auto g = make_grid(2.0 * pi, 256);
    const auto p = make_imethod_params(0.7, 16.0);

    SUBCASE("band-limited fields see the plain energy") {
        const auto u = random_band_field(g, {1, 16}, 0.8, 5);
        CHECK(modified_energy_1(u, p) == energy(u));
    }

    SUBCASE("s = 1 sees the plain energy for any field") {
        const auto u = random_band_field(g, {1, 100}, 0.8, 6);
        CHECK(modified_energy_1(u, make_imethod_params(1.0, 16.0)) == energy(u));
    }

    SUBCASE("definitional identity") {
        const auto u = random_band_field(g, {1, 100}, 0.8, 7);
        CHECK(modified_energy_1(u, p) == energy(apply_I(u, p)));
    }

    SUBCASE("converges to the energy as N grows") {
        const auto gl = make_grid(30.0, 256);
        std::vector<double> samples(256);
        for (int m = 0; m < 256; ++m) {
            const double x = gl->x(m) - 15.0;
            samples[static_cast<size_t>(m)] = 0.9 * std::exp(-x * x);
        }
        const auto u = forward_transform(samples, gl);
        const double e = energy(u);
        double previous = 1e100;
        for (const double big_n : {4.0, 8.0, 16.0}) {
            const double diff = std::abs(modified_energy_1(u, {0.7, big_n, p.transition}) - e);
            CHECK(diff <= previous);
            previous = diff;
        }
        CHECK(previous < 1e-12);
    }

    SUBCASE("matches the multilinear representation") {
        const auto gs = make_grid(2.0 * pi, 32);
        const auto u = random_band_field(gs, {1, 12}, 0.7, 11);
        const auto pm = make_imethod_params(0.7, 4.0);

        const auto weighted_derivative = [pm](double xi) {
            return cplx{multiplier_value(pm, xi) * xi, 0.0};
        };
        const auto weight = [pm](double xi) {
            return cplx{multiplier_value(pm, xi), 0.0};
        };
        MultilinearSymbol m2{2, {}, {weighted_derivative, weighted_derivative}, true};
        MultilinearSymbol m6{6, {}, {weight, weight, weight, weight, weight, weight}, true};
        const double via_lambda =
            std::real(-0.5 * lambda_n(m2, u) - lambda_n(m6, u) / 6.0);
        CHECK(via_lambda == doctest::Approx(modified_energy_1(u, pm)).epsilon(1e-10));
    }
}

TEST_CASE("second modified energy") {
    const auto g = make_grid(2.0 * pi, 32);

    SUBCASE("band-limited fields see the plain energy") {
        const auto p = make_imethod_params(0.7, 16.0);
        const auto u = random_band_field(g, {1, 8}, 0.8, 13);
        const auto report = modified_energy_2(u, p);
        CHECK(report.value == doctest::Approx(energy(u)).epsilon(1e-10));
        CHECK(report.singular_count == 0);
    }

    SUBCASE("exact resonances beyond the cutoff are tallied") {
        // Modes +-3 and +-5 with N = 4: tuples like (5,-5,3,-3,3,-3) kill
        // sum xi^3 while m(5) != 1, so the screen must fire.
        const auto p = make_imethod_params(0.7, 4.0);
        auto u = zero_field(g);
        u.set_mode(3, cplx{0.4, 0.1});
        u.set_mode(5, cplx{0.3, -0.2});
        enforce_hermitian(u);
        const auto report = modified_energy_2(u, p);
        CHECK(report.singular_count >= 1);
    }

    SUBCASE("s = 1 sees the plain energy") {
        const auto u = random_band_field(g, {1, 12}, 0.8, 14);
        const auto report = modified_energy_2(u, make_imethod_params(1.0, 4.0));
        CHECK(report.value == doctest::Approx(energy(u)).epsilon(1e-10));
    }
}

TEST_CASE("conservation along the flow") {
    const auto g = make_grid(50.0, 512);
    std::vector<double> samples(512);
    for (int m = 0; m < 512; ++m) {
        const double x = g->x(m) - 25.0;
        samples[static_cast<size_t>(m)] = std::exp(-x * x);
    }
    auto u0 = forward_transform(samples, g);
    const double target = 0.5 * ground_state_mass();
    const double scale = target / mass(u0);
    for (auto& ck : u0.coeff) ck *= scale;
    REQUIRE(smallness_check(u0).pass);

    StepperConfig config;
    config.dt = 1e-4;
    const auto traj = evolve(u0, 1.0, config, 10000);
    REQUIRE_FALSE(traj.diverged);

    const double m0 = mass(traj.states.front());
    const double m1 = mass(traj.states.back());
    CHECK(std::abs(m1 - m0) / m0 < 1e-8);

    const double e0 = energy(traj.states.front());
    const double e1 = energy(traj.states.back());
    CHECK(std::abs(e1 - e0) / std::max(std::abs(e0), energy_scale(u0)) < 1e-8);
}

TEST_CASE("soliton translation") {
    const auto g = make_grid(50.0, 1024);
    const auto q = soliton_profile({1.0, 20.0, g});
    StepperConfig config;
    config.dt = 1e-3;
    const auto traj = evolve(q, 1.0, config, 1000);
    REQUIRE_FALSE(traj.diverged);

    const auto expected = inverse_transform(soliton_profile({1.0, 21.0, g}));
    const auto got = inverse_transform(traj.states.back());
    double worst = 0.0;
    for (size_t m = 0; m < got.size(); ++m)
        worst = std::max(worst, std::abs(got[m] - expected[m]));
    CHECK(worst < 1e-4);
}

TEST_CASE("snapshot bundles the diagnostics") {
    const auto g = make_grid(50.0, 256);
    const auto p = make_imethod_params(0.7, 16.0);
    const auto u = random_band_field(g, {1, 40}, 0.6, 19);
    const auto snap = snapshot(u, 2.5, p, 0.7);
    CHECK(snap.t == 2.5);
    CHECK(snap.mass == mass(u));
    CHECK(snap.energy == energy(u));
    CHECK(snap.modified_energy_1 == modified_energy_1(u, p));
    CHECK(snap.hs_norm == sobolev_norm(u, 0.7));
    CHECK(snap.linf == lebesgue_norm(u, std::numeric_limits<double>::infinity()));
}
