#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "doctest.h"
#include "gkdv/energetics.hpp"
#include "gkdv/multilinear.hpp"
#include "gkdv/random_fields.hpp"
#include "gkdv/symbol_ops.hpp"

using namespace gkdv;

namespace {

constexpr double pi = std::numbers::pi;

MultilinearSymbol pair_symbol(std::function<cplx(double, double)> f) {
    MultilinearSymbol sym;
    sym.arity = 2;
    sym.eval = [f = std::move(f)](std::span<const double> xi) { return f(xi[0], xi[1]); };
    sym.symmetric = true;
    return sym;
}

double grad_norm(const SpectralField& field) { return sobolev_norm(field, 1.0, true); }

}  // namespace

TEST_CASE("pair functional oracles") {
    const auto g = make_grid(2.0 * pi, 64);
    const auto f = random_band_field(g, {1, 20}, 0.8, 2);

    const cplx plain = lambda_n(constant_symbol(2), f);
    CHECK(std::abs(plain.imag()) < 1e-14);
    CHECK(plain.real() == doctest::Approx(mass(f) * mass(f)).epsilon(1e-12));

    const auto derivative_pair = pair_symbol([](double a, double b) {
        return cplx{a * b, 0.0};
    });
    const cplx kin = lambda_n(derivative_pair, f);
    CHECK(-0.5 * kin.real() ==
          doctest::Approx(0.5 * grad_norm(f) * grad_norm(f)).epsilon(1e-12));
}

TEST_CASE("sextic functional") {
    SUBCASE("two-mode cosine closed form") {
        // u = 2A cos(3x) integrates to int u^6 = 20 A^6 L.
        const auto g = make_grid(2.0 * pi, 64);
        const double a = 0.6;
        auto u = zero_field(g);
        u.set_mode(3, cplx{a * g->length, 0.0});
        u.set_mode(-3, cplx{a * g->length, 0.0});
        const cplx sextic = lambda_n(constant_symbol(6), u);
        CHECK(sextic.real() ==
              doctest::Approx(20.0 * std::pow(a, 6.0) * g->length).epsilon(1e-12));
        CHECK(std::abs(sextic.imag()) < 1e-12);
    }

    SUBCASE("energy identity on random fields") {
        const auto g = make_grid(2.0 * pi, 64);
        const auto derivative_pair = pair_symbol([](double a, double b) {
            return cplx{a * b, 0.0};
        });
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto u = random_band_field(g, {1, 8}, 0.9, seed);
            const double via_lambda =
                std::real(-0.5 * lambda_n(derivative_pair, u) -
                          lambda_n(constant_symbol(6), u) / 6.0);
            CHECK(via_lambda == doctest::Approx(energy(u)).epsilon(1e-10));
        }
    }
}

TEST_CASE("fast path equals direct path") {
    const auto g = make_grid(2.0 * pi, 64);
    const auto u = random_band_field(g, {1, 8}, 0.7, 9);

    SUBCASE("constant symbols") {
        for (const int arity : {2, 6}) {
            const auto sym = constant_symbol(arity);
            std::vector<const SpectralField*> fields(static_cast<size_t>(arity), &u);
            const cplx fast = lambda_n_factored(sym, fields);
            const cplx direct = lambda_n_direct(sym, fields);
            CHECK(std::abs(fast - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
        }
    }

    SUBCASE("factorized derivative weights") {
        const auto p = make_imethod_params(0.7, 4.0);
        MultilinearSymbol sym;
        sym.arity = 6;
        sym.eval = [p](std::span<const double> xi) {
            cplx out{1.0, 0.0};
            for (const double x : xi) out *= cplx{multiplier_value(p, x), 0.0};
            return out * cplx{0.0, xi[0]};
        };
        sym.factors.emplace_back(
            [p](double x) { return cplx{0.0, x * multiplier_value(p, x)}; });
        for (int i = 1; i < 6; ++i)
            sym.factors.emplace_back([p](double x) {
                return cplx{multiplier_value(p, x), 0.0};
            });

        std::vector<const SpectralField*> fields(6, &u);
        const cplx fast = lambda_n_factored(sym, fields);
        const cplx direct = lambda_n_direct(sym, fields);
        CHECK(std::abs(fast - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
        // lambda_n itself must pick the fast path (factors are present).
        CHECK(lambda_n(sym, u) == fast);
    }
}

TEST_CASE("guards") {
    const auto g = make_grid(2.0 * pi, 128);
    const auto wide = random_band_field(g, {1, 40}, 0.5, 4);

    MultilinearSymbol unfactored;
    unfactored.arity = 6;
    unfactored.eval = [](std::span<const double>) { return cplx{1.0, 0.0}; };
    CHECK_THROWS_AS(lambda_n(unfactored, wide), std::domain_error);

    const auto other = random_band_field(make_grid(4.0 * pi, 128), {1, 8}, 0.5, 5);
    const auto narrow = random_band_field(g, {1, 8}, 0.5, 6);
    CHECK_THROWS_AS(lambda_n(constant_symbol(2), {&narrow, &other}),
                    std::invalid_argument);
    CHECK_THROWS_AS(lambda_n(constant_symbol(2), {&narrow}), std::invalid_argument);
}

TEST_CASE("permutation invariance") {
    const auto g = make_grid(2.0 * pi, 64);
    const auto f = random_band_field(g, {1, 12}, 0.8, 7);
    const auto h = random_band_field(g, {1, 12}, 0.8, 8);

    SUBCASE("direct path, symmetric symbol, swapped fields") {
        const auto derivative_pair = pair_symbol([](double a, double b) {
            return cplx{a * b, 0.0};
        });
        const cplx fg = lambda_n(derivative_pair, {&f, &h});
        const cplx hf = lambda_n(derivative_pair, {&h, &f});
        CHECK(std::abs(fg - hf) <= 1e-12 * std::max(1.0, std::abs(fg)));
    }

    SUBCASE("factored path, swapped factors") {
        MultilinearSymbol ab;
        ab.arity = 2;
        ab.factors.emplace_back([](double x) { return cplx{0.0, x}; });
        ab.factors.emplace_back([](double x) { return cplx{std::cos(x), 0.0}; });
        MultilinearSymbol ba;
        ba.arity = 2;
        ba.factors.emplace_back([](double x) { return cplx{std::cos(x), 0.0}; });
        ba.factors.emplace_back([](double x) { return cplx{0.0, x}; });
        std::vector<const SpectralField*> fields(2, &f);
        CHECK(lambda_n_factored(ab, fields) == lambda_n_factored(ba, fields));
    }
}

TEST_CASE("derivation law along the flow") {
    const auto g = make_grid(2.0 * pi, 64);
    const auto u0 = random_band_field(g, {1, 10}, 0.4, 3);
    const auto p = make_imethod_params(0.7, 4.0);
    const auto weighted_pair = pair_symbol([p](double a, double b) {
        return cplx{multiplier_value(p, a) * a * multiplier_value(p, b) * b, 0.0};
    });

    SUBCASE("conserved mass symbol") {
        StepperConfig config;
        config.dt = 1e-4;
        const auto traj = evolve(u0, 0.005, config, 1);
        REQUIRE_FALSE(traj.diverged);
        const auto r = derivation_law_residual(constant_symbol(2), traj, 25);
        CHECK(r.residual < 1e-6);
    }

    SUBCASE("weighted derivative symbol tracks the flow") {
        StepperConfig config;
        config.dt = 1e-5;
        const auto traj = evolve(u0, 4e-5, config, 1);
        const auto r = derivation_law_residual(weighted_pair, traj, 2);
        CHECK(r.residual < 1e-6);
        CHECK(r.fd_value == doctest::Approx(r.rhs_value).epsilon(1e-5));
    }

    SUBCASE("linear flow obeys the bare law") {
        StepperConfig config;
        config.dt = 1e-4;
        config.nonlinearity_enabled = false;
        const auto traj = evolve(u0, 0.005, config, 1);
        CHECK(derivation_law_residual(weighted_pair, traj, 25).residual < 1e-8);
        CHECK(derivation_law_residual(constant_symbol(2), traj, 25).residual < 1e-8);
    }

    SUBCASE("second order in the sampling step") {
        const auto probe = pair_symbol([](double a, double b) {
            return cplx{a * b, 0.0};
        });
        StepperConfig config;
        config.dt = 1e-4;
        std::vector<double> residuals;
        for (const int stride : {1, 2, 4}) {
            const auto traj = evolve(u0, 0.02, config, stride);
            const int mid = 100 / stride;  // all land on t = 0.01
            residuals.push_back(derivation_law_residual(probe, traj, mid).residual);
        }
        CHECK(residuals[1] / residuals[0] == doctest::Approx(4.0).epsilon(0.4));
        CHECK(residuals[2] / residuals[1] == doctest::Approx(4.0).epsilon(0.4));
    }

    SUBCASE("index validation") {
        StepperConfig config;
        config.dt = 1e-4;
        const auto traj = evolve(u0, 5e-4, config, 1);
        CHECK_THROWS_AS(derivation_law_residual(constant_symbol(2), traj, 0),
                        std::invalid_argument);
        CHECK_THROWS_AS(derivation_law_residual(constant_symbol(2), traj, 5),
                        std::invalid_argument);
        MultilinearSymbol six = constant_symbol(6);
        CHECK_THROWS_AS(derivation_law_residual(six, traj, 2), std::invalid_argument);
    }
}

TEST_CASE("resonant tuple verification") {
    const auto report = counterexample_verify({100.0, 0.7, 1.0});
    CHECK(report.sums_vanish);
    CHECK(report.sum_rel < 1e-12);
    CHECK(report.cube_sum_rel < 1e-12);
    CHECK(report.k == 100.0);
    CHECK(report.s == 0.7);
    CHECK(report.N == 1.0);

    SUBCASE("double precision oracle for the weighted cube sum") {
        const double k = 100.0, s = 0.7, n = 1.0;
        const double a = 2.0 * std::sqrt(55.0) / 5.0;
        const double xi[5] = {-k, -k, -8.0 * k, (5.0 + a) * k, (5.0 - a) * k};
        double num = 0.0;
        for (const double x : xi)
            num += std::pow(n / std::abs(x), 2.0 * (1.0 - s)) * x * x * x;
        CHECK(report.numerator == doctest::Approx(num).epsilon(1e-10));
        const double bracket = num / (std::pow(k, 1.0 + 2.0 * s) * std::pow(n, 2.0 * (1.0 - s)));
        CHECK(report.bracket == doctest::Approx(bracket).epsilon(1e-10));
        CHECK(report.bracket > 1.9);
        CHECK(report.bracket < 2.1);
    }

    SUBCASE("bracket is scale free in k and N") {
        const auto other = counterexample_verify({256.0, 0.7, 1.0});
        CHECK(other.bracket == doctest::Approx(report.bracket).epsilon(1e-12));
        const auto rescaled = counterexample_verify({256.0, 0.7, 2.0});
        CHECK(rescaled.bracket == doctest::Approx(report.bracket).epsilon(1e-12));
    }

    SUBCASE("validation") {
        CHECK_THROWS_AS(counterexample_verify({50.0, 0.7, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(counterexample_verify({100.0, 0.5, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(counterexample_verify({100.0, 1.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(counterexample_verify({-3.0, 0.7, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(counterexample_verify({100.0, 0.7, 0.0}), std::invalid_argument);
    }
}

TEST_CASE("cube sum identities") {
    // Closed-form instances first: (1, 1, -2) and (1, 2, 3, -6).
    CHECK(1.0 + 1.0 - 8.0 == 3.0 * 1.0 * 1.0 * (-2.0));
    const double quad = 1.0 + 8.0 + 27.0 - 216.0;
    CHECK(quad == 3.0 * (1.0 + 2.0) * (1.0 + 3.0) * (1.0 - 6.0));

    const auto report = af_identities_check(1000, 2026);
    CHECK(report.samples == 1000);
    CHECK(report.max_residual_3 < 1e-12);
    CHECK(report.max_residual_4 < 1e-12);

    CHECK_THROWS_AS(af_identities_check(0, 1), std::invalid_argument);
}

TEST_CASE("commutator symbol") {
    const auto p = make_imethod_params(0.7, 8.0);

    SUBCASE("low frequencies are invisible") {
        const double step = p.N / 5.0 / 7.0;
        for (int i = 0; i < 50; ++i) {
            const double xs[5] = {step * (i % 7), -step * ((i + 3) % 5), step,
                                  -step * ((i + 1) % 4), step * 0.5};
            CHECK(commutator_symbol(p, xs) == 0.0);
        }
    }

    SUBCASE("single active slot cancels exactly") {
        const IMethodParams half{0.5, 16.0, Transition::smoothstep_loglog};
        const double xs[5] = {4.0 * 16.0, 0.0, 0.0, 0.0, 0.0};
        CHECK(commutator_symbol(half, xs) == 0.0);
        const double ys[5] = {4.0 * p.N, 0.0, 0.0, 0.0, 0.0};
        CHECK(commutator_symbol(p, ys) == 0.0);
    }

    SUBCASE("near cancellation closed form") {
        const double xs[5] = {4.0 * p.N, -4.0 * p.N * 0.99, 0.0, 0.0, 0.0};
        const double expected = 1.0 - std::pow(4.0 * 3.96, 1.0 - p.s);
        CHECK(commutator_symbol(p, xs) == doctest::Approx(expected).epsilon(1e-12));
        // Mean-value regime: comparable frequencies, ratio near one, so the
        // probed bound 10 * N3/N2 holds with room.
        CHECK(std::abs(commutator_symbol(p, xs)) <= 10.0 * 3.96 / 4.0);
    }

    SUBCASE("vanishes identically when the multiplier is trivial") {
        const auto flat = make_imethod_params(1.0, 8.0);
        for (int i = 0; i < 100; ++i) {
            const double xs[5] = {std::pow(1.3, i % 20) - 5.0, 3.1 * i, -2.0 * i,
                                  0.25 * i * i, -40.0 + i};
            CHECK(commutator_symbol(flat, xs) == 0.0);
        }
    }

    SUBCASE("symmetric in its five arguments") {
        const double xs[5] = {40.0, -3.0, 17.5, 2.0, -9.25};
        const double ys[5] = {17.5, 2.0, -9.25, 40.0, -3.0};
        CHECK(commutator_symbol(p, xs) ==
              doctest::Approx(commutator_symbol(p, ys)).epsilon(1e-14));
    }
}

TEST_CASE("symbol bound probes") {
    const auto p = make_imethod_params(0.7, 16.0);

    const auto a = symbol_bound_probe(p, ProbeRegime::case_a, 500, 11);
    CHECK(a.samples == 500);
    CHECK(a.within);
    CHECK(a.max_ratio <= 10.0);

    const auto b = symbol_bound_probe(p, ProbeRegime::case_b, 500, 12);
    CHECK(b.samples == 500);
    CHECK(b.within);
    CHECK(b.max_ratio <= 10.0);

    CHECK_THROWS_AS(symbol_bound_probe(p, ProbeRegime::case_a, 0, 1),
                    std::invalid_argument);
}
