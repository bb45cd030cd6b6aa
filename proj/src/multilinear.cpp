#include "gkdv/multilinear.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fourier_detail.hpp"

namespace gkdv {

namespace {

using bigfloat = boost::multiprecision::cpp_bin_float_100;

// Direct summation visits prod |support_i| tuples; 33^5 keeps a 33-mode
// sextic admissible while pair sums stay unrestricted.
constexpr double max_direct_work = 4.0e7;
constexpr cplx zero{0.0, 0.0};

struct SupportEntry {
    int mode;
    cplx value;
};

std::vector<SupportEntry> support_of(const SpectralField& field) {
    std::vector<SupportEntry> out;
    for (int k = 0; k < field.size(); ++k)
        if (field.coeff[k] != zero) out.push_back({field.grid->mode_of(k), field.coeff[k]});
    return out;
}

void check_fields(const MultilinearSymbol& symbol,
                  const std::vector<const SpectralField*>& fields) {
    if (symbol.arity < 2) throw std::invalid_argument("symbol arity must be at least 2");
    if (static_cast<int>(fields.size()) != symbol.arity)
        throw std::invalid_argument("field count must equal the symbol arity");
    for (const auto* f : fields) {
        if (f == nullptr || !f->grid) throw std::invalid_argument("null field");
        if (!f->grid->same_as(*fields[0]->grid))
            throw std::invalid_argument("fields must share one grid");
    }
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bigfloat mp_multiplier(const bigfloat& N, const bigfloat& s, const bigfloat& xi) {
    const bigfloat a = abs(xi);
    if (a <= N) return 1;
    if (a >= 2 * N) return pow(N / a, 1 - s);
    const bigfloat t = log(a / N) / log(bigfloat{2});
    const bigfloat blend = t * t * t * (10 + t * (-15 + 6 * t));
    return pow(bigfloat{2}, -(1 - s) * blend);
}

}  // namespace

MultilinearSymbol constant_symbol(int arity, cplx value) {
    MultilinearSymbol sym;
    sym.arity = arity;
    sym.eval = [value](std::span<const double>) { return value; };
    sym.factors.reserve(static_cast<size_t>(arity));
    sym.factors.emplace_back([value](double) { return value; });
    for (int i = 1; i < arity; ++i)
        sym.factors.emplace_back([](double) { return cplx{1.0, 0.0}; });
    sym.symmetric = true;
    return sym;
}

cplx lambda_n_direct(const MultilinearSymbol& symbol,
                     const std::vector<const SpectralField*>& fields) {
    check_fields(symbol, fields);
    if (!symbol.eval) throw std::invalid_argument("symbol has no pointwise evaluator");
    const auto& grid = *fields[0]->grid;
    const int arity = symbol.arity;
    const int half = grid.num_modes / 2;
    std::vector<std::vector<SupportEntry>> supports;
    supports.reserve(static_cast<size_t>(arity) - 1);
    double work = 1.0;
    for (int i = 0; i + 1 < arity; ++i) {
        supports.push_back(support_of(*fields[i]));
        work *= static_cast<double>(supports.back().size());
    }
    if (work > max_direct_work)
        throw std::domain_error("effective band too wide for direct hyperplane summation");
    const double dxi = grid.dxi();
    const auto& last = *fields[arity - 1];
    std::vector<double> xi(static_cast<size_t>(arity));
    cplx total = zero;
    // Depth-first over the first arity-1 supports; the hyperplane constraint
    // forces the last frequency.
    auto descend = [&](auto&& self, int depth, int mode_sum, cplx product) -> void {
        if (depth + 1 == arity) {
            const int tail_mode = -mode_sum;
            if (tail_mode < -half || tail_mode >= half) return;
            const cplx tail = last.coeff[grid.index_of(tail_mode)];
            if (tail == zero) return;
            xi[static_cast<size_t>(depth)] = dxi * tail_mode;
            total += symbol.eval(xi) * product * tail;
            return;
        }
        for (const auto& entry : supports[static_cast<size_t>(depth)]) {
            xi[static_cast<size_t>(depth)] = dxi * entry.mode;
            self(self, depth + 1, mode_sum + entry.mode, product * entry.value);
        }
    };
    descend(descend, 0, 0, cplx{1.0, 0.0});
    return total * std::pow(grid.length, 1 - arity);
}

cplx lambda_n_factored(const MultilinearSymbol& symbol,
                       const std::vector<const SpectralField*>& fields) {
    check_fields(symbol, fields);
    if (static_cast<int>(symbol.factors.size()) != symbol.arity)
        throw std::invalid_argument("symbol does not factorize");
    const auto& grid = *fields[0]->grid;
    const int arity = symbol.arity;
    // Padded size exceeds arity * n / 2, so the quadrature sum sees no aliasing
    // and reproduces the hyperplane sum exactly.
    const int padded = (arity / 2 + 1) * grid.num_modes;
    const double dxi = grid.dxi();
    const double inv_l = 1.0 / grid.length;
    std::vector<cplx> product(static_cast<size_t>(padded), cplx{1.0, 0.0});
    std::vector<cplx> big, phys;
    for (int i = 0; i < arity; ++i) {
        big = detail::pad_embed(fields[static_cast<size_t>(i)]->coeff, padded);
        const auto& factor = symbol.factors[static_cast<size_t>(i)];
        for (int k = 0; k < padded; ++k) {
            const int mode = k < padded / 2 ? k : k - padded;
            big[static_cast<size_t>(k)] *= factor(dxi * mode);
        }
        detail::dft_backward(big, phys);
        for (int k = 0; k < padded; ++k)
            product[static_cast<size_t>(k)] *= phys[static_cast<size_t>(k)] * inv_l;
    }
    cplx total = zero;
    for (const auto& v : product) total += v;
    return total * (grid.length / padded);
}

cplx lambda_n(const MultilinearSymbol& symbol,
              const std::vector<const SpectralField*>& fields) {
    if (static_cast<int>(symbol.factors.size()) == symbol.arity)
        return lambda_n_factored(symbol, fields);
    return lambda_n_direct(symbol, fields);
}

cplx lambda_n(const MultilinearSymbol& symbol, const SpectralField& field) {
    std::vector<const SpectralField*> fields(static_cast<size_t>(symbol.arity), &field);
    return lambda_n(symbol, fields);
}

namespace {

// (1/L) sum over pairs (xi, -xi) of M2(xi, -xi) u_hat(xi) u_hat(-xi); the
// Nyquist mode has no partner and is skipped.
cplx lambda2_diagonal(const std::function<cplx(std::span<const double>)>& eval,
                      const SpectralField& field) {
    const auto& grid = *field.grid;
    const int half = grid.num_modes / 2;
    const double dxi = grid.dxi();
    double xi[2];
    cplx sum = zero;
    for (int mode = -half + 1; mode < half; ++mode) {
        const cplx a = field.coeff[grid.index_of(mode)];
        if (a == zero) continue;
        const cplx b = field.coeff[grid.index_of(-mode)];
        if (b == zero) continue;
        xi[0] = dxi * mode;
        xi[1] = -xi[0];
        sum += eval(std::span<const double>(xi, 2)) * a * b;
    }
    return sum / grid.length;
}

}  // namespace

DerivationLawResidual derivation_law_residual(const MultilinearSymbol& m2,
                                              const Trajectory& traj, int t_index) {
    if (m2.arity != 2 || !m2.eval)
        throw std::invalid_argument("m2 must be a pointwise binary symbol");
    if (t_index < 1 || t_index + 1 >= static_cast<int>(traj.states.size()))
        throw std::invalid_argument("t_index must have sampled neighbours on both sides");

    const auto ti = static_cast<size_t>(t_index);
    const cplx before = lambda2_diagonal(m2.eval, traj.states[ti - 1]);
    const cplx after = lambda2_diagonal(m2.eval, traj.states[ti + 1]);
    const cplx fd = (after - before) / (traj.times[ti + 1] - traj.times[ti - 1]);

    // Linear part: the symbol picks up alpha_2 = i (xi_1^3 + xi_2^3), which
    // vanishes identically on the pair diagonal; kept literal for clarity.
    const cplx linear = lambda2_diagonal(
        [&m2](std::span<const double> xi) {
            const cplx alpha{0.0, xi[0] * xi[0] * xi[0] + xi[1] * xi[1] * xi[1]};
            return m2.eval(xi) * alpha;
        },
        traj.states[ti]);

    // Quintic correction: on the six-frequency hyperplane the lifted symbol
    // collapses to i xi_1 (M2(xi_1, -xi_1) + M2(-xi_1, xi_1)) on the first
    // slot and 1 elsewhere, so the factored path applies.
    MultilinearSymbol lifted;
    lifted.arity = 6;
    lifted.factors.emplace_back([&m2](double xi) {
        const double fwd[2] = {xi, -xi};
        const double rev[2] = {-xi, xi};
        const cplx pair = m2.eval(std::span<const double>(fwd, 2)) +
                          m2.eval(std::span<const double>(rev, 2));
        return cplx{0.0, xi} * pair;
    });
    for (int i = 1; i < 6; ++i)
        lifted.factors.emplace_back([](double) { return cplx{1.0, 0.0}; });
    // Trajectories evolved with the nonlinearity disabled obey the bare law
    // d/dt Lambda_2 = Lambda_2(M2 alpha_2); no quintic flux enters.
    std::vector<const SpectralField*> sixfold(6, &traj.states[ti]);
    const cplx correction = traj.config.nonlinearity_enabled
                                ? lambda_n_factored(lifted, sixfold)
                                : cplx{0.0, 0.0};

    // Conserved choices of M2 leave both sides at roundoff, so the residual
    // is measured against the l1 magnitude of the flux integrand as well:
    // the size the correction would have without its cancellations.
    double flux_scale = 0.0;
    {
        const auto& state = traj.states[ti];
        const auto& grid = *state.grid;
        SpectralField weighted = state;
        for (int idx = 0; idx < grid.num_modes; ++idx) {
            const int mode = grid.mode_of(idx);
            weighted.coeff[static_cast<size_t>(idx)] *=
                mode == -grid.num_modes / 2 ? cplx{0.0, 0.0}
                                            : lifted.factors[0](grid.xi[static_cast<size_t>(idx)]);
        }
        enforce_hermitian(weighted);
        const auto flux = inverse_transform(weighted);
        const auto samples = inverse_transform(state);
        for (size_t m = 0; m < samples.size(); ++m)
            flux_scale += std::abs(flux[m]) * std::pow(std::abs(samples[m]), 5);
        flux_scale *= grid.dx();
    }

    const cplx rhs = linear + correction;
    DerivationLawResidual out;
    out.fd_value = fd.real();
    out.rhs_value = rhs.real();
    out.correction = correction.real();
    const double scale = std::max({std::abs(fd), std::abs(rhs), flux_scale});
    out.residual = scale > 0.0 ? std::abs(fd - rhs) / scale : 0.0;
    return out;
}

CounterexampleReport counterexample_verify(const CounterexampleTuple& tuple) {
    if (!(tuple.k > 0.0) || !(tuple.N > 0.0))
        throw std::invalid_argument("k and N must be positive");
    if (tuple.s <= 0.5 || tuple.s >= 1.0)
        throw std::invalid_argument("s must lie in (1/2, 1)");
    if (tuple.k < 100.0 * tuple.N)
        throw std::invalid_argument("k must be at least 100 N so every nonzero "
                                    "frequency sits on the decaying branch");

    const bigfloat k{tuple.k}, s{tuple.s}, n{tuple.N};
    const bigfloat a = 2 * sqrt(bigfloat{55}) / 5;
    const bigfloat xi[6] = {-k, -k, -8 * k, (5 + a) * k, (5 - a) * k, bigfloat{0}};

    bigfloat sum{0}, cube_sum{0}, numerator{0};
    for (const auto& x : xi) {
        sum += x;
        cube_sum += x * x * x;
        const bigfloat m = mp_multiplier(n, s, x);
        numerator += m * m * x * x * x;
    }

    CounterexampleReport report;
    report.k = tuple.k;
    report.s = tuple.s;
    report.N = tuple.N;
    report.sum_rel = (abs(sum) / k).convert_to<double>();
    report.cube_sum_rel = (abs(cube_sum) / (k * k * k)).convert_to<double>();
    report.numerator = numerator.convert_to<double>();
    const bigfloat scale = pow(k, 1 + 2 * s) * pow(n, 2 * (1 - s));
    report.bracket = (numerator / scale).convert_to<double>();
    report.sums_vanish = report.sum_rel <= 1e-12 && report.cube_sum_rel <= 1e-12;
    return report;
}

IdentityReport af_identities_check(int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("samples must be positive");
    std::mt19937_64 rng(seed);
    auto draw = [&rng]() { return 20.0 * uniform01(rng) - 10.0; };
    auto cube = [](double x) { return x * x * x; };

    IdentityReport report;
    report.samples = samples;
    for (int i = 0; i < samples; ++i) {
        const double x1 = draw(), x2 = draw(), x3 = -(x1 + x2);
        double lhs = cube(x1) + cube(x2) + cube(x3);
        double rhs = 3.0 * x1 * x2 * x3;
        double top = std::max({std::abs(x1), std::abs(x2), std::abs(x3)});
        double scale = std::max({std::abs(lhs), std::abs(rhs), cube(top)});
        if (scale > 0.0)
            report.max_residual_3 = std::max(report.max_residual_3, std::abs(lhs - rhs) / scale);

        const double y1 = draw(), y2 = draw(), y3 = draw(), y4 = -(y1 + y2 + y3);
        lhs = cube(y1) + cube(y2) + cube(y3) + cube(y4);
        rhs = 3.0 * (y1 + y2) * (y1 + y3) * (y1 + y4);
        top = std::max({std::abs(y1), std::abs(y2), std::abs(y3), std::abs(y4)});
        scale = std::max({std::abs(lhs), std::abs(rhs), cube(top)});
        if (scale > 0.0)
            report.max_residual_4 = std::max(report.max_residual_4, std::abs(lhs - rhs) / scale);
    }
    return report;
}

double commutator_symbol(const IMethodParams& params, std::span<const double, 5> xi) {
    double sum = 0.0;
    double product = 1.0;
    for (const double x : xi) {
        sum += x;
        product *= multiplier_value(params, x);
    }
    return 1.0 - multiplier_value(params, sum) / product;
}

ProbeReport symbol_bound_probe(const IMethodParams& params, ProbeRegime regime,
                               int samples, std::uint64_t seed, double probe_constant) {
    if (samples < 1) throw std::invalid_argument("samples must be positive");
    if (!(probe_constant > 0.0)) throw std::invalid_argument("probe_constant must be positive");
    std::mt19937_64 rng(seed);
    auto pick = [&rng](int lo, int hi) {  // inclusive integer range
        return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1));
    };
    auto signum = [&rng]() { return (rng() & 1u) != 0u ? 1.0 : -1.0; };

    constexpr int floor_exp = -40;  // smallest dyadic level sampled
    const double big_n = params.N;
    ProbeReport report;
    report.samples = samples;

    for (int i = 0; i < samples; ++i) {
        double xi[5];
        double bound = 0.0;
        if (regime == ProbeRegime::case_a) {
            // |xi_2| ~ N2 >= N, the rest well below N in descending dyadic bands.
            const int j2 = pick(0, 7);
            const double n2 = big_n * std::exp2(j2);
            xi[0] = signum() * n2 * (1.0 + uniform01(rng));
            int level = pick(2, 10);
            const double n3 = big_n * std::exp2(-level);
            for (int q = 1; q < 5; ++q) {
                xi[q] = signum() * big_n * std::exp2(-level) * (1.0 + uniform01(rng));
                level = std::min(-floor_exp, level + pick(0, 4));
            }
            bound = n3 / n2;
        } else {
            // |xi_2| ~ N2 far above |xi_3| ~ N3 >~ N; the bound involves the
            // multiplier at the forced first frequency.
            const int j2 = pick(3, 10);
            const double n2 = big_n * std::exp2(j2);
            xi[0] = signum() * n2 * (1.0 + uniform01(rng));
            int level = pick(-1, j2 - 3);
            for (int q = 1; q < 5; ++q) {
                xi[q] = signum() * big_n * std::exp2(level) * (1.0 + uniform01(rng));
                level = std::max(floor_exp, level - pick(0, 4));
            }
            double sum = 0.0, product = 1.0;
            for (const double x : xi) {
                sum += x;
                product *= multiplier_value(params, x);
            }
            bound = multiplier_value(params, sum) / product;
        }
        const double value = std::abs(commutator_symbol(params, std::span<const double, 5>(xi)));
        const double ratio = bound > 0.0 ? value / bound : 0.0;
        if (ratio > report.max_ratio) {
            report.max_ratio = ratio;
            std::copy(xi, xi + 5, report.worst_xi);
        }
    }
    report.within = report.max_ratio <= probe_constant;
    return report;
}

}  // namespace gkdv
