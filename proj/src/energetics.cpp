#include "gkdv/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fourier_detail.hpp"

namespace gkdv {

namespace {

// Exact quadrature of int u^6 dx: the integrand has modes up to 3n, so a 4x
// refined grid integrates it without aliasing.
double sextic_integral(const SpectralField& field) {
    const int p = 4 * field.grid->num_modes;
    auto big = detail::pad_embed(field.coeff, p);
    const auto u = detail::physical(big, field.grid->length);
    const double dx = field.grid->length / p;
    double sum = 0.0;
    for (double v : u) {
        const double v2 = v * v;
        sum += v2 * v2 * v2;
    }
    return dx * sum;
}

double kinetic(const SpectralField& field) {
    const double inv_l = 1.0 / field.grid->length;
    double sum = 0.0;
    for (int k = 0; k < field.size(); ++k) {
        const double xi = field.grid->xi[k];
        sum += xi * xi * std::norm(field.coeff[k]);
    }
    return 0.5 * inv_l * sum;
}

}  // namespace

double mass(const SpectralField& field) { return sobolev_norm(field, 0.0); }

double energy(const SpectralField& field) {
    return kinetic(field) - sextic_integral(field) / 6.0;
}

double energy_scale(const SpectralField& field) {
    return kinetic(field) + sextic_integral(field) / 6.0;
}

SpectralField soliton_profile(const SolitonSpec& spec) {
    if (!(spec.c > 0.0)) throw std::invalid_argument("soliton speed c must be positive");
    const auto& grid = *spec.grid;
    const double root_c = std::sqrt(spec.c);
    const auto profile = [&](double y) {
        return std::pow(3.0 * spec.c, 0.25) / std::sqrt(std::cosh(2.0 * root_c * y));
    };
    const double tail = profile(grid.length / 2.0);
    if (tail > 1e-10)
        throw std::invalid_argument("soliton tail at the box boundary exceeds 1e-10");
    std::vector<double> samples(grid.num_modes);
    for (int m = 0; m < grid.num_modes; ++m) {
        const double y = std::remainder(grid.x(m) - spec.center, grid.length);
        samples[m] = profile(y);
    }
    return forward_transform(samples, spec.grid);
}

double ground_state_mass() {
    static const double cached = [] {
        SolitonSpec spec{1.0, 25.0, make_grid(50.0, 4096)};
        return mass(soliton_profile(spec));
    }();
    return cached;
}

double gn_ratio(const SpectralField& field) {
    const double m = mass(field);
    if (m == 0.0) throw std::invalid_argument("gn_ratio of the zero field");
    const double grad2 = 2.0 * kinetic(field);
    const double ratio4 = std::pow(m / ground_state_mass(), 4.0);
    return sextic_integral(field) / (3.0 * ratio4 * grad2);
}

SmallnessReport smallness_check(const SpectralField& field) {
    const double ratio = mass(field) / ground_state_mass();
    return SmallnessReport{ratio, ratio < 1.0};
}

double modified_energy_1(const SpectralField& field, const IMethodParams& params) {
    return energy(apply_I(field, params));
}

ModifiedEnergy2Report modified_energy_2(const SpectralField& field,
                                        const IMethodParams& params, double eps_den) {
    const auto& grid = *field.grid;
    const int n = grid.num_modes;

    std::vector<int> support;
    for (int k = 0; k < n; ++k)
        if (field.coeff[k] != cplx{0.0, 0.0}) support.push_back(k);
    if (support.size() > 33)
        throw std::domain_error("effective band too wide for direct hyperplane summation");

    std::vector<double> m2(n), xi3(n), axi(n);
    std::vector<bool> flat(n);
    for (int k = 0; k < n; ++k) {
        const double xi = grid.xi[k];
        const double mv = multiplier_value(params, xi);
        m2[k] = mv * mv;
        xi3[k] = xi * xi * xi;
        axi[k] = std::abs(xi);
        flat[k] = mv == 1.0;
    }

    ModifiedEnergy2Report report;
    const int half = n / 2;
    cplx sextic{0.0, 0.0};
    for (int a : support)
        for (int b : support)
            for (int c : support)
                for (int d : support)
                    for (int e : support) {
                        const int mode6 = -(grid.mode_of(a) + grid.mode_of(b) +
                                            grid.mode_of(c) + grid.mode_of(d) +
                                            grid.mode_of(e));
                        if (mode6 < -half || mode6 >= half) continue;
                        const int f = grid.index_of(mode6);
                        const cplx prod = field.coeff[a] * field.coeff[b] * field.coeff[c] *
                                          field.coeff[d] * field.coeff[e] * field.coeff[f];
                        if (prod == cplx{0.0, 0.0}) continue;
                        double m6;
                        if (flat[a] && flat[b] && flat[c] && flat[d] && flat[e] && flat[f]) {
                            m6 = 1.0;
                        } else {
                            const double num = m2[a] * xi3[a] + m2[b] * xi3[b] +
                                               m2[c] * xi3[c] + m2[d] * xi3[d] +
                                               m2[e] * xi3[e] + m2[f] * xi3[f];
                            const double den = xi3[a] + xi3[b] + xi3[c] + xi3[d] + xi3[e] +
                                               xi3[f];
                            const double top = std::max(
                                {axi[a], axi[b], axi[c], axi[d], axi[e], axi[f]});
                            if (std::abs(den) < eps_den * top * top * top) {
                                report.singular_count += 1;
                                report.max_excluded_numerator =
                                    std::max(report.max_excluded_numerator, std::abs(num));
                                continue;
                            }
                            m6 = num / den;
                        }
                        sextic += m6 * prod;
                    }
    const double inv_l = 1.0 / grid.length;
    double quad = 0.0;
    for (int k = 0; k < n; ++k) {
        const double mxi = std::sqrt(m2[k]) * grid.xi[k];
        quad += mxi * mxi * std::norm(field.coeff[k]);
    }
    const double lambda6 = (sextic * std::pow(inv_l, 5)).real();
    report.value = 0.5 * inv_l * quad - lambda6 / 6.0;
    return report;
}

EnergySnapshot snapshot(const SpectralField& field, double t, const IMethodParams& params,
                        double hs_exponent) {
    EnergySnapshot snap;
    snap.t = t;
    snap.mass = mass(field);
    snap.energy = energy(field);
    snap.modified_energy_1 = modified_energy_1(field, params);
    snap.hs_norm = sobolev_norm(field, hs_exponent);
    snap.linf = lebesgue_norm(field, std::numeric_limits<double>::infinity());
    return snap;
}

}  // namespace gkdv
