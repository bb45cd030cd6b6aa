#include "gkdv/symbol_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fourier_detail.hpp"

namespace gkdv {

IMethodParams make_imethod_params(double s, double N) {
    if (!(s > 0.5) || !(s <= 1.0))
        throw std::invalid_argument("s must lie in (1/2, 1); s = 1 only for controls");
    if (!(N >= 1.0)) throw std::invalid_argument("N must be at least 1");
    return IMethodParams{s, N, Transition::smoothstep_loglog};
}

double multiplier_value(const IMethodParams& params, double xi) {
    const double a = std::abs(xi);
    if (a <= params.N) return 1.0;
    const double one_minus_s = 1.0 - params.s;
    if (a >= 2.0 * params.N) return std::pow(params.N / a, one_minus_s);
    // Blend in (log|xi|, log m): endpoints (log N, 0) and (log 2N, -(1-s) log 2)
    // with zero slope at both ends (smootherstep), so m is C^2 across |xi| = N
    // and matches the outer branch value at 2N.
    const double t = std::log2(a / params.N);
    const double blend = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    return std::exp2(-one_minus_s * blend);
}

SpectralField apply_I(const SpectralField& field, const IMethodParams& params) {
    SpectralField out = field;
    for (int k = 0; k < out.size(); ++k)
        out.coeff[k] *= multiplier_value(params, field.grid->xi[k]);
    return out;
}

double sobolev_norm(const SpectralField& field, double s0, bool homogeneous) {
    const double dxi = field.grid->dxi();
    double sum = 0.0;
    for (int k = 0; k < field.size(); ++k) {
        const double a = std::abs(field.grid->xi[k]);
        const double w = homogeneous ? a : 1.0 + a;
        sum += std::pow(w, 2.0 * s0) * std::norm(field.coeff[k]);
    }
    return std::sqrt(sum * dxi / (2.0 * std::numbers::pi));
}

double lebesgue_norm(const SpectralField& field, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
    const auto u = inverse_transform(field);
    if (std::isinf(p)) {
        double peak = 0.0;
        for (double v : u) peak = std::max(peak, std::abs(v));
        return peak;
    }
    const double dx = field.grid->dx();
    double sum = 0.0;
    for (double v : u) sum += std::pow(std::abs(v), p);
    return std::pow(dx * sum, 1.0 / p);
}

SmoothingBoundsReport smoothing_bounds_check(const IMethodParams& params, double s0,
                                             const std::vector<double>& xi_samples) {
    SmoothingBoundsReport report;
    report.lower_bound = 0.25;
    report.upper_bound = 4.0 * std::pow(params.N, 1.0 - params.s);
    report.min_ratio = std::numeric_limits<double>::infinity();
    report.max_ratio = 0.0;
    double argmin = 0.0;
    double argmax = 0.0;
    for (double xi : xi_samples) {
        const double weighted = multiplier_value(params, xi) *
                                std::pow(1.0 + std::abs(xi), s0 + 1.0 - params.s);
        const double ratio = weighted / std::pow(1.0 + std::abs(xi), s0);
        if (ratio < report.min_ratio) {
            report.min_ratio = ratio;
            argmin = xi;
        }
        if (ratio > report.max_ratio) {
            report.max_ratio = ratio;
            argmax = xi;
        }
    }
    report.within =
        report.min_ratio >= report.lower_bound && report.max_ratio <= report.upper_bound;
    report.worst_xi = report.min_ratio < report.lower_bound ? argmin : argmax;
    return report;
}

}  // namespace gkdv
