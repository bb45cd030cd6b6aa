#pragma once

#include <vector>

#include "gkdv/spectral_core.hpp"

namespace gkdv {

enum class Transition {
    smoothstep_loglog,  // C^2 smootherstep between the branches in log-log coordinates
};

// Parameters of the smoothing multiplier m_N: identity below N, order-(1-s)
// decay above 2N. s = 1 collapses m to 1 and is admitted for control
// experiments that isolate integrator drift; the working range is (1/2, 1).
struct IMethodParams {
    double s = 0.7;
    double N = 16.0;
    Transition transition = Transition::smoothstep_loglog;
};

IMethodParams make_imethod_params(double s, double N);

// m(xi): 1 for |xi| <= N, (N/|xi|)^{1-s} for |xi| >= 2N, monotone C^2 blend
// in between. Even, non-increasing in |xi|, values in (0, 1].
double multiplier_value(const IMethodParams& params, double xi);

// Coefficient-wise multiplication by m (Fourier multiplier I_N).
SpectralField apply_I(const SpectralField& field, const IMethodParams& params);

// ((1/2pi) sum <xi>^{2 s0} |u_hat|^2 dxi)^{1/2}, <xi> = 1 + |xi|;
// the homogeneous variant weighs by |xi| instead.
double sobolev_norm(const SpectralField& field, double s0, bool homogeneous = false);

// (dx sum |u(x_m)|^p)^{1/p}; p = infinity returns max_m |u(x_m)|.
double lebesgue_norm(const SpectralField& field, double p);

struct SmoothingBoundsReport {
    double min_ratio = 0.0;  // of m(xi) <xi>^{1-s} over the samples
    double max_ratio = 0.0;
    double lower_bound = 0.0;  // c1
    double upper_bound = 0.0;  // c2 N^{1-s}
    double worst_xi = 0.0;
    bool within = false;
};

// Symbol-level check of the smoothing sandwich
// <xi>^{s0} <= c m(xi) <xi>^{s0+1-s} <= c N^{1-s} <xi>^{s0}
// with c1 = 1/4, c2 = 4; the s0 weights cancel in the ratio.
SmoothingBoundsReport smoothing_bounds_check(const IMethodParams& params, double s0,
                                             const std::vector<double>& xi_samples);

}  // namespace gkdv
