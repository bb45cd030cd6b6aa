#include "gkdv/spectral_core.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "fourier_detail.hpp"

namespace gkdv {

namespace detail {
namespace {

struct PlanPair {
    fftw_plan forward;
    fftw_plan backward;
};

// The FFTW planner is not thread-safe; executing a made plan is. Plans are
// made once per size with FFTW_ESTIMATE so results do not depend on runtime
// measurement, and FFTW_UNALIGNED so they accept any caller buffer.
PlanPair plans_for(int n) {
    static std::mutex mutex;
    static std::map<int, PlanPair> cache;
    std::scoped_lock lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cplx> a(n), b(n);
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    PlanPair plans{
        fftw_plan_dft_1d(n, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED),
        fftw_plan_dft_1d(n, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED),
    };
    cache.emplace(n, plans);
    return plans;
}

}  // namespace

void dft_forward(const std::vector<cplx>& in, std::vector<cplx>& out) {
    out.resize(in.size());
    auto plans = plans_for(static_cast<int>(in.size()));
    fftw_execute_dft(plans.forward,
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

void dft_backward(const std::vector<cplx>& in, std::vector<cplx>& out) {
    out.resize(in.size());
    auto plans = plans_for(static_cast<int>(in.size()));
    fftw_execute_dft(plans.backward,
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

std::vector<cplx> pad_embed(const std::vector<cplx>& coeff, int p) {
    const int n = static_cast<int>(coeff.size());
    std::vector<cplx> out(p, cplx{0.0, 0.0});
    if (p == n) {
        out = coeff;
        return out;
    }
    const int half = n / 2;
    for (int k = 0; k < half; ++k) out[k] = coeff[k];
    for (int k = half + 1; k < n; ++k) out[p - n + k] = coeff[k];
    const cplx nyq = coeff[half];
    out[half] += 0.5 * nyq;
    out[p - half] += 0.5 * nyq;
    return out;
}

std::vector<cplx> pad_extract(const std::vector<cplx>& padded, int n) {
    const int p = static_cast<int>(padded.size());
    std::vector<cplx> out(n);
    if (p == n) {
        out = padded;
        return out;
    }
    const int half = n / 2;
    for (int k = 0; k < half; ++k) out[k] = padded[k];
    for (int k = half + 1; k < n; ++k) out[k] = padded[p - n + k];
    out[half] = padded[half] + padded[p - half];
    return out;
}

std::vector<double> physical(const std::vector<cplx>& coeff, double length) {
    std::vector<cplx> tmp;
    dft_backward(coeff, tmp);
    std::vector<double> out(coeff.size());
    const double w = 1.0 / length;
    for (size_t m = 0; m < out.size(); ++m) out[m] = tmp[m].real() * w;
    return out;
}

}  // namespace detail

GridPtr make_grid(double length, int num_modes) {
    if (!(length > 0.0)) throw std::invalid_argument("grid length must be positive");
    if (num_modes < 8 || num_modes % 2 != 0)
        throw std::invalid_argument("num_modes must be even and at least 8");
    auto grid = std::make_shared<Grid>();
    grid->length = length;
    grid->num_modes = num_modes;
    grid->xi.resize(num_modes);
    const double dxi = 2.0 * std::numbers::pi / length;
    for (int k = 0; k < num_modes; ++k) grid->xi[k] = dxi * grid->mode_of(k);
    return grid;
}

SpectralField zero_field(GridPtr grid) {
    const int n = grid ? grid->num_modes : 0;
    return SpectralField{std::move(grid), std::vector<cplx>(static_cast<size_t>(n))};
}

SpectralField forward_transform(const std::vector<double>& samples, GridPtr grid) {
    if (!grid || static_cast<int>(samples.size()) != grid->num_modes)
        throw std::invalid_argument("sample count does not match grid");
    std::vector<cplx> in(samples.begin(), samples.end());
    SpectralField field{grid, {}};
    detail::dft_forward(in, field.coeff);
    const double dx = grid->dx();
    for (auto& c : field.coeff) c *= dx;
    return field;
}

std::vector<double> inverse_transform(const SpectralField& field) {
    return detail::physical(field.coeff, field.grid->length);
}

void enforce_hermitian(SpectralField& field) {
    const int n = field.size();
    auto& c = field.coeff;
    c[0] = cplx{c[0].real(), 0.0};
    c[n / 2] = cplx{c[n / 2].real(), 0.0};
    for (int k = 1; k < n / 2; ++k) {
        const cplx avg = 0.5 * (c[k] + std::conj(c[n - k]));
        c[k] = avg;
        c[n - k] = std::conj(avg);
    }
}

double hermitian_defect(const SpectralField& field) {
    const int n = field.size();
    const auto& c = field.coeff;
    double defect = std::abs(c[0].imag()) + std::abs(c[n / 2].imag());
    for (int k = 1; k < n / 2; ++k) defect = std::max(defect, std::abs(c[k] - std::conj(c[n - k])));
    return defect;
}

SpectralField linear_propagate(const SpectralField& field, double t) {
    SpectralField out = field;
    const auto& xi = field.grid->xi;
    for (int k = 0; k < out.size(); ++k) {
        const double phase = xi[k] * xi[k] * xi[k] * t;
        out.coeff[k] *= cplx{std::cos(phase), std::sin(phase)};
    }
    enforce_hermitian(out);
    return out;
}

namespace {

// Mean of f over the 32-point circle |z - z0| = 1; for entire f this equals
// f(z0) to far below double precision while never dividing by a tiny z.
template <typename F>
cplx contour_mean(cplx z0, F f) {
    constexpr int points = 32;
    cplx sum{0.0, 0.0};
    for (int m = 1; m <= points; ++m) {
        const double theta = std::numbers::pi * (m - 0.5) / points;
        sum += f(z0 + cplx{std::cos(theta), std::sin(theta)});
    }
    return sum / static_cast<double>(points);
}

bool all_finite(const std::vector<cplx>& coeff) {
    for (const auto& c : coeff)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

double linf_bound(const std::vector<cplx>& coeff, double length) {
    double sum = 0.0;
    for (const auto& c : coeff) sum += std::abs(c);
    return sum / length;
}

double linf_exact(const std::vector<cplx>& coeff, double length) {
    const auto u = detail::physical(coeff, length);
    double peak = 0.0;
    for (double v : u) peak = std::max(peak, std::abs(v));
    return peak;
}

}  // namespace

Etdrk4Stepper::Etdrk4Stepper(GridPtr grid, StepperConfig config)
    : grid_(std::move(grid)), config_(config) {
    if (!(config_.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (config_.dealias_pad_factor < 3)
        throw std::invalid_argument("dealias_pad_factor must be at least 3");
    const int n = grid_->num_modes;
    padded_modes_ = config_.dealias_pad_factor * n;
    e_full_.resize(n);
    e_half_.resize(n);
    q_.resize(n);
    f1_.resize(n);
    f2_.resize(n);
    f3_.resize(n);
    deriv_.resize(n);
    const double h = config_.dt;
    for (int k = 0; k < n; ++k) {
        const double xi = grid_->xi[k];
        const cplx hl = cplx{0.0, h * xi * xi * xi};
        e_full_[k] = std::exp(hl);
        e_half_[k] = std::exp(0.5 * hl);
        q_[k] = h * contour_mean(hl, [](cplx z) { return (std::exp(0.5 * z) - 1.0) / z; });
        f1_[k] = h * contour_mean(hl, [](cplx z) {
            return (-4.0 - z + std::exp(z) * (4.0 - 3.0 * z + z * z)) / (z * z * z);
        });
        f2_[k] = h * contour_mean(hl, [](cplx z) {
            return (2.0 + z + std::exp(z) * (-2.0 + z)) / (z * z * z);
        });
        f3_[k] = h * contour_mean(hl, [](cplx z) {
            return (-4.0 - 3.0 * z - z * z + std::exp(z) * (4.0 - z)) / (z * z * z);
        });
        deriv_[k] = cplx{0.0, -xi};
    }
    deriv_[n / 2] = cplx{0.0, 0.0};
}

std::vector<cplx> Etdrk4Stepper::nonlinear(const std::vector<cplx>& coeff) const {
    const int n = grid_->num_modes;
    std::vector<cplx> out(n, cplx{0.0, 0.0});
    if (!config_.nonlinearity_enabled) return out;
    auto big = detail::pad_embed(coeff, padded_modes_);
    std::vector<cplx> big_phys;
    detail::dft_backward(big, big_phys);
    const double inv_l = 1.0 / grid_->length;
    for (auto& v : big_phys) {
        const double u = v.real() * inv_l;
        const double u2 = u * u;
        v = cplx{u2 * u2 * u, 0.0};
    }
    std::vector<cplx> big_hat;
    detail::dft_forward(big_phys, big_hat);
    const double w = grid_->length / padded_modes_;
    for (auto& v : big_hat) v *= w;
    auto truncated = detail::pad_extract(big_hat, n);
    for (int k = 0; k < n; ++k) out[k] = deriv_[k] * truncated[k];
    return out;
}

SpectralField Etdrk4Stepper::step(const SpectralField& state) const {
    if (!state.grid->same_as(*grid_)) throw std::invalid_argument("stepper grid mismatch");
    const int n = grid_->num_modes;
    const auto& v = state.coeff;
    const auto nv = nonlinear(v);
    std::vector<cplx> a(n), b(n), c(n);
    for (int k = 0; k < n; ++k) a[k] = e_half_[k] * v[k] + q_[k] * nv[k];
    const auto na = nonlinear(a);
    for (int k = 0; k < n; ++k) b[k] = e_half_[k] * v[k] + q_[k] * na[k];
    const auto nb = nonlinear(b);
    for (int k = 0; k < n; ++k) c[k] = e_half_[k] * a[k] + q_[k] * (2.0 * nb[k] - nv[k]);
    const auto nc = nonlinear(c);
    SpectralField out{state.grid, std::vector<cplx>(n)};
    for (int k = 0; k < n; ++k)
        out.coeff[k] = e_full_[k] * v[k] + f1_[k] * nv[k] + 2.0 * f2_[k] * (na[k] + nb[k]) +
                       f3_[k] * nc[k];
    enforce_hermitian(out);
    if (!all_finite(out.coeff)) throw divergence_error("non-finite state after step");
    return out;
}

SpectralField step(const SpectralField& state, const StepperConfig& config) {
    return Etdrk4Stepper(state.grid, config).step(state);
}

Trajectory evolve(const SpectralField& state, double T, const StepperConfig& config,
                  int sample_every) {
    if (T < 0.0) throw std::invalid_argument("T must be nonnegative");
    if (sample_every < 1) throw std::invalid_argument("sample_every must be positive");
    Trajectory traj;
    traj.config = config;
    traj.times.push_back(0.0);
    traj.states.push_back(state);
    const auto steps = static_cast<long long>(std::llround(T / config.dt));
    if (steps == 0) return traj;
    Etdrk4Stepper stepper(state.grid, config);
    const double initial_linf = linf_exact(state.coeff, state.grid->length);
    const double limit = config.blowup_factor * std::max(initial_linf, 1e-300);
    SpectralField current = state;
    for (long long i = 1; i <= steps; ++i) {
        try {
            current = stepper.step(current);
        } catch (const divergence_error&) {
            traj.diverged = true;
            return traj;
        }
        // Cheap sufficient bound first; the exact check needs a transform.
        if (linf_bound(current.coeff, state.grid->length) > limit &&
            linf_exact(current.coeff, state.grid->length) > limit) {
            traj.diverged = true;
            traj.times.push_back(i * config.dt);
            traj.states.push_back(current);
            return traj;
        }
        if (i % sample_every == 0 || i == steps) {
            traj.times.push_back(i * config.dt);
            traj.states.push_back(current);
        }
    }
    return traj;
}

}  // namespace gkdv
