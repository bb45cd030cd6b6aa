#include "gkdv/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "gkdv/random_fields.hpp"

namespace gkdv {

namespace {

constexpr double nyquist_tolerance = 1e-13;

double cube(double x) { return x * x * x; }

// H^s norm of the unrescaled solution read off the rescaled coefficients:
// undoing u_lambda(x) = lambda^{-1/2} u(x/lambda) turns the weight into
// (1 + lambda |xi|)^s while every explicit lambda factor cancels.
double undone_hs_norm(const SpectralField& field, double lambda, double s) {
    const auto& grid = *field.grid;
    double sum = 0.0;
    for (int k = 0; k < field.size(); ++k) {
        const double w = std::pow(1.0 + lambda * std::abs(grid.xi[k]), 2.0 * s);
        sum += w * std::norm(field.coeff[k]);
    }
    return std::sqrt(sum * grid.dxi() / (2.0 * std::numbers::pi));
}

}  // namespace

SpectralField rescale(const SpectralField& field, double lambda, GridPtr target) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!target) throw std::invalid_argument("target grid required");
    const auto& src = *field.grid;
    if (std::abs(target->length - lambda * src.length) >
        1e-9 * std::max(1.0, lambda * src.length))
        throw std::invalid_argument("target grid length must be lambda times the source length");
    if (target->num_modes < src.num_modes)
        throw std::invalid_argument("target grid must hold every source mode");

    const int n = src.num_modes;
    const int p = target->num_modes;
    double top = 0.0;
    for (const auto& c : field.coeff) top = std::max(top, std::abs(c));
    if (p > n && std::abs(field.coeff[n / 2]) > nyquist_tolerance * top)
        throw std::domain_error(
            "resolution loss: the source Nyquist mode is occupied and cannot be relabeled");

    const double root = std::sqrt(lambda);
    SpectralField out = zero_field(std::move(target));
    for (int k = 0; k < n / 2; ++k) out.coeff[k] = field.coeff[k] * root;
    for (int k = n / 2 + 1; k < n; ++k) out.coeff[p - n + k] = field.coeff[k] * root;
    if (p == n) out.coeff[n / 2] = field.coeff[n / 2] * root;
    return out;
}

SpectralField rescale(const SpectralField& field, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (lambda == 1.0) return field;
    const auto& src = *field.grid;
    const double factor = lambda > 1.0 ? std::exp2(std::ceil(std::log2(lambda))) : 1.0;
    const int target_n = static_cast<int>(std::llround(src.num_modes * factor));
    return rescale(field, lambda, make_grid(src.length * lambda, target_n));
}

double select_lambda(double s, double N, double u0_hs_norm, const ScheduleTuning& tuning) {
    if (!(s > 0.5) || s > 1.0)
        throw std::invalid_argument("s must lie in (1/2, 1); s = 1 only for controls");
    if (!(N >= 1.0)) throw std::invalid_argument("N must be at least 1");
    if (!(u0_hs_norm >= 0.0)) throw std::invalid_argument("norm must be nonnegative");
    if (u0_hs_norm == 0.0) return 1.0;
    const double lam = (1.0 + tuning.lambda_margin) * std::pow(N, (1.0 - s) / s) *
                       std::pow(u0_hs_norm, 1.0 / s);
    return std::max(1.0, lam);
}

double local_step_budget(double iu0_h1_norm, const ScheduleTuning& tuning) {
    if (!(iu0_h1_norm > 0.0)) throw std::invalid_argument("norm must be positive");
    if (!(tuning.delta_constant > 0.0))
        throw std::invalid_argument("delta_constant must be positive");
    return tuning.delta_constant * std::pow(iu0_h1_norm, -8.0 / (1.0 - 2.0 * tuning.epsilon));
}

double select_N(double T, double s, const ScheduleTuning& tuning) {
    if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
    if (!(s > 0.6))
        throw std::invalid_argument("s must exceed 3/5 (the continuation exponent is "
                                    "nonpositive below the threshold)");
    const double exponent = (5.0 * s - 3.0) / s - tuning.epsilon;
    if (!(exponent > 0.0))
        throw std::invalid_argument("s too close to 3/5 for the configured epsilon");
    double N = 2.0;
    while (std::pow(N, exponent) <= T) {
        N *= 2.0;
        if (N > 0x1p40)
            throw std::runtime_error("select_N: horizon unreachable at this regularity");
    }
    return N;
}

double regularity_threshold(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    return 3.0 / (alpha + 3.0);
}

AlmostConservationResult almost_conservation_experiment(const SpectralField& u0, double s,
                                                        const std::vector<double>& n_list,
                                                        const StepperConfig& base_config,
                                                        const ScheduleTuning& tuning) {
    if (n_list.size() < 4)
        throw std::invalid_argument("n_list needs at least 4 dyadic entries");
    for (const double N : n_list)
        if (!(N >= 2.0) || std::exp2(std::round(std::log2(N))) != N)
            throw std::invalid_argument("n_list entries must be powers of 2");
    if (!smallness_check(u0).pass)
        throw std::invalid_argument("initial data must satisfy the mass smallness condition");

    AlmostConservationResult result;
    const double hs = sobolev_norm(u0, s, true);
    for (const double N : n_list) {
        IncrementRecord rec;
        rec.N = N;
        rec.s = s;
        const auto params = make_imethod_params(s, N);
        rec.lambda = select_lambda(s, N, hs, tuning);
        auto state = rescale(u0, rec.lambda);
        const double h1 = sobolev_norm(apply_I(state, params), 1.0);
        rec.delta = local_step_budget(h1, tuning);
        rec.steps = static_cast<long long>(std::ceil(rec.delta / base_config.dt));
        StepperConfig cfg = base_config;
        cfg.dt = rec.delta / static_cast<double>(rec.steps);  // cover delta exactly
        rec.e1_before = modified_energy_1(state, params);
        rec.iu_h1_sup = h1;
        const double e_before = energy(state);
        const double mass_before = mass(state);
        Etdrk4Stepper stepper(state.grid, cfg);
        for (long long i = 0; i < rec.steps; ++i) {
            try {
                state = stepper.step(state);
            } catch (const divergence_error&) {
                rec.diverged = true;
                break;
            }
            if (mass(state) > 1e3 * mass_before) {
                rec.diverged = true;
                break;
            }
            rec.iu_h1_sup =
                std::max(rec.iu_h1_sup, sobolev_norm(apply_I(state, params), 1.0));
        }
        if (rec.diverged) {
            result.any_diverged = true;
        } else {
            rec.e1_after = modified_energy_1(state, params);
            rec.increment = std::abs(rec.e1_after - rec.e1_before);
            rec.energy_drift = std::abs(energy(state) - e_before);
        }
        result.records.push_back(rec);
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (const auto& rec : result.records) {
        if (rec.diverged || rec.increment <= 0.0) continue;
        const double x = std::log2(rec.N);
        const double y = std::log2(rec.increment);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count >= 2) result.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return result;
}

GrowthReport growth_from_samples(const std::vector<double>& times,
                                 const std::vector<double>& hs_norms, double s,
                                 const ScheduleTuning& tuning) {
    if (times.size() != hs_norms.size() || times.empty())
        throw std::invalid_argument("times and norms must align and be nonempty");
    if (!(s > 0.6)) throw std::invalid_argument("s must exceed 3/5");
    GrowthReport report;
    report.exponent = (1.0 - s) / (5.0 * s - 3.0) + tuning.epsilon;
    report.ratios.reserve(times.size());
    size_t arg_max = 0;
    for (size_t i = 0; i < times.size(); ++i) {
        const double ratio =
            hs_norms[i] * hs_norms[i] / std::pow(1.0 + times[i], report.exponent);
        report.ratios.push_back(ratio);
        if (ratio > report.implied_constant) {
            report.implied_constant = ratio;
            arg_max = i;
        }
    }
    report.final_ratio = report.ratios.back();
    report.attained_early = times[arg_max] <= 0.5 * times.back();
    return report;
}

GrowthReport growth_monitor(const Trajectory& traj, double s, const ScheduleTuning& tuning) {
    std::vector<double> norms;
    norms.reserve(traj.states.size());
    for (const auto& state : traj.states) norms.push_back(sobolev_norm(state, s));
    return growth_from_samples(traj.times, norms, s, tuning);
}

BilinearProbeResult bilinear_probe(GridPtr grid, double n1, double n2, double window,
                                   std::uint64_t seed, double window_start,
                                   bool enforce_hypothesis) {
    if (!grid) throw std::invalid_argument("grid required");
    auto band_of = [](double v, const char* name) {
        const int b = static_cast<int>(v);
        if (!(v >= 1.0) || b != v || std::exp2(std::round(std::log2(v))) != v)
            throw std::invalid_argument(std::string(name) + " must be a dyadic mode count");
        return b;
    };
    const int b1 = band_of(n1, "n1");
    const int b2 = band_of(n2, "n2");
    if (2 * b2 - 1 >= grid->num_modes / 2)
        throw std::invalid_argument("band exceeds the grid; raise num_modes");

    BilinearProbeResult result;
    result.n1 = n1;
    result.n2 = n2;
    result.hypothesis_ok = n2 >= 4.0 * n1;
    if (enforce_hypothesis && !result.hypothesis_ok)
        throw std::invalid_argument(
            "bands violate the separation hypothesis (need n2 >= 4 n1)");

    const auto psi1 = random_band_field_with_norm(grid, {b1, 2 * b1 - 1}, 1.0, seed);
    const auto psi2 = random_band_field_with_norm(grid, {b2, 2 * b2 - 1}, 1.0,
                                                  seed + 0x9e3779b97f4a7c15ULL);
    const double length = grid->length;
    result.window =
        window > 0.0 ? window : length / (3.0 * (4.0 * n2 * n2 - n1 * n1));

    // Both fields ride the free flow, so each coefficient pair contributes a
    // pure phase e^{i t (xi1^3 + xi2^3)} and the window integral closes in
    // terms of Phi(w) = int e^{i t w} dt over [t0, t0 + Tw].
    struct Term {
        double omega;
        cplx amp;
    };
    std::map<int, std::vector<Term>> by_output_mode;
    const auto& g = *grid;
    for (int k1 = 0; k1 < g.num_modes; ++k1) {
        if (psi1.coeff[k1] == cplx{0.0, 0.0}) continue;
        const int m1 = g.mode_of(k1);
        const double xi1 = g.xi[k1];
        for (int k2 = 0; k2 < g.num_modes; ++k2) {
            if (psi2.coeff[k2] == cplx{0.0, 0.0}) continue;
            const int m2 = g.mode_of(k2);
            const double xi2 = g.xi[k2];
            by_output_mode[m1 + m2].push_back(
                {cube(xi1) + cube(xi2), psi1.coeff[k1] * cplx{0.0, xi2} * psi2.coeff[k2]});
        }
    }
    const double t0 = window_start;
    const double t1 = window_start + result.window;
    auto phase_integral = [t0, t1](double w) -> cplx {
        if (w == 0.0) return cplx{t1 - t0, 0.0};
        const cplx upper{std::cos(w * t1), std::sin(w * t1)};
        const cplx lower{std::cos(w * t0), std::sin(w * t0)};
        return (upper - lower) / cplx{0.0, w};
    };
    cplx total{0.0, 0.0};
    for (const auto& [mode, terms] : by_output_mode)
        for (const auto& p : terms)
            for (const auto& q : terms)
                total += p.amp * std::conj(q.amp) * phase_integral(p.omega - q.omega);
    const double norm_sq = total.real() / cube(length);
    result.ratio = std::sqrt(std::max(0.0, norm_sq));  // psi1, psi2 have unit L2 norm
    return result;
}

ContinuationResult global_continuation(const SpectralField& u0, double s, double T_target,
                                       const StepperConfig& base_config,
                                       const ScheduleTuning& tuning,
                                       int snapshots_per_window) {
    if (!(T_target > 0.0)) throw std::invalid_argument("T_target must be positive");
    if (snapshots_per_window < 1)
        throw std::invalid_argument("snapshots_per_window must be positive");
    if (!smallness_check(u0).pass)
        throw std::invalid_argument("initial data must satisfy the mass smallness condition");

    ContinuationResult result;
    const double N = select_N(T_target, s, tuning);
    const auto params = make_imethod_params(s, N);
    const double lambda = select_lambda(s, N, sobolev_norm(u0, s, true), tuning);
    auto state = rescale(u0, lambda);
    const double horizon = cube(lambda) * T_target;
    result.plan.s = s;
    result.plan.N = N;
    result.plan.lambda = lambda;
    result.plan.T_target = T_target;
    result.e1_initial = modified_energy_1(state, params);

    auto record = [&](double t_now, const SpectralField& field) {
        ContinuationSnapshot snap;
        snap.t_rescaled = t_now;
        snap.t_original = t_now / cube(lambda);
        snap.mass = mass(field);
        snap.energy = energy(field);
        snap.e1 = modified_energy_1(field, params);
        snap.undone_hs_norm = undone_hs_norm(field, lambda, s);
        snap.linf = lebesgue_norm(field, std::numeric_limits<double>::infinity());
        result.snapshots.push_back(snap);
    };
    record(0.0, state);

    double t = 0.0;
    double max_window = 0.0;
    long long iterations = 0;
    bool stopped = false;
    while (!stopped && t < horizon * (1.0 - 1e-12)) {
        const double budget =
            local_step_budget(sobolev_norm(apply_I(state, params), 1.0), tuning);
        const double window = std::min(budget, horizon - t);
        max_window = std::max(max_window, window);
        const auto steps =
            std::max<long long>(1, static_cast<long long>(std::ceil(window / base_config.dt)));
        StepperConfig cfg = base_config;
        cfg.dt = window / static_cast<double>(steps);
        Etdrk4Stepper stepper(state.grid, cfg);
        const long long stride = std::max<long long>(1, steps / snapshots_per_window);
        for (long long i = 1; i <= steps; ++i) {
            try {
                state = stepper.step(state);
            } catch (const divergence_error&) {
                result.diverged = true;
                stopped = true;
                break;
            }
            if (i % stride == 0 || i == steps) record(t + static_cast<double>(i) * cfg.dt, state);
        }
        if (stopped) break;
        t += window;
        ++iterations;
        if (result.snapshots.back().e1 > 2.0 * result.e1_initial) {
            result.budget_exhausted = true;  // almost-conservation budget spent
            stopped = true;
        }
    }
    result.plan.iterations = iterations;
    result.plan.delta = max_window;
    result.e1_final = result.snapshots.back().e1;

    std::vector<double> times, norms;
    times.reserve(result.snapshots.size());
    norms.reserve(result.snapshots.size());
    for (const auto& snap : result.snapshots) {
        times.push_back(snap.t_original);
        norms.push_back(snap.undone_hs_norm);
    }
    result.growth = growth_from_samples(times, norms, s, tuning);
    return result;
}

}  // namespace gkdv
