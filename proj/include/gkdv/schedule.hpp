#pragma once

#include <cstdint>
#include <vector>

#include "gkdv/energetics.hpp"
#include "gkdv/spectral_core.hpp"
#include "gkdv/symbol_ops.hpp"

namespace gkdv {

// Knobs shared by the schedule formulas. epsilon stands in for every
// arbitrarily-small exponent correction; delta_constant calibrates the local
// window (the analysis fixes only the exponent, so the constant is pinned
// empirically by the experiments); lambda_margin keeps the rescaled data
// strictly inside the smallness region.
struct ScheduleTuning {
    double epsilon = 0.01;
    double delta_constant = 1.0;
    double lambda_margin = 0.05;
};

// The a-priori iteration schedule: rescale by lambda, advance in M local
// windows of length at most delta (rescaled time) until lambda^3 T_target.
struct SchedulePlan {
    double s = 0.7;
    double N = 16.0;
    double lambda = 1.0;
    double delta = 0.0;
    long long iterations = 0;
    double T_target = 0.0;
};

// u_lambda(x) = lambda^{-1/2} u(x / lambda) on the torus stretched to
// lambda * L. In coefficients this is an exact relabeling: mode j keeps its
// index and gains a factor sqrt(lambda), so the L2 norm is exactly invariant
// and homogeneous Sobolev norms scale by exactly lambda^{-s0}. The source
// Nyquist mode cannot ride along (its conjugate partner leaves the grid); a
// relative content above 1e-13 there throws, below it is dropped.
SpectralField rescale(const SpectralField& field, double lambda);
SpectralField rescale(const SpectralField& field, double lambda, GridPtr target);

// Smallest lambda with (N^{1-s} / lambda^s) * norm < 1, padded by
// lambda_margin and clamped to >= 1:
// lambda = max(1, (1 + margin) * N^{(1-s)/s} * norm^{1/s}).
// s = 1 is admitted for control runs (the N dependence drops out).
double select_lambda(double s, double N, double u0_hs_norm,
                     const ScheduleTuning& tuning = {});

// Local window delta = delta_constant * norm^{-8 / (1 - 2 epsilon)}, where
// norm is || I u0 ||_{H^1} of the rescaled data (operational stand-in for the
// space-time norm the local theory controls).
double local_step_budget(double iu0_h1_norm, const ScheduleTuning& tuning = {});

// Smallest power of 2 with N^{(5s-3)/s - epsilon} > T. Requires the exponent
// to be positive, i.e. s above the 3/5 threshold with room for epsilon.
double select_N(double T, double s, const ScheduleTuning& tuning = {});

// Lowest regularity reachable when the almost-conservation decay rate is
// N^{-alpha}: s_min = 3 / (alpha + 3).
double regularity_threshold(double alpha);

struct IncrementRecord {
    double N = 0.0;
    double s = 0.7;
    double lambda = 1.0;
    double delta = 0.0;
    long long steps = 0;
    double e1_before = 0.0;
    double e1_after = 0.0;
    double increment = 0.0;     // |e1_after - e1_before|
    double energy_drift = 0.0;  // |E after - E before| on the same window:
                                // the integrator floor this record sits on
    double iu_h1_sup = 0.0;     // sup over the window of ||I u(t)||_{H^1}
    bool diverged = false;
};

struct AlmostConservationResult {
    std::vector<IncrementRecord> records;
    double slope = 0.0;  // least-squares slope of log2 increment vs log2 N
    bool any_diverged = false;
};

// For each N: select lambda, rescale u0, run one local window delta from
// local_step_budget (delta covered exactly by ceil(delta/dt) equal steps),
// and record the E^1 increment together with the raw energy drift of the very
// same trajectory. With s = 1 the multiplier is identity, so the increment
// equals the energy drift by construction (the control experiment).
AlmostConservationResult almost_conservation_experiment(const SpectralField& u0, double s,
                                                        const std::vector<double>& n_list,
                                                        const StepperConfig& base_config,
                                                        const ScheduleTuning& tuning = {});

struct GrowthReport {
    double exponent = 0.0;          // (1-s)/(5s-3) + epsilon
    double implied_constant = 0.0;  // sup_t ||u(t)||_{H^s}^2 / (1+t)^exponent
    double final_ratio = 0.0;
    std::vector<double> ratios;     // one per sample, time-ordered
    bool attained_early = false;    // sup reached in the first half of the run
};

// Ratio statistics against the polynomial growth envelope, from raw samples
// or from a stored trajectory.
GrowthReport growth_from_samples(const std::vector<double>& times,
                                 const std::vector<double>& hs_norms, double s,
                                 const ScheduleTuning& tuning = {});
GrowthReport growth_monitor(const Trajectory& traj, double s,
                            const ScheduleTuning& tuning = {});

struct BilinearProbeResult {
    double n1 = 0.0;
    double n2 = 0.0;
    double window = 0.0;  // time window actually integrated
    double ratio = 0.0;   // ||psi1 dx(psi2)||_{L2 x,t} / (||psi1|| ||psi2||)
    bool hypothesis_ok = false;
};

// Frequency-separated bilinear smoothing probe. psi1, psi2 are seeded unit-L2
// fields on the positive-mode bands [n1, 2 n1), [n2, 2 n2) mirrored to real
// fields; both ride the free Airy flow and the space-time integral is taken
// in closed form over [window_start, window_start + window] (pairwise phases
// integrate exactly, so no time stepping is involved). window <= 0 selects
// one interaction passage, L / (3 ((2 n2)^2 - n1^2)), which keeps torus
// re-collisions from accumulating and makes the ratio comparable across n2.
// The separation hypothesis n2 >= 4 n1 is enforced unless enforce_hypothesis
// is false (contrast runs report the unprotected ratio).
BilinearProbeResult bilinear_probe(GridPtr grid, double n1, double n2, double window,
                                   std::uint64_t seed, double window_start = 0.0,
                                   bool enforce_hypothesis = true);

struct ContinuationSnapshot {
    double t_rescaled = 0.0;
    double t_original = 0.0;  // t_rescaled / lambda^3
    double mass = 0.0;
    double energy = 0.0;
    double e1 = 0.0;
    double undone_hs_norm = 0.0;  // H^s norm of the unrescaled solution
    double linf = 0.0;
};

struct ContinuationResult {
    SchedulePlan plan;
    std::vector<ContinuationSnapshot> snapshots;
    double e1_initial = 0.0;
    double e1_final = 0.0;
    bool budget_exhausted = false;  // E^1 left (0, 2 x initial]: iteration stopped
    bool diverged = false;
    GrowthReport growth;  // over (t_original, undone_hs_norm)
};

// The full iteration: select_N for the horizon, select_lambda, rescale once,
// then march local windows (each sized by the current ||I u||_{H^1} budget)
// until rescaled time lambda^3 T_target, recording snapshots and stopping
// early if E^1 exceeds twice its initial value or the run diverges.
// plan.delta reports the largest window used, so iterations * delta covers
// the rescaled horizon whenever the run completes.
ContinuationResult global_continuation(const SpectralField& u0, double s, double T_target,
                                       const StepperConfig& base_config,
                                       const ScheduleTuning& tuning = {},
                                       int snapshots_per_window = 4);

}  // namespace gkdv
