#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gkdv/spectral_core.hpp"
#include "gkdv/symbol_ops.hpp"

namespace gkdv {

// n-multiplier on the hyperplane Gamma_n = {sum xi_i = 0}. When the symbol
// factorizes as prod_i factors[i](xi_i), the fast physical-space path applies;
// otherwise evaluation goes through `eval` under direct summation.
struct MultilinearSymbol {
    int arity = 2;
    std::function<cplx(std::span<const double>)> eval;
    std::vector<std::function<cplx(double)>> factors;
    bool symmetric = false;
};

MultilinearSymbol constant_symbol(int arity, cplx value = {1.0, 0.0});

// Lambda_n(M; f_1..f_n) = (2 pi)^{1-n} dxi^{n-1} sum over grid tuples with
// sum xi = 0 of M(xi) prod f_hat_i(xi_i). Fields must share one grid.
// The direct path bounds the total tuple count, the product of the fields'
// effective supports, by a work guard. The factored path evaluates
// int prod_i (sigma_i(D) f_i)(x) dx on a grid padded past arity * n / 2,
// which equals the direct sum exactly.
cplx lambda_n(const MultilinearSymbol& symbol,
              const std::vector<const SpectralField*>& fields);
cplx lambda_n_direct(const MultilinearSymbol& symbol,
                     const std::vector<const SpectralField*>& fields);
cplx lambda_n_factored(const MultilinearSymbol& symbol,
                       const std::vector<const SpectralField*>& fields);

// Convenience for the common all-same-field case.
cplx lambda_n(const MultilinearSymbol& symbol, const SpectralField& field);

struct DerivationLawResidual {
    double residual = 0.0;      // |FD - RHS| / scale
    double fd_value = 0.0;      // centered finite difference of Lambda_2(M2)
    double rhs_value = 0.0;     // Lambda_2(M2 alpha_2) + quintic correction
    double correction = 0.0;    // the Lambda_6 term alone
};

// Checks d/dt Lambda_2(M2) = Lambda_2(M2 alpha_2)
//        - 2i Lambda_6(M2(xi_1, xi_2+..+xi_6) (xi_2+..+xi_6))
// along a stored trajectory at interior sample t_index, with the time
// derivative replaced by the centered difference of neighbouring samples.
// On Gamma_6 the correction symbol collapses to 2i xi_1 M2(xi_1, -xi_1),
// which factorizes, so no direct six-fold sum is needed.
DerivationLawResidual derivation_law_residual(const MultilinearSymbol& m2,
                                              const Trajectory& traj, int t_index);

struct CounterexampleTuple {
    double k = 0.0;
    double s = 0.7;
    double N = 1.0;
};

struct CounterexampleReport {
    double k = 0.0;             // inputs echoed back
    double s = 0.7;
    double N = 1.0;
    double sum_rel = 0.0;       // |sum xi| / k
    double cube_sum_rel = 0.0;  // |sum xi^3| / k^3
    double numerator = 0.0;     // sum m_j^2 xi_j^3
    double bracket = 0.0;       // numerator / (k^{1+2s} N^{2(1-s)})
    bool sums_vanish = false;   // both to 1e-12 relative
};

// The six frequencies (-k, -k, -8k, (5 + 2 sqrt(55)/5) k, (5 - 2 sqrt(55)/5) k, 0)
// annihilate both sum xi and sum xi^3 while keeping sum m_j^2 xi_j^3 away from
// zero. Evaluated in 100-digit floats so the cancellations are exact algebra,
// not float luck. Requires k >= 100 N (all nonzero entries on the outer branch).
CounterexampleReport counterexample_verify(const CounterexampleTuple& tuple);

struct IdentityReport {
    double max_residual_3 = 0.0;  // xi1^3+xi2^3+xi3^3 = 3 xi1 xi2 xi3 on sum = 0
    double max_residual_4 = 0.0;  // sum xi^3 = 3 (xi1+xi2)(xi1+xi3)(xi1+xi4) on sum = 0
    int samples = 0;
};

IdentityReport af_identities_check(int samples, std::uint64_t seed);

// 1 - m(xi_2+..+xi_6) / (m(xi_2) .. m(xi_6)).
double commutator_symbol(const IMethodParams& params, std::span<const double, 5> xi);

enum class ProbeRegime {
    case_a,  // N2 >~ N >> N3 >= .. >= N6: bound N3 / N2
    case_b,  // N2 >> N3 >~ N:            bound m(xi_1) / (m(xi_2) .. m(xi_6))
};

struct ProbeReport {
    double max_ratio = 0.0;  // max |symbol| / bound over the sample set
    double worst_xi[5] = {0, 0, 0, 0, 0};
    int samples = 0;
    bool within = false;  // max_ratio <= probe_constant
};

// Samples dyadic frequency tuples respecting the regime ordering and compares
// |commutator_symbol| against the regime's bound, which holds up to an
// absolute constant; probed here against probe_constant = 10.
ProbeReport symbol_bound_probe(const IMethodParams& params, ProbeRegime regime,
                               int samples, std::uint64_t seed,
                               double probe_constant = 10.0);

}  // namespace gkdv
