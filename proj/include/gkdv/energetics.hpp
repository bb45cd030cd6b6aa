#pragma once

#include "gkdv/spectral_core.hpp"
#include "gkdv/symbol_ops.hpp"

namespace gkdv {

// Solitary wave Q_c(x - center) with Q_c(y) = [3c sech^2(2 sqrt(c) y)]^{1/4}.
struct SolitonSpec {
    double c = 1.0;
    double center = 0.0;
    GridPtr grid;
};

struct EnergySnapshot {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double modified_energy_1 = 0.0;
    double hs_norm = 0.0;
    double linf = 0.0;
};

// L2 norm of the field (the conserved mass functional).
double mass(const SpectralField& field);

// (1/2)||u_x||_2^2 - (1/6) int u^6. The sextic term is integrated on a 4x
// refined grid, which makes the quadrature exact for any field on the grid
// (degree 3n < 4n), so energy identities hold to roundoff for band-limited data.
double energy(const SpectralField& field);

// kinetic + |potential| at the given state: the natural magnitude against
// which energy differences are measured when E itself nearly cancels.
double energy_scale(const SpectralField& field);

// Samples of the translated profile, transformed. Throws if the tail at the
// box boundary exceeds 1e-10 (profile does not fit).
SpectralField soliton_profile(const SolitonSpec& spec);

// ||Q||_{L2}: cached quadrature on a reference grid. Closed form of the square
// is sqrt(3) pi / 2, kept as an independent oracle in the tests.
double ground_state_mass();

// ||v||_{L6}^6 / (3 (||v||_2 / ||Q||_2)^4 ||v_x||_2^2); 1 is sharp (v = Q).
double gn_ratio(const SpectralField& field);

struct SmallnessReport {
    double ratio = 0.0;  // mass(u) / mass(Q)
    bool pass = false;   // strict inequality
};
SmallnessReport smallness_check(const SpectralField& field);

// E(I_N u).
double modified_energy_1(const SpectralField& field, const IMethodParams& params);

struct ModifiedEnergy2Report {
    double value = 0.0;
    long long singular_count = 0;       // tuples excluded by the resonance screen
    double max_excluded_numerator = 0;  // largest |sum m_j^2 xi_j^3| among them
};

// E^2 via direct hyperplane summation of the sextic term with the symbol
// M6 = (sum m_j^2 xi_j^3) / (sum xi_j^3). Tuples with all m_j = 1 have M6 = 1
// identically; elsewhere near-resonances |sum xi_j^3| < eps_den max |xi_j|^3
// are tallied and excluded (they can be genuinely singular).
ModifiedEnergy2Report modified_energy_2(const SpectralField& field,
                                        const IMethodParams& params,
                                        double eps_den = 1e-8);

EnergySnapshot snapshot(const SpectralField& field, double t, const IMethodParams& params,
                        double hs_exponent);

}  // namespace gkdv
