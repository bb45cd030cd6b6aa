#pragma once

#include <cstdint>

#include "gkdv/spectral_core.hpp"

namespace gkdv {

// Modes j with band_min <= j <= band_max receive random coefficients
// (0 < band_min allowed to force mean-zero fields; band_max < n/2 required).
struct BandSpec {
    int band_min = 1;
    int band_max = 8;
};

// Seeded Hermitian random field. Algorithm (documented so other
// implementations can match the statistics): an mt19937_64 engine seeded with
// `seed` produces uniform doubles u = (next() >> 11) * 2^-53; Box-Muller pairs
// z = sqrt(-2 ln(1-u1)) * {cos, sin}(2 pi u2) give standard normals. Modes are
// visited in ascending j; mode j > 0 gets coefficient (z1 + i z2) / sqrt(2),
// mode 0 (if in band) gets z1; negative modes mirror by conjugation. Each
// coefficient is scaled so the expected L2 norm of the field is `amplitude`.
SpectralField random_band_field(GridPtr grid, BandSpec band, double amplitude,
                                std::uint64_t seed);

// Same field rescaled to an exact L2 norm.
SpectralField random_band_field_with_norm(GridPtr grid, BandSpec band, double l2_norm,
                                          std::uint64_t seed);

}  // namespace gkdv
