#pragma once

#include <vector>

#include "gkdv/spectral_core.hpp"

// Internal FFT plumbing shared by the stepper and the multilinear fast path.
// All transforms are unnormalized DFTs in FFT index order; callers apply the
// dx / (1/L) weights of the continuum convention themselves.

namespace gkdv::detail {

void dft_forward(const std::vector<cplx>& in, std::vector<cplx>& out);
void dft_backward(const std::vector<cplx>& in, std::vector<cplx>& out);

// Copies n coefficients (FFT order) into a length-p array (p >= n), splitting
// the source Nyquist coefficient across +-n/2 so the padded spectrum stays
// Hermitian. pad_extract is its adjoint (sums +-n/2 back into the Nyquist slot).
std::vector<cplx> pad_embed(const std::vector<cplx>& coeff, int p);
std::vector<cplx> pad_extract(const std::vector<cplx>& padded, int n);

// Physical samples of a Hermitian coefficient array on its own grid size,
// with the 1/L inverse weight applied.
std::vector<double> physical(const std::vector<cplx>& coeff, double length);

}  // namespace gkdv::detail
