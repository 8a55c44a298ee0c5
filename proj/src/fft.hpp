#pragma once

// Thin FFTW wrapper: in-place, unnormalized multi-axis transforms of a dense
// row-major tensor whose axes all have length n.

#include <span>

#include "hlab/common.hpp"

namespace hlab::detail {

/// Transforms `data` (total_axes axes of length n, row-major) along the axes
/// listed in `axes`. sign = -1 is the forward kernel exp(-i k x), +1 the
/// backward one. No normalization is applied.
void fft_axes(std::span<cplx> data, int total_axes, int n, std::span<const int> axes, int sign);

}  // namespace hlab::detail
