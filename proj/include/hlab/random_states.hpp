#pragma once

// Seeded random test data with smooth, low-mode spectra.

#include <cstdint>
#include <random>
#include <vector>

#include "hlab/marginals.hpp"
#include "hlab/mixture.hpp"

namespace hlab {

using Rng = std::mt19937_64;

/// Unit-norm one-particle field whose Fourier coefficients vanish outside
/// |m_a| <= max_mode on every axis and decay like exp(-decay |m|^2).
/// max_mode < 0 selects n / 4.
Field random_smooth_field(const GridSpec& grid, Rng& rng, int max_mode = -1, double decay = 0.25);

/// Random weights (Dirichlet-like) over `atoms` random smooth fields. Ball
/// support scales each atom by a random factor in [0.5, 1].
Mixture random_mixture(const GridSpec& grid, int atoms, Rng& rng, Support support = Support::sphere,
                       int max_mode = -1);

/// Random smooth kernel with no symmetry, each slot low-mode.
Marginal random_kernel(const GridSpec& grid, int k, Rng& rng, int max_mode = -1);

/// Random Hermitian, permutation-symmetric kernel: sum_a c_a (|f_a><f_a|)^{(x)k}
/// with real c_a of either sign.
Marginal random_symmetric_kernel(const GridSpec& grid, int k, Rng& rng, int terms = 3);

}  // namespace hlab
