#pragma once

// Contact (GP) and scaled-potential (BBGKY) collision operators.
//
// Delta contraction carries no 1/h^d factor: B+_{j;k+1} gamma(x; x') =
// gamma(x, x_j; x', x_j). With the integral as h^d times a grid sum and the
// delta as grid mass / h^d the two factors cancel.

#include <string>
#include <vector>

#include "hlab/marginals.hpp"

namespace hlab {

enum class Side { plus, minus };

/// Scaled two-body potential V_N(x) = N^{d beta} V(N^beta x) on the grid.
struct PotentialSpec {
  Field profile;
  double beta = 0.2;
  long bigN = 1;
  /// Quadrature mass of the profile, the GP coupling constant.
  double kappa0 = 1.0;
  Field realized;
  /// Continuum-normalized spectrum of `realized` in DFT order.
  std::vector<cplx> spectrum;
  /// Empty when the scaled profile is resolved by the grid.
  std::string warning;
};

/// Built-in profiles: "gaussian" exp(-|x|^2 / (2 w^2)), "bump"
/// exp(-1 / (1 - |x|^2 / w^2)) on |x| < w, "delta" (grid mass at the origin),
/// "zero". All but "zero" are normalized to unit quadrature mass.
Field make_profile(const GridSpec& grid, const std::string& name, double width);

/// Spectral realization: the sampled profile's Fourier series V^(u) is
/// evaluated at u = xi / N^beta on the grid frequencies and transformed back.
/// Mass is preserved exactly, and N = 1 reproduces the profile.
PotentialSpec realize_potential(const Field& profile, double beta, long bigN, double width_hint = 0.0);

/// Convenience: profile by name, then realize.
PotentialSpec make_potential(const GridSpec& grid, const std::string& name, double width, double beta, long bigN);

/// B^{+/-}_{j;k+1} gamma^(k+1), j is 1-based.
Marginal gp_collision(const Marginal& next, int j, Side side);
/// sum_j (B+_{j;k+1} - B-_{j;k+1}) gamma^(k+1).
Marginal gp_collision_total(const Marginal& next);
/// Component k = kappa0 sum_j (B+ - B-) gamma^(k+1); gamma^(K+1) taken as 0.
HierarchyState gp_collision_sum(const HierarchyState& G, double kappa0 = 1.0);

/// B^{+/-,main}_{N;j;k+1}: h^d sum_y V_N(x_j - y) gamma(x, y; x', y) with x'_j
/// in place of x_j for the minus side.
Marginal bbgky_collision_main(const Marginal& next, int j, Side side, const PotentialSpec& V);
/// ((N - k) / N) sum_j B^{side,main}_{N;j;k+1}.
Marginal bbgky_main_weighted(const Marginal& next, Side side, const PotentialSpec& V);
/// B^{+/-,error}_{N;i,j;k}: pointwise multiplication by V_N(x_i - x_j) (or the
/// primed pair). Requires 1 <= i < j <= k.
Marginal bbgky_collision_error(const Marginal& g, int i, int j, Side side, const PotentialSpec& V);
/// (B_N Gamma)^(k) = B^main_{N;k+1} gamma^(k+1) + B^error_{N;k} gamma^(k) for
/// k <= N, zero above N; gamma^(K+1) taken as 0.
HierarchyState bbgky_rhs(const HierarchyState& G, const PotentialSpec& V);

/// Momentum-space evaluation of B^{+,main}_{N;1;k+1} U^(k+1)(t) gamma0, or of
/// B+_{1;k+1} U(t) gamma0 when V is absent.
Marginal collision_fourier_oracle(const Marginal& gamma0, double t, const PotentialSpec* V);

}  // namespace hlab
