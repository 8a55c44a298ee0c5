#pragma once

// Iterated Duhamel terms built on B^main_N, and the Picard fixed point of
//   Theta(t) = Xi(t) + i int_0^t B_N U(t - s) Theta(s) ds.

#include <functional>
#include <vector>

#include "hlab/hierarchy.hpp"

namespace hlab {

/// Xi as a function of time.
using StateSeries = std::function<HierarchyState(double)>;

/// (B^main_N)_{k+1} = ((N - k) / N) sum_j (B+ - B-)^main_{N;j;k+1}.
Marginal bbgky_main_total(const Marginal& next, const PotentialSpec& V);

/// Duh_j(Xi)^(k)(t) for every k with k + j <= Xi.K, by nested composite
/// trapezoid rules on `steps` equal subintervals of [0, t]. Duh_0 = Xi(t).
HierarchyState duhamel_iterate(const StateSeries& xi, int j, const PotentialSpec& V, double t, int steps = 32);

struct PicardResult {
  /// Theta at t_m = m dt, m = 0..M.
  std::vector<HierarchyState> theta;
  /// H^1_xi distance between successive iterates (max over nodes).
  std::vector<double> distances;
  /// distances[i] / distances[i-1].
  std::vector<double> ratios;
  int iterations = 0;
  bool converged = false;
};

/// Picard iteration on the time grid of `xi_nodes` (spacing dt). The time
/// integral treats Theta as piecewise linear and is done exactly per Fourier
/// mode. Stops when the distance falls below `tol` or after `max_iter`
/// iterations; throws NumericalFailure when the ratio stays >= 1 for three
/// consecutive iterations. Requires T = dt * M < T0(xi).
PicardResult picard_fixed_point(const std::vector<HierarchyState>& xi_nodes, double dt, const PotentialSpec& V,
                                const EvolutionConfig& config, double tol = 1e-8, int max_iter = 50);

/// Independent check: max over nodes of the H^1_xi norm of
/// Theta - Xi - i int B_N U(t - s) Theta(s) ds, with the integral done by
/// 5-point Gauss-Legendre per subinterval in position space, relative to
/// max ||Theta||.
double picard_residual(const std::vector<HierarchyState>& theta, const std::vector<HierarchyState>& xi_nodes,
                       double dt, const PotentialSpec& V, double xi);

}  // namespace hlab
