#pragma once

// Time stepping of truncated GP and BBGKY hierarchies.
//
// Both hierarchies are integrated in the form
//   d/dt gamma^(k) = i Delta_pm gamma^(k) - i (collision term)^(k),
// i.e. i d/dt gamma = [-Delta, gamma] + B gamma, the sign under which factorized
// solutions are tensor powers of the defocusing NLS i dphi/dt = -Delta phi + |phi|^2 phi.

#include <functional>
#include <optional>
#include <vector>

#include "hlab/interactions.hpp"
#include "hlab/mixture.hpp"

namespace hlab {

enum class StepMethod { strang_splitting, rk4_interaction_picture };
enum class Closure { zero_top, mixture_closure };

struct EvolutionConfig {
  double dt = 1e-3;
  double t_final = 0.1;
  StepMethod method = StepMethod::strang_splitting;
  Closure closure = Closure::zero_top;
  int K = 2;
  double b1 = 1.0;
  double xi = 0.5;
  double xi_prime = 0.9;
  /// Surrogate for the Picard constant; T0(xi) = xi^2 / c0.
  double c0 = 1.0;
  /// Keep every `record_every`-th step (the final state is always kept).
  int record_every = 1;
  /// Inner NLS step used by the mixture closure.
  double closure_dt = 1e-4;
  /// Set to false to drop the collision term (free hierarchy).
  bool collisions = true;

  void validate() const;
  double T0() const { return xi * xi / c0; }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<HierarchyState> states;
};

/// P_{<=K}: keeps the first K entries.
HierarchyState truncate(const HierarchyState& G, int K);

/// K(N) = clamp(floor(b1 ln N), 1, cap).
int k_schedule(long N, double b1, int cap = 64);

/// Optional per-step observer, called with (t, state) after every step.
using StepObserver = std::function<void(double, const HierarchyState&)>;

/// GP hierarchy truncated at config.K. With mixture_closure, `mu` supplies
/// gamma^(K+1) through the NLS flow of its atoms.
Trajectory gp_evolve(const HierarchyState& G0, const EvolutionConfig& config,
                     const Mixture* mu = nullptr, const StepObserver& observer = {});

/// (K, N)-BBGKY hierarchy; components above K stay zero.
Trajectory bbgky_evolve(const HierarchyState& G0, const EvolutionConfig& config, const PotentialSpec& V,
                        const Mixture* mu = nullptr, const StepObserver& observer = {});

/// residual[k-1][s] = HS norm of central-difference i d/dt gamma^(k) minus
/// ([-Delta, gamma^(k)] + kappa0 B_{k+1} gamma^(k+1)) at interior step s + 1,
/// for k < K. Requires uniformly spaced times.
std::vector<std::vector<double>> gp_residual(const Trajectory& traj, double kappa0 = 1.0);

/// [-Delta, gamma] as a kernel multiplier.
Marginal kinetic_commutator(const Marginal& g);

}  // namespace hlab
