#pragma once

// Dense bosonic N-body wavefunctions on the torus:
//   i dPsi/dt = H_N Psi,  H_N = sum_j (-Delta_{x_j}) + (1/N) sum_{i<j} V_N(x_i - x_j).

#include <functional>
#include <vector>

#include "hlab/definetti.hpp"
#include "hlab/interactions.hpp"
#include "hlab/marginals.hpp"

namespace hlab {

struct NBodyState {
  GridSpec grid = GridSpec::make(1, 4, 2 * kPi);
  int N = 0;
  Field psi;
  PotentialSpec V;
};

/// phi^{(x)N}; phi is used as given (normalize it first for unit-norm data).
NBodyState factorized_state(const Field& phi, int N, const PotentialSpec& V);
/// Normalized sum_a c_a phi_a^{(x)N}.
NBodyState superposed_state(const std::vector<Field>& atoms, const std::vector<cplx>& coeffs, int N,
                            const PotentialSpec& V);

Field hamiltonian_apply(const NBodyState& state);
/// (1/N) sum_{i<j} V_N(x_i - x_j) as a rank-N field.
Field pair_potential_field(const GridSpec& grid, int N, const PotentialSpec& V);

struct NBodyTrajectory {
  std::vector<double> times;
  std::vector<Field> states;
};

/// Split-step propagation; the potential phase is precomputed once.
NBodyTrajectory nbody_evolve(const NBodyState& state, double dt, double t_final, int record_every = 1,
                             SplitScheme scheme = SplitScheme::yoshida4,
                             const std::function<void(double, const Field&)>& observer = {});

/// gamma^(k) = h^{d(N-k)} Psi Psi^dagger with Psi reshaped to (n^d)^k x (n^d)^(N-k).
Marginal extract_marginal(const Field& psi, int k);
Marginal extract_marginal(const NBodyState& state, int k);

/// <psi, H^k psi>, real part; throws if the imaginary part exceeds 1e-9 relative.
double energy_moment(const NBodyState& state, int k);
/// <psi, (H + N)^k psi> / (C^k N^k <psi, R^(k,2) psi>), R^(k,2) = prod_{j<=k} (1 - Delta_{x_j}).
double energy_estimate_check(const NBodyState& state, int k, double C);

/// Max deviation of psi under adjacent slot transpositions.
double symmetry_defect(const Field& psi);

/// Trace norm of a Hermitian kernel difference, ||a - b||_1.
double trace_distance(const Marginal& a, const Marginal& b);

}  // namespace hlab
