#pragma once

// De Finetti mixtures under the NLS flow, the NLS energy and the higher-order
// energy functionals <K^(m)>.

#include <vector>

#include "hlab/hierarchy.hpp"
#include "hlab/mixture.hpp"

namespace hlab {

enum class SplitScheme {
  /// Second-order Strang splitting.
  strang,
  /// Fourth-order Yoshida composition of Strang steps.
  yoshida4,
};

struct NlsOptions {
  double dt = 1e-3;
  double coupling = 1.0;
  SplitScheme scheme = SplitScheme::yoshida4;
};

/// One split step of i dphi/dt = -Delta phi + coupling |phi|^2 phi.
Field nls_step(const Field& phi, double dt, double coupling, SplitScheme scheme = SplitScheme::strang);
/// phi(t) with ceil(t / dt) equal steps.
Field nls_flow(const Field& phi, double t, const NlsOptions& opts = {});
/// States at 0, dt, 2 dt, ..., t_final (every `record_every` steps, plus the
/// final one).
std::vector<Field> nls_evolve(const Field& phi, double dt, double t_final, const NlsOptions& opts = {},
                              int record_every = 1);

double nls_mass(const Field& phi);
/// E[phi] = 1/2 ||phi||_{H1}^2 ||phi||_{L2}^2 + 1/4 ||phi||_{L4}^4.
double nls_energy(const Field& phi);
/// The NLS Hamiltonian ||grad phi||^2 / 2 + ||phi||_{L4}^4 / 4.
double nls_hamiltonian(const Field& phi);

/// Flows every atom; weights are untouched.
Mixture flow_mixture(const Mixture& mu, double t, const NlsOptions& opts = {});

/// Tr(K_1 K_3 ... K_{2m-1} gamma^(2m)) with K_l = 1/2 (1 - Delta_{x_l}) Tr_{l+1}
/// + 1/4 B+_{l;l+1}, evaluated by explicit tensor reduction.
double energy_functional_direct(const HierarchyState& G, int m);
/// Same functional straight from a pure-product kernel gamma^(2m).
double energy_functional_direct(const Marginal& gamma_2m, int m);
/// sum_i w_i (1/2 + E[phi_i])^m.
double energy_functional_mixture(const Mixture& mu, int m);
/// sum_i w_i E[phi_i]^m, the value the direct reduction takes on a mixture.
double energy_functional_atomic(const Mixture& mu, int m);

/// max_i ||phi_i||_{H1}.
double support_bound(const Mixture& mu);
/// (sum_i w_i ||phi_i||_{H1}^{2k})^{1/(2k)} for each k.
std::vector<double> support_moments(const Mixture& mu, const std::vector<int>& ks);

struct EnergyReport {
  std::vector<double> atom_energy;
  /// functional[m] = <K^(m)> from the mixture formula, m = 0..m_max.
  std::vector<double> functional;
  double support = 0.0;
};

EnergyReport energy_report(const Mixture& mu, int m_max);

struct WindowRecord {
  int window = 0;
  double t = 0.0;
  double norm_h1 = 0.0;         // ||Gamma(t)||_{H^1_xi}
  double bound = 0.0;           // ||Gamma_0||_{F^1_xi'}
  std::vector<double> psd;      // per k
  std::vector<double> admissibility;
  bool ok = true;
};

struct GwpReport {
  std::vector<WindowRecord> windows;
  bool ok = true;
};

/// Chains `windows` GP runs of length T, each started from the mixture flowed
/// to the window start, checking ||Gamma(t)||_{H^1_xi} <= ||Gamma_0||_{F^1_xi'}.
GwpReport gwp_window_chain(const Mixture& mu, double T, int windows, const EvolutionConfig& config,
                           double tolerance = 1e-6);

}  // namespace hlab
