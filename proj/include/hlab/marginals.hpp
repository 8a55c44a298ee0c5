#pragma once

// k-particle marginal kernels gamma^(k)(x_1..x_k; x'_1..x'_k) and truncated
// hierarchy states.
//
// A Marginal wraps a rank-2k Field with the k unprimed slots first. Read as a
// matrix, the flat index is row * (n^d)^k + col with row the unprimed
// multi-index, and the operator it represents is h^{dk} times that matrix.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hlab/grid.hpp"
#include "hlab/mixture.hpp"

namespace hlab {

class Marginal {
 public:
  Marginal() = default;
  /// Zero kernel for k particles.
  Marginal(const GridSpec& grid, int k);
  /// Takes ownership of a rank-2k kernel.
  Marginal(Field kernel, int k);

  const GridSpec& grid() const { return kernel_.grid(); }
  int k() const { return k_; }
  Field& kernel() { return kernel_; }
  const Field& kernel() const { return kernel_; }
  /// Matrix dimension (n^d)^k.
  std::size_t rows() const { return rows_; }

  cplx& operator()(std::size_t row, std::size_t col) { return kernel_[row * rows_ + col]; }
  const cplx& operator()(std::size_t row, std::size_t col) const { return kernel_[row * rows_ + col]; }

  Marginal& operator+=(const Marginal& o);
  Marginal& operator-=(const Marginal& o);
  Marginal& operator*=(cplx s);
  friend Marginal operator+(Marginal a, const Marginal& b) { return a += b; }
  friend Marginal operator-(Marginal a, const Marginal& b) { return a -= b; }
  friend Marginal operator*(cplx s, Marginal a) { return a *= s; }

 private:
  Field kernel_;
  int k_ = 0;
  std::size_t rows_ = 0;
};

/// Gamma = (gamma^(1), ..., gamma^(K)); entries above K are zero.
struct HierarchyState {
  std::vector<Marginal> entries;
  double xi = 0.5;

  int K() const { return static_cast<int>(entries.size()); }
  const Marginal& operator[](int k) const { return entries.at(static_cast<std::size_t>(k - 1)); }
  Marginal& operator[](int k) { return entries.at(static_cast<std::size_t>(k - 1)); }
  const GridSpec& grid() const;
};

enum class NormFlavor { hilbert_schmidt, trace };

/// Per-slot free-flow signs of a k-particle kernel: +1 unprimed, -1 primed.
std::vector<int> kernel_signs(int k);

Marginal pure_product_marginal(const Field& phi, int k);
Marginal mixture_marginal(const Mixture& mu, int k);
/// Builds (gamma^(1), ..., gamma^(K)) from a mixture.
HierarchyState mixture_hierarchy(const Mixture& mu, int K, double xi);

/// Tr over the last particle pair with quadrature weight h^d.
Marginal partial_trace(const Marginal& g);
cplx trace(const Marginal& g);
/// HS-Sobolev norm ||S^(k,alpha) gamma||_{L2}; alpha = 0 is the HS norm.
double sobolev_norm(const Marginal& g, double alpha);
double hs_norm(const Marginal& g);
/// Trace norm of S^(k,alpha) gamma via dense Hermitian eigendecomposition.
double trace_sobolev_norm(const Marginal& g, double alpha);
double hierarchy_norm(const HierarchyState& G, double alpha, NormFlavor flavor);
/// Same with an explicit weight in place of G.xi.
double hierarchy_norm(const HierarchyState& G, double alpha, NormFlavor flavor, double xi);

/// max(0, -lambda_min) of the Hermitized operator.
double psd_defect(const Marginal& g);
/// HS norm of Tr_{k+1} gamma^(k+1) - gamma^(k) for k = 1..K-1.
std::vector<double> admissibility_defect(const HierarchyState& G);
/// Sum_i 2^-i |Tr J_i (a - b)| with each J_i rescaled to operator norm <= 1.
double weakstar_metric(const Marginal& a, const Marginal& b, const std::vector<Marginal>& observables);

/// Average over independent unprimed and primed slot permutations, then
/// Hermitize.
Marginal symmetrize(const Marginal& g);
/// Max |gamma(x;x') - conj(gamma(x';x))|.
double hermiticity_defect(const Marginal& g);
/// Max deviation under every independent unprimed/primed slot permutation.
double permutation_defect(const Marginal& g);

/// U^(k)(t) gamma = e^{it Delta_x} gamma e^{-it Delta_x'}.
Marginal free_propagate_marginal(const Marginal& g, double t);
HierarchyState free_propagate_state(const HierarchyState& G, double t);

/// Reorders slots: output slot s takes input slot perm[s].
Field permute_slots(const Field& f, const std::vector<int>& perm);

/// Dense operator matrix h^{dk} K (checks the eigensolver budget).
Eigen::MatrixXcd operator_matrix(const Marginal& g);

/// Marginal persistence in the field format with the split byte set to k.
void write_marginal(const std::string& path, const Marginal& g);
Marginal read_marginal(const std::string& path);

}  // namespace hlab
