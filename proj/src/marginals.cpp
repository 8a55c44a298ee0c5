#include "hlab/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace hlab {

Marginal::Marginal(const GridSpec& grid, int k) : Marginal(Field(grid, 2 * k), k) {}

Marginal::Marginal(Field kernel, int k) : kernel_(std::move(kernel)), k_(k) {
  if (k < 1) throw InvalidArgument("marginal needs k >= 1");
  if (kernel_.rank() != 2 * k) throw InvalidArgument("marginal kernel must have rank 2k");
  rows_ = checked_pow(kernel_.grid().points(), static_cast<std::size_t>(k));
}

Marginal& Marginal::operator+=(const Marginal& o) {
  kernel_ += o.kernel_;
  return *this;
}

Marginal& Marginal::operator-=(const Marginal& o) {
  kernel_ -= o.kernel_;
  return *this;
}

Marginal& Marginal::operator*=(cplx s) {
  kernel_ *= s;
  return *this;
}

const GridSpec& HierarchyState::grid() const {
  if (entries.empty()) throw InvalidArgument("empty hierarchy state has no grid");
  return entries.front().grid();
}

std::vector<int> kernel_signs(int k) {
  std::vector<int> s(static_cast<std::size_t>(2 * k), 1);
  std::fill(s.begin() + k, s.end(), -1);
  return s;
}

namespace {

std::vector<cplx> tensor_power(const Field& phi, int k) {
  if (phi.rank() != 1) throw InvalidArgument("expected a one-particle field");
  const std::size_t P = phi.grid().points();
  std::vector<cplx> v{1.0};
  for (int j = 0; j < k; ++j) {
    std::vector<cplx> next(v.size() * P);
    for (std::size_t a = 0; a < v.size(); ++a) {
      for (std::size_t p = 0; p < P; ++p) next[a * P + p] = v[a] * phi[p];
    }
    v = std::move(next);
  }
  return v;
}

void add_outer(Marginal& g, const std::vector<cplx>& v, double w) {
  const std::size_t R = g.rows();
  for (std::size_t r = 0; r < R; ++r) {
    const cplx a = w * v[r];
    cplx* row = &g(r, 0);
    for (std::size_t c = 0; c < R; ++c) row[c] += a * std::conj(v[c]);
  }
}

std::vector<std::vector<int>> all_permutations(int k) {
  std::vector<int> p(static_cast<std::size_t>(k));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

Marginal hermitized(const Marginal& g) {
  Marginal out(g.grid(), g.k());
  const std::size_t R = g.rows();
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t c = 0; c < R; ++c) out(r, c) = 0.5 * (g(r, c) + std::conj(g(c, r)));
  }
  return out;
}

Eigen::VectorXd hermitian_eigenvalues(const Marginal& g) {
  Budget::current().check_eigen_rows(g.rows(), "Hermitian eigensolve");
  Eigen::MatrixXcd A = operator_matrix(g);
  Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFailure("Hermitian eigensolve did not converge");
  return solver.eigenvalues();
}

}  // namespace

Marginal pure_product_marginal(const Field& phi, int k) {
  if (k < 1) throw InvalidArgument("pure_product_marginal needs k >= 1");
  field_size(phi.grid(), 2 * k, "pure product marginal");
  Marginal g(phi.grid(), k);
  add_outer(g, tensor_power(phi, k), 1.0);
  return g;
}

Marginal mixture_marginal(const Mixture& mu, int k) {
  if (k < 1) throw InvalidArgument("mixture_marginal needs k >= 1");
  Marginal g(mu.grid(), k);
  for (const auto& a : mu.atoms()) {
    if (a.weight == 0.0) continue;
    add_outer(g, tensor_power(a.phi, k), a.weight);
  }
  return g;
}

HierarchyState mixture_hierarchy(const Mixture& mu, int K, double xi) {
  HierarchyState G;
  G.xi = xi;
  for (int k = 1; k <= K; ++k) G.entries.push_back(mixture_marginal(mu, k));
  return G;
}

Marginal partial_trace(const Marginal& g) {
  if (g.k() < 2) throw InvalidArgument("partial_trace needs k >= 2; use trace");
  const std::size_t P = g.grid().points();
  const double h = g.grid().cell_volume();
  Marginal out(g.grid(), g.k() - 1);
  const std::size_t R = out.rows();
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t c = 0; c < R; ++c) {
      cplx s = 0.0;
      for (std::size_t y = 0; y < P; ++y) s += g(r * P + y, c * P + y);
      out(r, c) = h * s;
    }
  }
  return out;
}

cplx trace(const Marginal& g) {
  cplx s = 0.0;
  for (std::size_t r = 0; r < g.rows(); ++r) s += g(r, r);
  return s * std::pow(g.grid().cell_volume(), g.k());
}

double sobolev_norm(const Marginal& g, double alpha) { return sobolev_norm(g.kernel(), alpha); }

double hs_norm(const Marginal& g) { return l2_norm(g.kernel()); }

Eigen::MatrixXcd operator_matrix(const Marginal& g) {
  Budget::current().check_eigen_rows(g.rows(), "operator matrix");
  const auto R = static_cast<Eigen::Index>(g.rows());
  const double w = std::pow(g.grid().cell_volume(), g.k());
  Eigen::MatrixXcd A(R, R);
  for (Eigen::Index r = 0; r < R; ++r) {
    for (Eigen::Index c = 0; c < R; ++c) A(r, c) = w * g(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  }
  return A;
}

double trace_sobolev_norm(const Marginal& g, double alpha) {
  Budget::current().check_eigen_rows(g.rows(), "trace-Sobolev norm");
  const Marginal s(bessel_multiply(g.kernel(), alpha), g.k());
  return hermitian_eigenvalues(s).cwiseAbs().sum();
}

double hierarchy_norm(const HierarchyState& G, double alpha, NormFlavor flavor) {
  return hierarchy_norm(G, alpha, flavor, G.xi);
}

double hierarchy_norm(const HierarchyState& G, double alpha, NormFlavor flavor, double xi) {
  if (!(xi > 0.0 && xi < 1.0)) throw InvalidArgument("hierarchy weight must lie in (0, 1)");
  double total = 0.0;
  for (int k = 1; k <= G.K(); ++k) {
    const double v = flavor == NormFlavor::trace ? trace_sobolev_norm(G[k], alpha) : sobolev_norm(G[k], alpha);
    total += std::pow(xi, k) * v;
  }
  return total;
}

double psd_defect(const Marginal& g) {
  const auto ev = hermitian_eigenvalues(g);
  return std::max(0.0, -ev.minCoeff());
}

std::vector<double> admissibility_defect(const HierarchyState& G) {
  if (G.K() < 2) throw InvalidArgument("admissibility_defect needs K >= 2");
  std::vector<double> out;
  for (int k = 1; k < G.K(); ++k) out.push_back(hs_norm(partial_trace(G[k + 1]) - G[k]));
  return out;
}

double weakstar_metric(const Marginal& a, const Marginal& b, const std::vector<Marginal>& observables) {
  const Marginal diff = a - b;
  const std::size_t R = diff.rows();
  const double w = std::pow(diff.grid().cell_volume(), 2 * diff.k());
  double total = 0.0;
  double weight = 0.5;
  for (const auto& J : observables) {
    if (J.k() != diff.k() || !(J.grid() == diff.grid())) throw InvalidArgument("observable shape mismatch");
    // Operator norm from the singular values when affordable; the HS norm
    // bounds it from above otherwise.
    double opnorm;
    if (R <= Budget::current().max_eigen_rows) {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(operator_matrix(J));
      opnorm = svd.singularValues()(0);
    } else {
      opnorm = hs_norm(J);
    }
    cplx tr = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t c = 0; c < R; ++c) tr += J(r, c) * diff(c, r);
    }
    total += weight * std::abs(w * tr) / std::max(1.0, opnorm);
    weight *= 0.5;
  }
  return total;
}

Field permute_slots(const Field& f, const std::vector<int>& perm) {
  const int rank = f.rank();
  if (static_cast<int>(perm.size()) != rank) throw InvalidArgument("permutation length must equal rank");
  std::vector<int> check = perm;
  std::sort(check.begin(), check.end());
  for (int s = 0; s < rank; ++s) {
    if (check[static_cast<std::size_t>(s)] != s) throw InvalidArgument("not a permutation");
  }
  Field out(f.grid(), rank);
  if (rank == 0) {
    out[0] = f[0];
    return out;
  }
  const std::size_t P = f.grid().points();
  std::vector<std::size_t> out_stride(rank), in_stride(rank);
  for (int s = 0; s < rank; ++s) {
    out_stride[s] = f.slot_stride(s);
    in_stride[s] = f.slot_stride(perm[s]);
  }
  const cplx* src = f.data().data();
  cplx* dst = out.data().data();
  std::function<void(int, std::size_t, std::size_t)> walk = [&](int s, std::size_t ob, std::size_t ib) {
    if (s == rank - 1) {
      for (std::size_t p = 0; p < P; ++p) dst[ob + p] = src[ib + p * in_stride[s]];
      return;
    }
    for (std::size_t p = 0; p < P; ++p) walk(s + 1, ob + p * out_stride[s], ib + p * in_stride[s]);
  };
  walk(0, 0, 0);
  return out;
}

namespace {

std::vector<std::vector<int>> kernel_permutations(int k) {
  const auto perms = all_permutations(k);
  std::vector<std::vector<int>> out;
  for (const auto& s : perms) {
    for (const auto& t : perms) {
      std::vector<int> p(s);
      for (int v : t) p.push_back(k + v);
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace

Marginal symmetrize(const Marginal& g) {
  const auto perms = kernel_permutations(g.k());
  Field acc(g.grid(), 2 * g.k());
  for (const auto& p : perms) acc += permute_slots(g.kernel(), p);
  acc *= 1.0 / static_cast<double>(perms.size());
  return hermitized(Marginal(std::move(acc), g.k()));
}

double hermiticity_defect(const Marginal& g) {
  double m = 0.0;
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = r; c < g.rows(); ++c) m = std::max(m, std::abs(g(r, c) - std::conj(g(c, r))));
  }
  return m;
}

double permutation_defect(const Marginal& g) {
  double m = 0.0;
  for (const auto& p : kernel_permutations(g.k())) m = std::max(m, max_abs_diff(permute_slots(g.kernel(), p), g.kernel()));
  return m;
}

Marginal free_propagate_marginal(const Marginal& g, double t) {
  const auto signs = kernel_signs(g.k());
  return Marginal(free_propagate(g.kernel(), t, signs), g.k());
}

HierarchyState free_propagate_state(const HierarchyState& G, double t) {
  HierarchyState out;
  out.xi = G.xi;
  for (const auto& g : G.entries) out.entries.push_back(free_propagate_marginal(g, t));
  return out;
}

void write_marginal(const std::string& path, const Marginal& g) { write_field(path, g.kernel(), g.k()); }

Marginal read_marginal(const std::string& path) {
  int split = 0;
  Field f = read_field(path, &split);
  if (split == 0 || 2 * split != f.rank()) throw FormatError(path + " does not hold a marginal kernel");
  return Marginal(std::move(f), split);
}

}  // namespace hlab
