#include "hlab/nbody.hpp"

#include <cmath>

namespace hlab {

namespace {

void check_state(const NBodyState& s) {
  if (s.N < 1) throw InvalidArgument("N-body state needs N >= 1");
  if (s.psi.rank() != s.N || !(s.psi.grid() == s.grid)) throw InvalidArgument("wavefunction shape mismatch");
}

Field tensor_power_field(const Field& phi, int N) {
  field_size(phi.grid(), N, "N-body wavefunction");
  Field out(phi.grid(), N);
  const std::size_t P = phi.grid().points();
  out[0] = 1.0;
  std::size_t len = 1;
  // Build in place from the back so earlier factors are not overwritten.
  for (int j = 0; j < N; ++j) {
    for (std::size_t a = len; a-- > 0;) {
      const cplx v = out[a];
      for (std::size_t p = P; p-- > 0;) out[a * P + p] = v * phi[p];
    }
    len *= P;
  }
  return out;
}

}  // namespace

NBodyState factorized_state(const Field& phi, int N, const PotentialSpec& V) {
  if (phi.rank() != 1) throw InvalidArgument("factorized state needs a one-particle field");
  if (!(V.realized.grid() == phi.grid())) throw InvalidArgument("potential lives on another grid");
  return NBodyState{phi.grid(), N, tensor_power_field(phi, N), V};
}

NBodyState superposed_state(const std::vector<Field>& atoms, const std::vector<cplx>& coeffs, int N,
                            const PotentialSpec& V) {
  if (atoms.empty() || atoms.size() != coeffs.size()) throw InvalidArgument("need one coefficient per atom");
  Field psi = tensor_power_field(atoms[0], N);
  psi *= coeffs[0];
  for (std::size_t a = 1; a < atoms.size(); ++a) {
    Field t = tensor_power_field(atoms[a], N);
    t *= coeffs[a];
    psi += t;
  }
  const double n = l2_norm(psi);
  if (!(n > 0.0)) throw InvalidArgument("superposition vanishes");
  psi *= 1.0 / n;
  return NBodyState{atoms[0].grid(), N, std::move(psi), V};
}

Field pair_potential_field(const GridSpec& grid, int N, const PotentialSpec& V) {
  Field W(grid, N);
  const std::size_t P = grid.points();
  std::vector<double> v(P);
  for (std::size_t p = 0; p < P; ++p) v[p] = V.realized[p].real() / N;
  std::vector<std::size_t> pts(static_cast<std::size_t>(N));
  cplx* out = W.data().data();
  std::size_t flat = 0;
  std::function<void(int, double)> walk = [&](int s, double acc) {
    for (std::size_t p = 0; p < P; ++p) {
      double a = acc;
      for (int i = 0; i < s; ++i) a += v[grid.difference_index(pts[static_cast<std::size_t>(i)], p)];
      if (s == N - 1) {
        out[flat++] = a;
      } else {
        pts[static_cast<std::size_t>(s)] = p;
        walk(s + 1, a);
      }
    }
  };
  walk(0, 0.0);
  return W;
}

Field hamiltonian_apply(const NBodyState& state) {
  check_state(state);
  Field kin = state.psi;
  const std::vector<int> signs(static_cast<std::size_t>(state.N), 1);
  apply_quadratic_multiplier(kin, signs, [](double w) { return cplx(w); });
  const Field W = pair_potential_field(state.grid, state.N, state.V);
  for (std::size_t i = 0; i < kin.size(); ++i) kin[i] += W[i] * state.psi[i];
  return kin;
}

NBodyTrajectory nbody_evolve(const NBodyState& state, double dt, double t_final, int record_every,
                             SplitScheme scheme, const std::function<void(double, const Field&)>& observer) {
  check_state(state);
  if (!(dt > 0.0) || !(t_final >= 0.0)) throw InvalidArgument("need dt > 0 and t_final >= 0");
  if (record_every < 1) throw InvalidArgument("record_every must be at least 1");
  const long steps = t_final == 0.0 ? 0 : static_cast<long>(std::ceil(t_final / dt - 1e-9));
  const double h = steps == 0 ? 0.0 : t_final / static_cast<double>(steps);
  const Field W = pair_potential_field(state.grid, state.N, state.V);
  const std::vector<int> signs(static_cast<std::size_t>(state.N), 1);

  // Sub-step lengths of one macro step: Strang or the Yoshida triple jump.
  std::vector<double> subs{h};
  if (scheme == SplitScheme::yoshida4) {
    const double c = std::cbrt(2.0);
    subs = {h / (2 - c), -c * h / (2 - c), h / (2 - c)};
  }
  std::vector<Field> phases;
  for (double s : subs) {
    Field ph = W;
    for (auto& x : ph.data()) x = std::exp(cplx(0.0, -s * x.real()));
    phases.push_back(std::move(ph));
  }
  const auto kinetic = [&](Field& f, double t) {
    apply_quadratic_multiplier(f, signs, [t](double w) { return std::exp(cplx(0.0, -t * w)); });
  };

  NBodyTrajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(state.psi);
  Field psi = state.psi;
  for (long step = 0; step < steps; ++step) {
    for (std::size_t q = 0; q < subs.size(); ++q) {
      kinetic(psi, subs[q] / 2);
      const Field& ph = phases[q];
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= ph[i];
      kinetic(psi, subs[q] / 2);
    }
    const double t = (step + 1) * h;
    if (observer) observer(t, psi);
    if ((step + 1) % record_every == 0 || step + 1 == steps) {
      traj.times.push_back(t);
      traj.states.push_back(psi);
    }
  }
  return traj;
}

Marginal extract_marginal(const Field& psi, int k) {
  const int N = psi.rank();
  if (k < 1 || k > N) throw InvalidArgument("extract_marginal needs 1 <= k <= N");
  field_size(psi.grid(), 2 * k, "extracted marginal");
  const std::size_t P = psi.grid().points();
  const auto rows = static_cast<Eigen::Index>(checked_pow(P, static_cast<std::size_t>(k)));
  const auto cols = static_cast<Eigen::Index>(checked_pow(P, static_cast<std::size_t>(N - k)));
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> Psi(psi.data().data(), rows, cols);
  Marginal g(psi.grid(), k);
  Eigen::Map<RowMat> out(g.kernel().data().data(), rows, rows);
  out.noalias() = Psi * Psi.adjoint();
  out *= std::pow(psi.grid().cell_volume(), N - k);
  return g;
}

Marginal extract_marginal(const NBodyState& state, int k) {
  check_state(state);
  return extract_marginal(state.psi, k);
}

double energy_moment(const NBodyState& state, int k) {
  check_state(state);
  if (k < 0 || k > 3) throw InvalidArgument("energy_moment supports 0 <= k <= 3");
  if (k == 0) return nls_mass(state.psi);
  cplx value;
  NBodyState tmp = state;
  if (k == 1) {
    value = inner(state.psi, hamiltonian_apply(state));
  } else {
    tmp.psi = hamiltonian_apply(state);
    if (k == 2) {
      value = inner(tmp.psi, tmp.psi);
    } else {
      Field h2 = hamiltonian_apply(tmp);
      value = inner(tmp.psi, h2);
    }
  }
  if (std::abs(value.imag()) > 1e-9 * std::max(1.0, std::abs(value.real()))) {
    throw NumericalFailure("energy moment is not real: imaginary part " + std::to_string(value.imag()));
  }
  return value.real();
}

double energy_estimate_check(const NBodyState& state, int k, double C) {
  check_state(state);
  if (k < 1 || k > 2) throw InvalidArgument("energy_estimate_check supports k in {1, 2}");
  if (k > state.N) throw InvalidArgument("energy_estimate_check needs k <= N");
  if (!(C > 0.0 && C < 1.0)) throw InvalidArgument("C must lie in (0, 1)");
  const double N = state.N;
  Field hn = hamiltonian_apply(state);
  hn += N * state.psi;
  const double numerator = k == 1 ? inner(state.psi, hn).real() : std::pow(l2_norm(hn), 2);
  std::vector<int> slots(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) slots[static_cast<std::size_t>(j)] = j;
  const double r = std::pow(l2_norm(bessel_multiply(state.psi, 1.0, slots)), 2);
  return numerator / (std::pow(C * N, k) * r);
}

double symmetry_defect(const Field& psi) {
  double m = 0.0;
  std::vector<int> perm(static_cast<std::size_t>(psi.rank()));
  for (int s = 0; s + 1 < psi.rank(); ++s) {
    for (int i = 0; i < psi.rank(); ++i) perm[static_cast<std::size_t>(i)] = i;
    std::swap(perm[static_cast<std::size_t>(s)], perm[static_cast<std::size_t>(s + 1)]);
    m = std::max(m, max_abs_diff(permute_slots(psi, perm), psi));
  }
  return m;
}

double trace_distance(const Marginal& a, const Marginal& b) { return trace_sobolev_norm(a - b, 0.0); }

}  // namespace hlab
