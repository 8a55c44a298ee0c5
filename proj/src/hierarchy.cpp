#include "hlab/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>

#include "hlab/definetti.hpp"

namespace hlab {

void EvolutionConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(t_final >= 0.0)) throw InvalidArgument("t_final must be nonnegative");
  if (K < 1) throw InvalidArgument("truncation K must be at least 1");
  if (!(xi > 0.0 && xi < xi_prime && xi_prime < 1.0)) throw InvalidArgument("need 0 < xi < xi' < 1");
  if (!(c0 > 0.0)) throw InvalidArgument("c0 must be positive");
  if (record_every < 1) throw InvalidArgument("record_every must be at least 1");
  if (!(closure_dt > 0.0)) throw InvalidArgument("closure_dt must be positive");
}

HierarchyState truncate(const HierarchyState& G, int K) {
  if (K < 1) throw InvalidArgument("truncate needs K >= 1");
  HierarchyState out;
  out.xi = G.xi;
  for (int k = 1; k <= std::min(K, G.K()); ++k) out.entries.push_back(G[k]);
  return out;
}

int k_schedule(long N, double b1, int cap) {
  if (N < 2) throw InvalidArgument("k_schedule needs N >= 2");
  if (!(b1 > 0.0)) throw InvalidArgument("k_schedule needs b1 > 0");
  const double raw = std::floor(b1 * std::log(static_cast<double>(N)));
  return static_cast<int>(std::clamp(raw, 1.0, static_cast<double>(std::max(cap, 1))));
}

Marginal kinetic_commutator(const Marginal& g) {
  Marginal out = g;
  const auto signs = kernel_signs(g.k());
  apply_quadratic_multiplier(out.kernel(), signs, [](double w) { return cplx(w); });
  return out;
}

namespace {

void axpy(HierarchyState& y, cplx a, const HierarchyState& x) {
  for (int k = 1; k <= y.K(); ++k) {
    auto dst = y[k].kernel().data();
    const auto src = x[k].kernel().data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += a * src[i];
  }
}

HierarchyState scaled(const HierarchyState& x, cplx a) {
  HierarchyState out = x;
  for (auto& g : out.entries) g *= a;
  return out;
}

// Atoms of the closure mixture, flowed forward on demand.
class ClosureAtoms {
 public:
  ClosureAtoms(const Mixture& mu, double dt) : atoms_(mu.atoms()), dt_(dt) {}

  const std::vector<Atom>& at(double tau) {
    if (tau < t_ - 1e-14) throw InvalidArgument("closure time must not decrease");
    if (tau > t_) {
      NlsOptions opts;
      opts.dt = dt_;
      for (auto& a : atoms_) a.phi = nls_flow(a.phi, tau - t_, opts);
      t_ = tau;
    }
    return atoms_;
  }

 private:
  std::vector<Atom> atoms_;
  double dt_;
  double t_ = 0.0;
};

// sum_a w_a sum_j (rho_a(x_j) - rho_a(x'_j)) phi_a^{(x)K} conj(phi_a^{(x)K}),
// the collision image of the K+1 mixture marginal with density rho_a.
Marginal mixture_forcing(const std::vector<Atom>& atoms, int K, const PotentialSpec* V) {
  const GridSpec& g = atoms.front().phi.grid();
  const std::size_t P = g.points();
  Marginal out(g, K);
  const std::size_t R = out.rows();
  std::vector<double> rho(P);
  std::vector<double> rsum(R);
  std::vector<cplx> v(R);
  for (const auto& a : atoms) {
    if (a.weight == 0.0) continue;
    for (std::size_t p = 0; p < P; ++p) rho[p] = std::norm(a.phi[p]);
    if (V != nullptr) {
      std::vector<double> conv(P, 0.0);
      for (std::size_t x = 0; x < P; ++x) {
        double s = 0.0;
        for (std::size_t y = 0; y < P; ++y) s += V->realized[g.difference_index(x, y)].real() * rho[y];
        conv[x] = s * g.cell_volume();
      }
      rho = conv;
    }
    for (std::size_t r = 0; r < R; ++r) {
      std::size_t m = r;
      double s = 0.0;
      cplx prod = 1.0;
      for (int j = 0; j < K; ++j) {
        const std::size_t p = m % P;
        m /= P;
        s += rho[p];
        prod *= a.phi[p];
      }
      rsum[r] = s;
      v[r] = prod;
    }
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t c = 0; c < R; ++c) out(r, c) += a.weight * (rsum[r] - rsum[c]) * v[r] * std::conj(v[c]);
    }
  }
  return out;
}

struct Collider {
  std::function<HierarchyState(const HierarchyState&)> apply;
  std::function<std::optional<Marginal>(double)> forcing;
};

// -i (B Gamma + closure forcing on the top component).
HierarchyState rhs(const Collider& C, const HierarchyState& G, double tau) {
  HierarchyState out = C.apply(G);
  if (C.forcing) {
    if (auto f = C.forcing(tau)) out[out.K()] += *f;
  }
  for (auto& g : out.entries) g *= cplx(0.0, -1.0);
  return out;
}

HierarchyState rk4(const HierarchyState& G, double h, double t0,
                   const std::function<HierarchyState(double, const HierarchyState&)>& f) {
  const HierarchyState k1 = f(t0, G);
  HierarchyState y = G;
  axpy(y, h / 2, k1);
  const HierarchyState k2 = f(t0 + h / 2, y);
  y = G;
  axpy(y, h / 2, k2);
  const HierarchyState k3 = f(t0 + h / 2, y);
  y = G;
  axpy(y, h, k3);
  const HierarchyState k4 = f(t0 + h, y);
  HierarchyState out = G;
  axpy(out, h / 6, k1);
  axpy(out, h / 3, k2);
  axpy(out, h / 3, k3);
  axpy(out, h / 6, k4);
  return out;
}

HierarchyState step(const Collider& C, const HierarchyState& G, double t, double h, StepMethod method) {
  if (method == StepMethod::strang_splitting) {
    HierarchyState y = free_propagate_state(G, h / 2);
    const double mid = t + h / 2;
    y = rk4(y, h, 0.0, [&](double, const HierarchyState& s) { return rhs(C, s, mid); });
    return free_propagate_state(y, h / 2);
  }
  // Interaction picture: W(s) = U(-s) Gamma(t + s).
  const auto f = [&](double s, const HierarchyState& W) {
    return free_propagate_state(rhs(C, free_propagate_state(W, s), t + s), -s);
  };
  return free_propagate_state(rk4(G, h, 0.0, f), h);
}

std::vector<cplx> traces(const HierarchyState& G) {
  std::vector<cplx> out;
  for (const auto& g : G.entries) out.push_back(trace(g));
  return out;
}

Trajectory evolve(const HierarchyState& G0, const EvolutionConfig& config, const Collider& C,
                  const StepObserver& observer) {
  config.validate();
  if (G0.K() != config.K) throw InvalidArgument("initial state must be truncated at config.K");
  const long steps = config.t_final == 0.0 ? 0 : static_cast<long>(std::ceil(config.t_final / config.dt - 1e-9));
  const double h = steps == 0 ? 0.0 : config.t_final / static_cast<double>(steps);
  const auto tr0 = traces(G0);

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(G0);
  HierarchyState G = G0;
  for (long s = 0; s < steps; ++s) {
    const double t = s * h;
    G = step(C, G, t, h, config.method);
    const double tn = (s + 1) * h;
    const auto tr = traces(G);
    for (std::size_t k = 0; k < tr.size(); ++k) {
      if (std::abs(tr[k] - tr0[k]) > 0.01 * std::abs(tr0[k]) + 1e-12) {
        throw NumericalFailure("trace of component " + std::to_string(k + 1) + " drifted from " +
                               std::to_string(std::abs(tr0[k])) + " to " + std::to_string(std::abs(tr[k])) +
                               " at t = " + std::to_string(tn));
      }
    }
    if (observer) observer(tn, G);
    if ((s + 1) % config.record_every == 0 || s + 1 == steps) {
      traj.times.push_back(tn);
      traj.states.push_back(G);
    }
  }
  return traj;
}

std::function<std::optional<Marginal>(double)> make_forcing(const EvolutionConfig& config, const Mixture* mu,
                                                            int K, double scale, const PotentialSpec* V) {
  if (config.closure == Closure::zero_top || !config.collisions) return {};
  if (mu == nullptr) throw InvalidArgument("mixture_closure needs a mixture");
  auto atoms = std::make_shared<ClosureAtoms>(*mu, config.closure_dt);
  return [atoms, K, scale, V](double tau) -> std::optional<Marginal> {
    if (scale == 0.0) return std::nullopt;
    Marginal f = mixture_forcing(atoms->at(tau), K, V);
    f *= scale;
    return f;
  };
}

}  // namespace

Trajectory gp_evolve(const HierarchyState& G0, const EvolutionConfig& config, const Mixture* mu,
                     const StepObserver& observer) {
  constexpr double kappa0 = 1.0;
  Collider C;
  if (config.collisions) {
    C.apply = [](const HierarchyState& G) { return gp_collision_sum(G, kappa0); };
  } else {
    C.apply = [](const HierarchyState& G) { return scaled(G, 0.0); };
  }
  C.forcing = make_forcing(config, mu, config.K, kappa0, nullptr);
  return evolve(G0, config, C, observer);
}

Trajectory bbgky_evolve(const HierarchyState& G0, const EvolutionConfig& config, const PotentialSpec& V,
                        const Mixture* mu, const StepObserver& observer) {
  if (config.K > V.bigN) throw InvalidArgument("BBGKY truncation K must not exceed N");
  Collider C;
  if (config.collisions) {
    C.apply = [&V](const HierarchyState& G) { return bbgky_rhs(G, V); };
  } else {
    C.apply = [](const HierarchyState& G) { return scaled(G, 0.0); };
  }
  const double weight = static_cast<double>(V.bigN - config.K) / static_cast<double>(V.bigN);
  C.forcing = make_forcing(config, mu, config.K, weight, &V);
  return evolve(G0, config, C, observer);
}

std::vector<std::vector<double>> gp_residual(const Trajectory& traj, double kappa0) {
  const std::size_t M = traj.states.size();
  if (M < 3) throw InvalidArgument("gp_residual needs at least three states");
  const double dt = traj.times[1] - traj.times[0];
  for (std::size_t s = 1; s < M; ++s) {
    if (std::abs(traj.times[s] - traj.times[s - 1] - dt) > 1e-9 * std::max(1.0, dt)) {
      throw InvalidArgument("gp_residual needs uniformly spaced times");
    }
  }
  const int K = traj.states.front().K();
  std::vector<std::vector<double>> out(static_cast<std::size_t>(std::max(K - 1, 0)));
  for (int k = 1; k < K; ++k) {
    for (std::size_t s = 1; s + 1 < M; ++s) {
      Marginal r = traj.states[s + 1][k] - traj.states[s - 1][k];
      r *= cplx(0.0, 1.0 / (2 * dt));
      r -= kinetic_commutator(traj.states[s][k]);
      r -= kappa0 * gp_collision_total(traj.states[s][k + 1]);
      out[static_cast<std::size_t>(k - 1)].push_back(hs_norm(r));
    }
  }
  return out;
}

}  // namespace hlab
