#include "hlab/duhamel.hpp"

#include <array>
#include <cmath>

namespace hlab {

Marginal bbgky_main_total(const Marginal& next, const PotentialSpec& V) {
  return bbgky_main_weighted(next, Side::plus, V) - bbgky_main_weighted(next, Side::minus, V);
}

namespace {

// B^main_N Gamma + B^error_N Gamma, i.e. the full BBGKY collision term.
HierarchyState apply_BN(const HierarchyState& G, const PotentialSpec& V) { return bbgky_rhs(G, V); }

double h1_distance(const HierarchyState& a, const HierarchyState& b, double xi) {
  double total = 0.0;
  for (int k = 1; k <= a.K(); ++k) total += std::pow(xi, k) * sobolev_norm(a[k] - b[k], 1.0);
  return total;
}

double h1_norm(const HierarchyState& a, double xi) {
  return hierarchy_norm(a, 1.0, NormFlavor::hilbert_schmidt, xi);
}

}  // namespace

HierarchyState duhamel_iterate(const StateSeries& xi, int j, const PotentialSpec& V, double t, int steps) {
  if (j < 0) throw InvalidArgument("Duhamel level must be nonnegative");
  if (steps < 1) throw InvalidArgument("need at least one quadrature step");
  const HierarchyState at_t = xi(t);
  if (j == 0) return at_t;
  const int Kout = at_t.K() - j;
  if (Kout < 1) throw InvalidArgument("Xi has too few components for this Duhamel level");

  const double dt = t / steps;
  std::vector<HierarchyState> nodes;
  for (int m = 0; m <= steps; ++m) nodes.push_back(xi(m * dt));

  HierarchyState out;
  out.xi = at_t.xi;
  for (int k = 1; k <= Kout; ++k) {
    // F[m] holds the current innermost level evaluated at t_m.
    std::vector<Marginal> F;
    for (int m = 0; m <= steps; ++m) F.push_back(nodes[static_cast<std::size_t>(m)][k + j]);
    for (int level = 1; level <= j; ++level) {
      const bool outer = level == j;
      std::vector<Marginal> G;
      for (int m = outer ? steps : 0; m <= steps; ++m) {
        // int_0^{t_m} B U(t_m - s) F(s) ds by the trapezoid rule; B is linear,
        // so it is applied once to the quadrature sum.
        Marginal acc(F.front().grid(), F.front().k());
        for (int q = 0; m > 0 && q <= m; ++q) {
          Marginal u = free_propagate_marginal(F[static_cast<std::size_t>(q)], (m - q) * dt);
          u *= (q == 0 || q == m) ? 0.5 * dt : dt;
          acc += u;
        }
        G.push_back(bbgky_main_total(acc, V));
      }
      F = std::move(G);
    }
    Marginal result = F.back();
    result *= std::pow(cplx(0.0, 1.0), j);
    out.entries.push_back(std::move(result));
  }
  return out;
}

namespace {

// phi1(c) = (1 - e^-c) / c and phi2(c) = (1 - (1 + c) e^-c) / c^2.
std::array<cplx, 2> filon_weights(cplx c) {
  if (std::abs(c) < 1e-3) {
    const cplx c2 = c * c;
    const cplx c3 = c2 * c;
    const cplx phi1 = 1.0 - c / 2.0 + c2 / 6.0 - c3 / 24.0;
    const cplx phi2 = 0.5 - c / 3.0 + c2 / 8.0 - c3 / 30.0;
    return {phi1, phi2};
  }
  const cplx e = std::exp(-c);
  return {(1.0 - e) / c, (1.0 - (1.0 + c) * e) / (c * c)};
}

// W_{m+1} = U(dt) W_m + dt [phi2 Theta_m + (phi1 - phi2) Theta_{m+1}] per mode,
// giving W(t_m) = int_0^{t_m} U(t_m - s) Theta(s) ds for piecewise linear Theta.
std::vector<HierarchyState> integrate_free(const std::vector<HierarchyState>& theta, double dt) {
  const std::size_t M = theta.size();
  std::vector<HierarchyState> W;
  HierarchyState w0 = theta.front();
  for (auto& g : w0.entries) g *= 0.0;
  W.push_back(w0);
  const int K = theta.front().K();
  std::vector<Field> spec_prev, spec_w;
  for (int k = 1; k <= K; ++k) {
    spec_prev.push_back(dft_forward(theta[0][k].kernel()));
    spec_w.push_back(Field(theta[0][k].grid(), 2 * k));
  }
  // Per-level mode frequencies omega = sum |xi|^2 - sum |xi'|^2.
  std::vector<std::vector<std::array<cplx, 3>>> coeff(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    const Field& f = spec_w[static_cast<std::size_t>(k - 1)];
    const GridSpec& g = f.grid();
    auto& cf = coeff[static_cast<std::size_t>(k - 1)];
    cf.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      double omega = 0.0;
      for (int s = 0; s < 2 * k; ++s) omega += (s < k ? 1.0 : -1.0) * g.frequency_sq(f.slot_point(i, s));
      const cplx c(0.0, omega * dt);
      const auto [phi1, phi2] = filon_weights(c);
      cf[i] = {std::exp(-c), dt * phi2, dt * (phi1 - phi2)};
    }
  }
  for (std::size_t m = 1; m < M; ++m) {
    HierarchyState next = w0;
    for (int k = 1; k <= K; ++k) {
      const auto kk = static_cast<std::size_t>(k - 1);
      Field cur = dft_forward(theta[m][k].kernel());
      Field& w = spec_w[kk];
      const auto& cf = coeff[kk];
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = cf[i][0] * w[i] + cf[i][1] * spec_prev[kk][i] + cf[i][2] * cur[i];
      }
      next[k] = Marginal(dft_inverse(w), k);
      spec_prev[kk] = std::move(cur);
    }
    W.push_back(std::move(next));
  }
  return W;
}

}  // namespace

PicardResult picard_fixed_point(const std::vector<HierarchyState>& xi_nodes, double dt, const PotentialSpec& V,
                                const EvolutionConfig& config, double tol, int max_iter) {
  if (xi_nodes.size() < 2) throw InvalidArgument("Picard iteration needs at least two time nodes");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const double T = dt * static_cast<double>(xi_nodes.size() - 1);
  if (!(T < config.T0())) throw InvalidArgument("Picard horizon must lie below T0(xi) = xi^2 / c0");
  const double xi = config.xi;

  PicardResult res;
  res.theta = xi_nodes;
  int bad = 0;
  for (int it = 1; it <= max_iter; ++it) {
    const auto W = integrate_free(res.theta, dt);
    std::vector<HierarchyState> next;
    double dist = 0.0;
    for (std::size_t m = 0; m < xi_nodes.size(); ++m) {
      HierarchyState s = xi_nodes[m];
      const HierarchyState b = apply_BN(W[m], V);
      for (int k = 1; k <= s.K(); ++k) s[k] += cplx(0.0, 1.0) * b[k];
      dist = std::max(dist, h1_distance(s, res.theta[m], xi));
      next.push_back(std::move(s));
    }
    res.theta = std::move(next);
    res.iterations = it;
    if (!res.distances.empty()) {
      const double prev = res.distances.back();
      const double ratio = prev > 0.0 ? dist / prev : 0.0;
      res.ratios.push_back(ratio);
      bad = ratio >= 1.0 ? bad + 1 : 0;
      if (bad >= 3) {
        throw NumericalFailure("Picard iteration is not contracting (ratio " + std::to_string(ratio) +
                               "); shorten the horizon");
      }
    }
    res.distances.push_back(dist);
    if (dist < tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

double picard_residual(const std::vector<HierarchyState>& theta, const std::vector<HierarchyState>& xi_nodes,
                       double dt, const PotentialSpec& V, double xi) {
  if (theta.size() != xi_nodes.size()) throw InvalidArgument("theta and xi node counts differ");
  static const std::array<double, 5> x = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                          0.9061798459386640};
  static const std::array<double, 5> w = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                          0.4786286704993665, 0.2369268850561891};
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t m = 0; m < theta.size(); ++m) {
    const double t = m * dt;
    HierarchyState integral = theta[m];
    for (auto& g : integral.entries) g *= 0.0;
    for (std::size_t q = 0; q < m; ++q) {
      for (std::size_t p = 0; p < 5; ++p) {
        const double lam = 0.5 * (x[p] + 1.0);
        const double s = (q + lam) * dt;
        HierarchyState th = theta[q];
        for (int k = 1; k <= th.K(); ++k) {
          th[k] *= 1.0 - lam;
          Marginal hi = theta[q + 1][k];
          hi *= lam;
          th[k] += hi;
          th[k] = free_propagate_marginal(th[k], t - s);
          th[k] *= 0.5 * dt * w[p];
          integral[k] += th[k];
        }
      }
    }
    const HierarchyState b = apply_BN(integral, V);
    HierarchyState r = theta[m];
    for (int k = 1; k <= r.K(); ++k) {
      r[k] -= xi_nodes[m][k];
      r[k] -= cplx(0.0, 1.0) * b[k];
    }
    worst = std::max(worst, h1_norm(r, xi));
    scale = std::max(scale, h1_norm(theta[m], xi));
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace hlab
