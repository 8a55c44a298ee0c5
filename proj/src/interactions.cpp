#include "hlab/interactions.hpp"

#include <cmath>

namespace hlab {

Field make_profile(const GridSpec& grid, const std::string& name, double width) {
  Field v(grid, 1);
  if (name == "zero") return v;
  if (name == "delta") {
    v[0] = 1.0 / grid.cell_volume();
    return v;
  }
  if (!(width > 0.0)) throw InvalidArgument("profile width must be positive");
  if (width >= grid.length() / 2) throw InvalidArgument("profile width must be below L/2");
  for (std::size_t p = 0; p < grid.points(); ++p) {
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double x = grid.centered_coordinate(p, a);
      r2 += x * x;
    }
    if (name == "gaussian") {
      v[p] = std::exp(-r2 / (2 * width * width));
    } else if (name == "bump") {
      const double s = r2 / (width * width);
      v[p] = s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0;
    } else {
      throw InvalidArgument("unknown potential profile '" + name + "'");
    }
  }
  double mass = 0.0;
  for (const auto& x : v.data()) mass += x.real();
  mass *= grid.cell_volume();
  if (!(mass > 0.0)) throw InvalidArgument("profile '" + name + "' is not resolved by the grid");
  v *= 1.0 / mass;
  return v;
}

PotentialSpec realize_potential(const Field& profile, double beta, long bigN, double width_hint) {
  if (profile.rank() != 1) throw InvalidArgument("potential profile must be a one-particle field");
  if (!(beta > 0.0 && beta < 0.25)) throw InvalidArgument("beta must lie in (0, 1/4)");
  if (bigN < 1) throw InvalidArgument("particle number must be at least 1");
  const GridSpec& g = profile.grid();
  const std::size_t P = g.points();
  double vmax = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    if (std::abs(profile[p].imag()) > 1e-12 || profile[p].real() < -1e-12) {
      throw InvalidArgument("potential profile must be real and nonnegative");
    }
    vmax = std::max(vmax, std::abs(profile[p]));
  }
  for (std::size_t p = 0; p < P; ++p) {
    if (std::abs(profile[p] - profile[g.difference_index(0, p)]) > 1e-12 * std::max(1.0, vmax)) {
      throw InvalidArgument("potential profile must be even");
    }
  }

  PotentialSpec V;
  V.profile = profile;
  V.beta = beta;
  V.bigN = bigN;
  V.kappa0 = 0.0;
  for (const auto& x : profile.data()) V.kappa0 += x.real();
  V.kappa0 *= g.cell_volume();

  // V^(u) = h^d sum_x V(x) exp(-i u.x) over centered coordinates, sampled at
  // u = xi_m / N^beta. The profile is even, so V^ is real.
  const double scale = std::pow(static_cast<double>(bigN), -beta);
  V.spectrum.assign(P, 0.0);
  for (std::size_t m = 0; m < P; ++m) {
    double acc = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      if (profile[p] == 0.0) continue;
      double phase = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        phase += g.frequency(g.axis_index(m, a)) * scale * g.centered_coordinate(p, a);
      }
      acc += profile[p].real() * std::cos(phase);
    }
    V.spectrum[m] = acc * g.cell_volume();
  }
  V.realized = dft_inverse(Field(g, 1, V.spectrum));
  for (auto& x : V.realized.data()) x = x.real();

  if (width_hint > 0.0) {
    const double diameter = width_hint * scale;
    if (diameter < 4 * g.spacing()) {
      V.warning = "scaled potential diameter " + std::to_string(diameter) + " is below 4 grid cells";
    }
  }
  return V;
}

PotentialSpec make_potential(const GridSpec& grid, const std::string& name, double width, double beta, long bigN) {
  const double diameter = name == "gaussian" ? 4 * width : name == "bump" ? 2 * width : 0.0;
  return realize_potential(make_profile(grid, name, width), beta, bigN, diameter);
}

namespace {

struct Layout {
  std::size_t P;
  std::size_t R;  // (n^d)^k
  int k;

  std::size_t digit(std::size_t multi, int j) const {
    // j is 1-based; slot 1 is the most significant digit.
    for (int s = k; s > j; --s) multi /= P;
    return multi % P;
  }
};

void check_slot(int j, int k, const char* what) {
  if (j < 1 || j > k) throw InvalidArgument(std::string(what) + ": slot index out of range");
}

}  // namespace

Marginal gp_collision(const Marginal& next, int j, Side side) {
  const int k = next.k() - 1;
  check_slot(j, k, "gp_collision");
  Marginal out(next.grid(), k);
  const Layout lay{next.grid().points(), out.rows(), k};
  for (std::size_t r = 0; r < lay.R; ++r) {
    for (std::size_t c = 0; c < lay.R; ++c) {
      const std::size_t y = side == Side::plus ? lay.digit(r, j) : lay.digit(c, j);
      out(r, c) = next(r * lay.P + y, c * lay.P + y);
    }
  }
  return out;
}

Marginal gp_collision_total(const Marginal& next) {
  const int k = next.k() - 1;
  Marginal out(next.grid(), k);
  for (int j = 1; j <= k; ++j) {
    out += gp_collision(next, j, Side::plus);
    out -= gp_collision(next, j, Side::minus);
  }
  return out;
}

HierarchyState gp_collision_sum(const HierarchyState& G, double kappa0) {
  HierarchyState out;
  out.xi = G.xi;
  for (int k = 1; k <= G.K(); ++k) {
    if (k < G.K()) {
      out.entries.push_back(kappa0 * gp_collision_total(G[k + 1]));
    } else {
      out.entries.emplace_back(G.grid(), k);
    }
  }
  return out;
}

Marginal bbgky_collision_main(const Marginal& next, int j, Side side, const PotentialSpec& V) {
  const int k = next.k() - 1;
  check_slot(j, k, "bbgky_collision_main");
  if (!(V.realized.grid() == next.grid())) throw InvalidArgument("potential lives on another grid");
  const GridSpec& g = next.grid();
  Marginal out(g, k);
  const Layout lay{g.points(), out.rows(), k};
  const double h = g.cell_volume();
  // Kernel of the convolution: w[x][y] = h^d V_N(x - y).
  std::vector<double> w(lay.P * lay.P);
  for (std::size_t x = 0; x < lay.P; ++x) {
    for (std::size_t y = 0; y < lay.P; ++y) w[x * lay.P + y] = h * V.realized[g.difference_index(x, y)].real();
  }
  std::vector<cplx> diag(lay.P);
  for (std::size_t r = 0; r < lay.R; ++r) {
    for (std::size_t c = 0; c < lay.R; ++c) {
      for (std::size_t y = 0; y < lay.P; ++y) diag[y] = next(r * lay.P + y, c * lay.P + y);
      const std::size_t x = side == Side::plus ? lay.digit(r, j) : lay.digit(c, j);
      const double* wx = &w[x * lay.P];
      cplx s = 0.0;
      for (std::size_t y = 0; y < lay.P; ++y) s += wx[y] * diag[y];
      out(r, c) = s;
    }
  }
  return out;
}

Marginal bbgky_main_weighted(const Marginal& next, Side side, const PotentialSpec& V) {
  const int k = next.k() - 1;
  Marginal out(next.grid(), k);
  if (k >= V.bigN) return out;
  for (int j = 1; j <= k; ++j) out += bbgky_collision_main(next, j, side, V);
  out *= static_cast<double>(V.bigN - k) / static_cast<double>(V.bigN);
  return out;
}

Marginal bbgky_collision_error(const Marginal& g, int i, int j, Side side, const PotentialSpec& V) {
  if (!(1 <= i && i < j && j <= g.k())) throw InvalidArgument("bbgky_collision_error needs 1 <= i < j <= k");
  const GridSpec& grid = g.grid();
  Marginal out = g;
  const Layout lay{grid.points(), g.rows(), g.k()};
  for (std::size_t r = 0; r < lay.R; ++r) {
    for (std::size_t c = 0; c < lay.R; ++c) {
      const std::size_t m = side == Side::plus ? r : c;
      out(r, c) *= V.realized[grid.difference_index(lay.digit(m, i), lay.digit(m, j))].real();
    }
  }
  return out;
}

HierarchyState bbgky_rhs(const HierarchyState& G, const PotentialSpec& V) {
  HierarchyState out;
  out.xi = G.xi;
  const double N = static_cast<double>(V.bigN);
  for (int k = 1; k <= G.K(); ++k) {
    Marginal comp(G.grid(), k);
    if (k <= V.bigN) {
      if (k < G.K()) {
        comp += bbgky_main_weighted(G[k + 1], Side::plus, V);
        comp -= bbgky_main_weighted(G[k + 1], Side::minus, V);
      }
      if (k >= 2) {
        Marginal err(G.grid(), k);
        for (int j = 2; j <= k; ++j) {
          for (int i = 1; i < j; ++i) {
            err += bbgky_collision_error(G[k], i, j, Side::plus, V);
            err -= bbgky_collision_error(G[k], i, j, Side::minus, V);
          }
        }
        err *= 1.0 / N;
        comp += err;
      }
    }
    out.entries.push_back(std::move(comp));
  }
  return out;
}

Marginal collision_fourier_oracle(const Marginal& gamma0, double t, const PotentialSpec* V) {
  const int k = gamma0.k() - 1;
  if (k < 1) throw InvalidArgument("collision_fourier_oracle needs a marginal with at least two particles");
  if (gamma0.k() > 3) throw InvalidArgument("collision_fourier_oracle supports k + 1 <= 3");
  const GridSpec& g = gamma0.grid();
  if (V != nullptr && !(V->realized.grid() == g)) throw InvalidArgument("potential lives on another grid");
  const std::size_t P = g.points();

  // Spectrum of U(t) gamma0: phases exp(-it|p|^2) unprimed, exp(+it|p'|^2) primed.
  Field spec = dft_forward(gamma0.kernel());
  {
    std::vector<double> ksq(P);
    for (std::size_t p = 0; p < P; ++p) ksq[p] = g.frequency_sq(p);
    const Marginal view(spec, gamma0.k());
    for (std::size_t i = 0; i < spec.size(); ++i) {
      double w = 0.0;
      for (int s = 0; s < 2 * gamma0.k(); ++s) w += (s < gamma0.k() ? 1.0 : -1.0) * ksq[spec.slot_point(i, s)];
      spec[i] *= std::exp(cplx(0.0, -t * w));
    }
  }
  const Marginal G(std::move(spec), gamma0.k());

  // g^(u; u') = L^{-2d} sum_{q,q'} V^(q + q') G^(u1 - q - q', u_2.., q; u', q').
  Marginal out(g, k);
  const std::size_t R = out.rows();
  const std::size_t tail = R / P;  // points of slots 2..k
  const double norm = std::pow(g.length(), -2.0 * g.dim());
  for (std::size_t r = 0; r < R; ++r) {
    const std::size_t u1 = r / tail;
    const std::size_t rest = r % tail;
    for (std::size_t c = 0; c < R; ++c) {
      cplx s = 0.0;
      for (std::size_t q = 0; q < P; ++q) {
        for (std::size_t qp = 0; qp < P; ++qp) {
          const std::size_t sum = g.sum_index(q, qp);
          const cplx vhat = V == nullptr ? cplx(1.0) : V->spectrum[sum];
          const std::size_t row = (g.difference_index(u1, sum) * tail + rest) * P + q;
          s += vhat * G(row, c * P + qp);
        }
      }
      out(r, c) = norm * s;
    }
  }
  return Marginal(dft_inverse(out.kernel()), k);
}

}  // namespace hlab
