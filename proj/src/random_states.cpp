#include "hlab/random_states.hpp"

#include <cmath>

namespace hlab {

namespace {

std::vector<cplx> smooth_spectrum(const GridSpec& grid, Rng& rng, int max_mode, double decay, int slots) {
  if (max_mode < 0) max_mode = grid.n() / 4;
  std::normal_distribution<double> gauss;
  const std::size_t P = grid.points();
  const std::size_t total = checked_pow(P, static_cast<std::size_t>(slots));
  std::vector<cplx> spec(total, 0.0);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    double m2 = 0.0;
    bool inside = true;
    for (int s = 0; s < slots && inside; ++s) {
      const std::size_t p = rest % P;
      rest /= P;
      for (int a = 0; a < grid.dim(); ++a) {
        const int m = grid.wave_number(grid.axis_index(p, a));
        inside = inside && std::abs(m) <= max_mode;
        m2 += static_cast<double>(m) * m;
      }
    }
    // Draw for every index so the stream does not depend on the cutoff.
    const double re = gauss(rng);
    const double im = gauss(rng);
    if (inside) spec[i] = std::exp(-decay * m2) * cplx(re, im);
  }
  return spec;
}

}  // namespace

Field random_smooth_field(const GridSpec& grid, Rng& rng, int max_mode, double decay) {
  Field f = dft_inverse(Field(grid, 1, smooth_spectrum(grid, rng, max_mode, decay, 1)));
  const double n = l2_norm(f);
  f *= 1.0 / n;
  return f;
}

Mixture random_mixture(const GridSpec& grid, int atoms, Rng& rng, Support support, int max_mode) {
  if (atoms < 1) throw InvalidArgument("need at least one atom");
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> shrink(0.5, 1.0);
  std::vector<double> w(static_cast<std::size_t>(atoms));
  double total = 0.0;
  for (auto& x : w) total += (x = expo(rng) + 1e-3);
  std::vector<Atom> out;
  double acc = 0.0;
  for (int a = 0; a < atoms; ++a) {
    Field phi = random_smooth_field(grid, rng, max_mode);
    if (support == Support::ball) phi *= shrink(rng);
    // Last weight absorbs rounding so the sum is exactly representable as 1.
    const double weight = a + 1 == atoms ? 1.0 - acc : w[static_cast<std::size_t>(a)] / total;
    acc += weight;
    out.push_back({weight, std::move(phi)});
  }
  return Mixture(std::move(out), support);
}

Marginal random_kernel(const GridSpec& grid, int k, Rng& rng, int max_mode) {
  Field f = dft_inverse(Field(grid, 2 * k, smooth_spectrum(grid, rng, max_mode, 0.25, 2 * k)));
  const double n = l2_norm(f);
  f *= 1.0 / n;
  return Marginal(std::move(f), k);
}

Marginal random_symmetric_kernel(const GridSpec& grid, int k, Rng& rng, int terms) {
  std::normal_distribution<double> gauss;
  Marginal g(grid, k);
  for (int a = 0; a < terms; ++a) {
    const Field f = random_smooth_field(grid, rng);
    Marginal p = pure_product_marginal(f, k);
    p *= gauss(rng);
    g += p;
  }
  return g;
}

}  // namespace hlab
