#include "doctest.h"
#include "hlab/interactions.hpp"
#include "hlab/random_states.hpp"
#include "oracles.hpp"

using namespace hlab;

namespace {

GridSpec small() { return GridSpec::make(1, 8, 2 * kPi); }

Marginal outer(const Field& a, const Field& b) {
  Marginal m(a.grid(), 1);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.rows(); ++c) m(r, c) = a[r] * std::conj(b[c]);
  return m;
}

// (V * |phi|^2)(x) by direct periodic convolution.
Field convolve_density(const Field& phi, const Field& V) {
  const auto& g = phi.grid();
  const std::size_t n = g.n();
  Field out(g, 1);
  for (std::size_t x = 0; x < n; ++x) {
    cplx s = 0.0;
    for (std::size_t y = 0; y < n; ++y) s += V[(x + n - y) % n] * std::norm(phi[y]);
    out[x] = g.cell_volume() * s;
  }
  return out;
}

}  // namespace

TEST_CASE("profiles are normalized and even") {
  const auto g = GridSpec::make(1, 16, 2 * kPi);
  for (const char* name : {"gaussian", "bump", "delta"}) {
    const Field v = make_profile(g, name, 0.8);
    cplx mass = 0.0;
    for (const auto& x : v.data()) mass += x;
    CHECK(std::abs(g.cell_volume() * mass - 1.0) < 1e-13);
    for (std::size_t p = 1; p < g.points(); ++p) CHECK(std::abs(v[p] - v[g.points() - p]) < 1e-13);
  }
  CHECK(l2_norm(make_profile(g, "zero", 1.0)) == 0.0);
  CHECK_THROWS_AS(make_profile(g, "square", 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_profile(g, "gaussian", -1.0), InvalidArgument);
  CHECK_THROWS_AS(make_profile(g, "gaussian", 4.0), InvalidArgument);
}

TEST_CASE("realized potential keeps its mass and sharpens with N") {
  const auto g = GridSpec::make(1, 32, 2 * kPi);
  const Field prof = make_profile(g, "gaussian", 0.5);
  const PotentialSpec V1 = realize_potential(prof, 0.2, 1);
  CHECK(max_abs_diff(V1.realized, prof) < 1e-13);
  CHECK(V1.kappa0 == doctest::Approx(1.0));
  double prev_peak = V1.realized[0].real();
  for (long N : {4L, 32L, 256L}) {
    const PotentialSpec V = realize_potential(prof, 0.2, N);
    cplx mass = 0.0;
    for (const auto& x : V.realized.data()) mass += x;
    CHECK(std::abs(g.cell_volume() * mass - 1.0) < 1e-12);
    CHECK(V.realized[0].real() > prev_peak);
    prev_peak = V.realized[0].real();
  }
  CHECK_THROWS_AS(realize_potential(prof, 0.3, 4), InvalidArgument);
  CHECK_THROWS_AS(realize_potential(prof, 0.2, 0), InvalidArgument);
  const PotentialSpec sharp = make_potential(GridSpec::make(1, 8, 2 * kPi), "gaussian", 0.3, 0.24, 1 << 20);
  CHECK_FALSE(sharp.warning.empty());
  CHECK(make_potential(g, "gaussian", 1.0, 0.1, 2).warning.empty());
}

TEST_CASE("GP collision on a pure product") {
  const auto g = small();
  Rng rng(1);
  const Field phi = random_smooth_field(g, rng);
  Field dens_phi = phi;
  for (std::size_t p = 0; p < g.points(); ++p) dens_phi[p] *= std::norm(phi[p]);
  const Marginal g2 = pure_product_marginal(phi, 2);
  CHECK(max_abs_diff(gp_collision(g2, 1, Side::plus).kernel(), outer(dens_phi, phi).kernel()) < 1e-14);
  CHECK(max_abs_diff(gp_collision(g2, 1, Side::minus).kernel(), outer(phi, dens_phi).kernel()) < 1e-14);
  const Marginal total = gp_collision_total(g2);
  CHECK(max_abs_diff(total.kernel(), (outer(dens_phi, phi) - outer(phi, dens_phi)).kernel()) < 1e-14);
  CHECK_THROWS_AS(gp_collision(g2, 2, Side::plus), InvalidArgument);
}

TEST_CASE("GP collision at k = 2 hits the right slot") {
  const auto g = small();
  Rng rng(2);
  const Marginal g3 = random_kernel(g, 3, rng);
  const Marginal b = gp_collision(g3, 2, Side::minus);
  const std::size_t P = g.points();
  for (std::size_t x1 : {0UL, 3UL})
    for (std::size_t x2 : {1UL, 7UL})
      for (std::size_t y1 : {2UL, 5UL})
        for (std::size_t y2 : {4UL, 6UL}) {
          const cplx expect = g3((x1 * P + x2) * P + y2, (y1 * P + y2) * P + y2);
          CHECK(b(x1 * P + x2, y1 * P + y2) == expect);
        }
}

TEST_CASE("BBGKY main term on a pure product is the Hartree field") {
  const auto g = small();
  Rng rng(3);
  const Field phi = random_smooth_field(g, rng);
  const PotentialSpec V = make_potential(g, "gaussian", 0.6, 0.2, 8);
  Field hartree = convolve_density(phi, V.realized);
  for (std::size_t p = 0; p < g.points(); ++p) hartree[p] *= phi[p];
  const Marginal g2 = pure_product_marginal(phi, 2);
  CHECK(max_abs_diff(bbgky_collision_main(g2, 1, Side::plus, V).kernel(), outer(hartree, phi).kernel()) < 1e-14);
  CHECK(max_abs_diff(bbgky_collision_main(g2, 1, Side::minus, V).kernel(), outer(phi, hartree).kernel()) < 1e-14);
  Marginal weighted = bbgky_collision_main(g2, 1, Side::plus, V);
  weighted *= 7.0 / 8.0;
  CHECK(max_abs_diff(bbgky_main_weighted(g2, Side::plus, V).kernel(), weighted.kernel()) < 1e-15);
}

TEST_CASE("delta potential reduces BBGKY main to GP") {
  const auto g = small();
  Rng rng(4);
  const Marginal g3 = random_kernel(g, 3, rng);
  const PotentialSpec V = realize_potential(make_profile(g, "delta", 1.0), 0.2, 1);
  for (int j : {1, 2})
    for (Side s : {Side::plus, Side::minus})
      CHECK(max_abs_diff(bbgky_collision_main(g3, j, s, V).kernel(), gp_collision(g3, j, s).kernel()) < 1e-12);
}

TEST_CASE("error term multiplies by the pair potential") {
  const auto g = small();
  Rng rng(5);
  const Marginal g2 = random_kernel(g, 2, rng);
  const PotentialSpec V = make_potential(g, "bump", 1.2, 0.1, 4);
  const Marginal e = bbgky_collision_error(g2, 1, 2, Side::plus, V);
  const Marginal f = bbgky_collision_error(g2, 1, 2, Side::minus, V);
  const std::size_t P = g.points();
  for (std::size_t r = 0; r < g2.rows(); r += 5)
    for (std::size_t c = 0; c < g2.rows(); c += 3) {
      const std::size_t x1 = r / P, x2 = r % P, y1 = c / P, y2 = c % P;
      CHECK(std::abs(e(r, c) - V.realized[(x1 + P - x2) % P] * g2(r, c)) < 1e-15);
      CHECK(std::abs(f(r, c) - V.realized[(y1 + P - y2) % P] * g2(r, c)) < 1e-15);
    }
  CHECK_THROWS_AS(bbgky_collision_error(g2, 2, 2, Side::plus, V), InvalidArgument);
}

TEST_CASE("BBGKY right-hand side assembly") {
  const auto g = small();
  Rng rng(6);
  HierarchyState G;
  G.entries = {random_kernel(g, 1, rng), random_kernel(g, 2, rng), random_kernel(g, 3, rng)};
  const PotentialSpec V = make_potential(g, "gaussian", 0.6, 0.2, 2);
  const HierarchyState R = bbgky_rhs(G, V);
  REQUIRE(R.K() == 3);
  // Level 1: (N - 1)/N main, no error term.
  const Marginal l1 = bbgky_main_weighted(G[2], Side::plus, V) - bbgky_main_weighted(G[2], Side::minus, V);
  CHECK(max_abs_diff(R[1].kernel(), l1.kernel()) < 1e-15);
  // Level 2 = N: main weight vanishes, only the error commutator survives.
  Marginal l2 = bbgky_collision_error(G[2], 1, 2, Side::plus, V) - bbgky_collision_error(G[2], 1, 2, Side::minus, V);
  l2 *= 0.5;
  CHECK(max_abs_diff(R[2].kernel(), l2.kernel()) < 1e-15);
  // Above N everything is zero.
  CHECK(l2_norm(R[3].kernel()) == 0.0);

  const HierarchyState S = gp_collision_sum(G, 2.0);
  Marginal s1 = gp_collision_total(G[2]);
  s1 *= 2.0;
  CHECK(max_abs_diff(S[1].kernel(), s1.kernel()) < 1e-15);
  CHECK(l2_norm(S[3].kernel()) == 0.0);
}

TEST_CASE("momentum-space oracle without a potential") {
  const auto g = small();
  Rng rng(7);
  for (int k1 : {2, 3}) {
    const Marginal gam = random_kernel(g, k1, rng);
    for (double t : {0.0, 0.25}) {
      const Marginal spatial = gp_collision(free_propagate_marginal(gam, t), 1, Side::plus);
      const Marginal fourier = collision_fourier_oracle(gam, t, nullptr);
      CHECK(hs_norm(spatial - fourier) / hs_norm(spatial) < 1e-12);
    }
  }
  const PotentialSpec V = make_potential(g, "gaussian", 0.6, 0.2, 8);
  const Marginal g3 = random_kernel(g, 3, rng);
  const Marginal sp = bbgky_collision_main(free_propagate_marginal(g3, 0.1), 1, Side::plus, V);
  CHECK(hs_norm(sp - collision_fourier_oracle(g3, 0.1, &V)) / hs_norm(sp) < 1e-12);
}

TEST_CASE("collision terms annihilate traces and preserve Hermiticity") {
  const auto g = small();
  Rng rng(8);
  const Marginal s3 = random_symmetric_kernel(g, 3, rng);
  const PotentialSpec V = make_potential(g, "gaussian", 0.6, 0.2, 8);
  const double scale = hs_norm(s3);
  const Marginal b = gp_collision_total(s3);
  CHECK(std::abs(trace(b)) < 1e-10 * scale);
  // i (B+ - B-) of a Hermitian kernel is Hermitian.
  CHECK(hermiticity_defect(cplx(0.0, 1.0) * b) < 1e-13);
  CHECK(hermiticity_defect(gp_collision(s3, 1, Side::plus) + gp_collision(s3, 1, Side::minus)) < 1e-13);
  HierarchyState G;
  G.entries = {partial_trace(partial_trace(s3)), partial_trace(s3), s3};
  const HierarchyState R = bbgky_rhs(G, V);
  for (int k = 1; k <= 3; ++k) {
    CHECK(std::abs(trace(R[k])) < 1e-10 * scale);
    CHECK(hermiticity_defect(cplx(0.0, 1.0) * R[k]) < 1e-13);
  }
}
