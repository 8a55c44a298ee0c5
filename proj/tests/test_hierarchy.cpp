#include "doctest.h"
#include "hlab/definetti.hpp"
#include "hlab/hierarchy.hpp"
#include "hlab/random_states.hpp"
#include "oracles.hpp"

using namespace hlab;

namespace {

GridSpec small() { return GridSpec::make(1, 8, 2 * kPi); }

double state_diff(const HierarchyState& a, const HierarchyState& b) {
  double m = 0.0;
  for (int k = 1; k <= a.K(); ++k) m = std::max(m, hs_norm(a[k] - b[k]));
  return m;
}

}  // namespace

TEST_CASE("truncation schedule") {
  CHECK(k_schedule(16, 1.0) == 2);
  CHECK(k_schedule(2, 1.0) == 1);
  CHECK(k_schedule(1000, 1.0) == 6);
  CHECK(k_schedule(1000, 3.0, 10) == 10);
  CHECK(k_schedule(10, 2.0) == 4);
  CHECK(k_schedule(2, 0.1) == 1);
  for (long N = 2; N < 200; ++N) CHECK(k_schedule(N + 1, 1.5) >= k_schedule(N, 1.5));
  CHECK_THROWS_AS(k_schedule(1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(k_schedule(8, 0.0), InvalidArgument);
}

TEST_CASE("config validation and truncate") {
  EvolutionConfig c;
  CHECK_NOTHROW(c.validate());
  c.xi = 0.95;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  CHECK(EvolutionConfig{}.T0() == doctest::Approx(0.25));

  Rng rng(1);
  const HierarchyState G = mixture_hierarchy(random_mixture(small(), 2, rng), 3, 0.5);
  CHECK(truncate(G, 2).K() == 2);
  CHECK(truncate(G, 5).K() == 3);
  CHECK(truncate(truncate(G, 2), 1).K() == 1);
  CHECK(hs_norm(truncate(truncate(G, 2), 1)[1] - G[1]) == 0.0);
  CHECK_THROWS_AS(truncate(G, 0), InvalidArgument);
}

TEST_CASE("kinetic commutator is i d/dt of the free flow") {
  const auto g = small();
  Rng rng(2);
  const Marginal m = random_kernel(g, 2, rng, 2);
  const double e = 1e-4;
  Marginal fd = free_propagate_marginal(m, e) - free_propagate_marginal(m, -e);
  fd *= cplx(0.0, 1.0 / (2 * e));
  const Marginal kc = kinetic_commutator(m);
  CHECK(hs_norm(fd - kc) / hs_norm(kc) < 1e-6);
}

TEST_CASE("free hierarchy follows U(t)") {
  const auto g = small();
  Rng rng(3);
  const HierarchyState G0 = mixture_hierarchy(random_mixture(g, 2, rng), 2, 0.5);
  EvolutionConfig c;
  c.collisions = false;
  c.dt = 0.01;
  c.t_final = 0.2;
  for (auto method : {StepMethod::strang_splitting, StepMethod::rk4_interaction_picture}) {
    c.method = method;
    const Trajectory tr = gp_evolve(G0, c);
    REQUIRE(tr.times.size() == 21);
    CHECK(tr.times.back() == doctest::Approx(0.2));
    CHECK(state_diff(tr.states.back(), free_propagate_state(G0, 0.2)) < 1e-12);
  }
}

TEST_CASE("factorized data: GP with mixture closure reproduces NLS products") {
  const auto g = small();
  Rng rng(4);
  const Field phi = random_smooth_field(g, rng, 2);
  const Mixture mu({{1.0, phi}}, Support::sphere);
  NlsOptions nopt;
  nopt.dt = 1e-4;
  nopt.scheme = SplitScheme::yoshida4;
  const Field phit = nls_flow(phi, 0.1, nopt);
  const HierarchyState G0 = mixture_hierarchy(mu, 2, 0.5);
  std::vector<double> err;
  for (double dt : {0.01, 0.005}) {
    EvolutionConfig c;
    c.dt = dt;
    c.t_final = 0.1;
    c.closure = Closure::mixture_closure;
    c.closure_dt = 1e-4;
    const Trajectory tr = gp_evolve(G0, c, &mu);
    err.push_back(hs_norm(tr.states.back()[1] - pure_product_marginal(phit, 1)));
    CHECK(hs_norm(tr.states.back()[2] - pure_product_marginal(phit, 2)) < 1e-4);
  }
  CHECK(err[1] < err[0]);
  CHECK(err[0] / err[1] > 3.0);
}

TEST_CASE("the two steppers agree") {
  const auto g = small();
  Rng rng(5);
  const Mixture mu = random_mixture(g, 2, rng);
  const HierarchyState G0 = mixture_hierarchy(mu, 2, 0.5);
  EvolutionConfig c;
  c.dt = 2e-3;
  c.t_final = 0.05;
  c.closure = Closure::mixture_closure;
  const auto a = gp_evolve(G0, c, &mu).states.back();
  c.method = StepMethod::rk4_interaction_picture;
  const auto b = gp_evolve(G0, c, &mu).states.back();
  CHECK(state_diff(a, b) < 1e-5);
}

TEST_CASE("zero-top GP keeps trace, hermiticity and records as requested") {
  const auto g = small();
  Rng rng(6);
  const HierarchyState G0 = mixture_hierarchy(random_mixture(g, 3, rng), 2, 0.5);
  EvolutionConfig c;
  c.dt = 5e-3;
  c.t_final = 0.1;
  c.record_every = 4;
  int calls = 0;
  const Trajectory tr = gp_evolve(G0, c, nullptr, [&](double, const HierarchyState&) { ++calls; });
  CHECK(calls == 20);
  CHECK(tr.states.size() == 6);
  for (const auto& s : tr.states) {
    CHECK(std::abs(trace(s[1]) - 1.0) < 1e-10);
    CHECK(hermiticity_defect(s[2]) < 1e-12);
  }
  CHECK_THROWS_AS(gp_evolve(truncate(G0, 1), c), InvalidArgument);
  c.closure = Closure::mixture_closure;
  CHECK_THROWS_AS(gp_evolve(G0, c), InvalidArgument);
}

TEST_CASE("BBGKY with N = 1 is free") {
  const auto g = small();
  Rng rng(7);
  const HierarchyState G0 = mixture_hierarchy(random_mixture(g, 2, rng), 1, 0.5);
  const PotentialSpec V = make_potential(g, "gaussian", 0.6, 0.2, 1);
  EvolutionConfig c;
  c.K = 1;
  c.dt = 0.01;
  c.t_final = 0.1;
  const Trajectory tr = bbgky_evolve(G0, c, V);
  CHECK(state_diff(tr.states.back(), free_propagate_state(G0, 0.1)) < 1e-12);
  c.K = 2;
  const HierarchyState H0 = mixture_hierarchy(random_mixture(g, 2, rng), 2, 0.5);
  const PotentialSpec V4 = make_potential(g, "gaussian", 0.6, 0.2, 4);
  c.t_final = 0.2;
  c.dt = 2e-3;
  for (auto method : {StepMethod::strang_splitting, StepMethod::rk4_interaction_picture}) {
    c.method = method;
    const Trajectory bt = bbgky_evolve(H0, c, V4);
    for (const auto& s : bt.states) {
      for (int k = 1; k <= 2; ++k) CHECK(std::abs(trace(s[k]) - 1.0) < 1e-8);
      CHECK(hermiticity_defect(s[2]) < 1e-9);
      CHECK(permutation_defect(s[2]) < 1e-9);
    }
  }
  c.t_final = 0.1;
  CHECK_THROWS_AS(bbgky_evolve(mixture_hierarchy(random_mixture(g, 2, rng), 2, 0.5), c, V), InvalidArgument);
}

TEST_CASE("BBGKY with a delta potential and many particles approaches GP") {
  const auto g = small();
  Rng rng(8);
  const Mixture mu = random_mixture(g, 2, rng);
  const HierarchyState G0 = mixture_hierarchy(mu, 2, 0.5);
  EvolutionConfig c;
  c.dt = 5e-3;
  c.t_final = 0.1;
  const auto gp = gp_evolve(G0, c).states.back();
  const PotentialSpec V = realize_potential(make_profile(g, "delta", 1.0), 0.2, 1000000);
  const auto bb = bbgky_evolve(G0, c, V).states.back();
  CHECK(state_diff(gp, bb) < 1e-5);
}

TEST_CASE("GP residual vanishes to second order on an exact mixture trajectory") {
  const auto g = small();
  Rng rng(9);
  const Mixture mu = random_mixture(g, 2, rng);
  NlsOptions nopt;
  nopt.dt = 1e-4;
  nopt.scheme = SplitScheme::yoshida4;
  std::vector<double> worst;
  for (double dt : {0.02, 0.01}) {
    Trajectory tr;
    Mixture cur = mu;
    for (int s = 0; s <= 10; ++s) {
      tr.times.push_back(s * dt);
      tr.states.push_back(mixture_hierarchy(cur, 2, 0.5));
      cur = flow_mixture(cur, dt, nopt);
    }
    const auto res = gp_residual(tr);
    REQUIRE(res.size() == 1);
    REQUIRE(res[0].size() == 9);
    double m = 0.0;
    for (double r : res[0]) m = std::max(m, r);
    worst.push_back(m);
  }
  CHECK(worst[0] / worst[1] == doctest::Approx(4.0).epsilon(0.1));
}
