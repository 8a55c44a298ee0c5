// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "hlab/definetti.hpp"
#include "hlab/duhamel.hpp"
#include "hlab/harness.hpp"
#include "hlab/hierarchy.hpp"
#include "hlab/interactions.hpp"
#include "hlab/marginals.hpp"
#include "hlab/nbody.hpp"
#include "hlab/random_states.hpp"

using namespace hlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

GridSpec desk_grid() { return GridSpec::make(1, 16, 2 * kPi); }

Outcome c1_norm_identity() {
  const auto g = desk_grid();
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    Field phi = random_smooth_field(g, rng);
    phi *= 0.7 + 0.3 * trial;
    // One draw at k = 3 keeps the rank-6 transforms inside the time budget.
    for (int k = 1; k <= (trial == 0 ? 3 : 2); ++k) {
      const Marginal gk = pure_product_marginal(phi, k);
      for (double alpha : {0.0, 1.0}) {
        const double lhs = sobolev_norm(gk, alpha);
        const double rhs = std::pow(sobolev_norm(phi, alpha), 2 * k);
        worst = std::max(worst, rel(lhs, rhs));
      }
    }
  }
  return {worst < 1e-10, fmt("max rel err %.3e (tol 1e-10)", worst)};
}

// Tr_4 |Psi><Psi| summed directly over the traced variable.
Marginal implicit_trace_of_full(const Field& psi, int N) {
  const auto& g = psi.grid();
  const std::size_t P = g.points();
  std::size_t R = 1;
  for (int i = 0; i < N - 1; ++i) R *= P;
  Marginal out(g, N - 1);
  const double h = g.cell_volume();
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t c = 0; c < R; ++c) {
      cplx s = 0.0;
      for (std::size_t y = 0; y < P; ++y) s += psi[r * P + y] * std::conj(psi[c * P + y]);
      out(r, c) = h * s;
    }
  }
  return out;
}

Outcome c2_admissibility() {
  const auto g = desk_grid();
  Rng rng(202);
  const auto V = make_potential(g, "gaussian", 0.5, 0.2, 4);
  std::vector<Field> atoms;
  for (int a = 0; a < 3; ++a) atoms.push_back(random_smooth_field(g, rng));
  const NBodyState st = superposed_state(atoms, {cplx(1.0, 0.2), cplx(-0.5, 0.7), cplx(0.3, -0.4)}, 4, V);
  std::vector<Marginal> gam;
  for (int k = 1; k <= 3; ++k) gam.push_back(extract_marginal(st, k));
  double worst = 0.0;
  for (int k = 1; k <= 2; ++k) worst = std::max(worst, max_abs_diff(partial_trace(gam[k]).kernel(), gam[k - 1].kernel()));
  const double top = max_abs_diff(implicit_trace_of_full(st.psi, 4).kernel(), gam[2].kernel());
  worst = std::max(worst, top);
  const double tr1 = std::abs(trace(gam[0]) - 1.0);
  return {worst < 1e-12 && tr1 < 1e-12, fmt("max chain defect %.3e (k=3 link %.3e), |Tr g1 - 1| %.3e (tol 1e-12)",
                                           worst, top, tr1)};
}

Outcome c3_fourier_oracle() {
  const auto g = desk_grid();
  const auto V = make_potential(g, "gaussian", 0.5, 0.2, 16);
  Rng rng(303);
  double worst = 0.0;
  for (int s = 0; s < 10; ++s) {
    const Marginal gam = random_kernel(g, 2, rng);
    for (double t : {0.0, 0.1}) {
      const Marginal spatial = bbgky_collision_main(free_propagate_marginal(gam, t), 1, Side::plus, V);
      const Marginal fourier = collision_fourier_oracle(gam, t, &V);
      worst = std::max(worst, hs_norm(spatial - fourier) / hs_norm(fourier));
    }
  }
  return {worst < 1e-9, fmt("max rel HS diff %.3e over 20 cases (tol 1e-9)", worst)};
}

Outcome c4_collision_limit() {
  const auto g = desk_grid();
  Rng rng(404);
  const Field phi = random_smooth_field(g, rng, 2);
  const Marginal g2 = pure_product_marginal(phi, 2);
  const Marginal limit = gp_collision(g2, 1, Side::plus);
  std::vector<double> d;
  std::string vals;
  for (long N : {4L, 16L, 64L, 256L}) {
    const auto V = make_potential(g, "gaussian", 0.5, 0.2, N);
    Marginal diff = bbgky_main_weighted(g2, Side::plus, V);
    diff -= cplx(V.kappa0) * limit;
    d.push_back(hs_norm(diff));
    vals += fmt("%sN=%ld:%.3e", vals.empty() ? "" : " ", N, d.back());
  }
  bool mono = true;
  for (std::size_t i = 1; i < d.size(); ++i) mono = mono && d[i] < d[i - 1];
  const double ratio = d.back() / d.front();
  return {mono && ratio < 0.1, fmt("%s; final/initial %.3f (need < 0.1, strictly decreasing: %s)", vals.c_str(), ratio,
                                   mono ? "yes" : "no")};
}

Outcome c5_energy_functional() {
  const auto g = desk_grid();
  Rng rng(505);
  double worst = 0.0, worst_atomic = 0.0;
  for (int s = 0; s < 5; ++s) {
    const Mixture mu = random_mixture(g, 3, rng, Support::sphere);
    const double direct = energy_functional_direct(mixture_marginal(mu, 2), 1);
    worst = std::max(worst, rel(direct, energy_functional_mixture(mu, 1)));
    worst_atomic = std::max(worst_atomic, rel(direct, energy_functional_atomic(mu, 1)));
  }
  Field c(g, 1);
  for (auto& v : c.data()) v = 1.0 / std::sqrt(2 * kPi);
  const Mixture one(std::vector<Atom>{{1.0, c}}, Support::sphere);
  const double closed = 1.0 + 1.0 / (8 * kPi);
  const double direct_c = energy_functional_direct(pure_product_marginal(c, 2), 1);
  const double mix_c = energy_functional_mixture(one, 1);
  const bool pass = worst < 1e-9 && std::abs(direct_c - closed) < 1e-10 && std::abs(mix_c - closed) < 1e-10;
  return {pass, fmt("direct vs 1/2+E max rel %.3e (tol 1e-9); constant atom: direct %.12f, 1/2+E %.12f, "
                    "closed form %.12f; direct vs E max rel %.3e",
                    worst, direct_c, mix_c, closed, worst_atomic)};
}

Outcome c6_conservation() {
  const auto g = desk_grid();
  Rng rng(606);
  const Mixture mu = random_mixture(g, 3, rng, Support::sphere);
  NlsOptions opts;
  opts.dt = 1e-3;
  opts.scheme = SplitScheme::yoshida4;
  double worst = 0.0;
  const double k1 = energy_functional_mixture(mu, 1), k2 = energy_functional_mixture(mu, 2);
  Mixture cur = mu;
  for (int s = 1; s <= 10; ++s) {
    cur = flow_mixture(cur, 0.1, opts);
    worst = std::max(worst, rel(energy_functional_mixture(cur, 1), k1));
    worst = std::max(worst, rel(energy_functional_mixture(cur, 2), k2));
  }
  return {worst < 1e-7, fmt("max rel drift of <K^(1)>, <K^(2)> over t in (0,1]: %.3e (tol 1e-7)", worst)};
}

Outcome c7_positivity() {
  const auto g = desk_grid();
  Rng rng(707);
  const Mixture mu = random_mixture(g, 3, rng, Support::sphere);
  double worst = 0.0;
  Mixture cur = mu;
  for (int s = 1; s <= 10; ++s) {
    cur = flow_mixture(cur, 0.1);
    for (int k = 1; k <= 2; ++k) worst = std::max(worst, psd_defect(mixture_marginal(cur, k)));
  }
  return {worst < 1e-10, fmt("max psd defect %.3e over 10 times, k <= 2 (tol 1e-10)", worst)};
}

double gp_residual_at(const Mixture& mu, double dt, double T) {
  EvolutionConfig cfg;
  cfg.K = 2;
  cfg.dt = dt;
  cfg.t_final = T;
  cfg.closure = Closure::mixture_closure;
  cfg.closure_dt = 1e-4;
  const Trajectory traj = gp_evolve(mixture_hierarchy(mu, 2, cfg.xi), cfg, &mu);
  const auto res = gp_residual(traj);
  double worst = 0.0;
  for (double r : res[0]) worst = std::max(worst, r);
  return worst;
}

Outcome c8_gp_residual() {
  const auto g = desk_grid();
  Rng rng(808);
  const Mixture mu = random_mixture(g, 3, rng, Support::sphere);
  const double T = 0.2;
  const double r1 = gp_residual_at(mu, 0.02, T);
  const double r2 = gp_residual_at(mu, 0.01, T);
  const double ratio = r1 / r2;
  return {ratio > 3.0 && ratio < 5.0,
          fmt("residual dt=0.02: %.3e, dt=0.01: %.3e, ratio %.3f (need 4 +- 25%%)", r1, r2, ratio)};
}

Outcome c9_derivation() {
  const auto g = desk_grid();
  Rng rng(909);
  const Field phi = random_smooth_field(g, rng, 2);
  const double t = 0.2, dt = 1e-3;
  NlsOptions opts;
  opts.dt = dt;
  opts.scheme = SplitScheme::yoshida4;
  const Marginal target = pure_product_marginal(nls_flow(phi, t, opts), 1);
  std::vector<double> d;
  std::string vals;
  for (int N = 2; N <= 5; ++N) {
    const auto V = make_potential(g, "gaussian", 0.5, 0.2, N);
    const auto traj = nbody_evolve(factorized_state(phi, N, V), dt, t, 1 << 30, SplitScheme::yoshida4);
    d.push_back(trace_distance(extract_marginal(traj.states.back(), 1), target));
    vals += fmt(" N=%d:%.4e", N, d.back());
  }
  bool mono = true;
  for (std::size_t i = 1; i < d.size(); ++i) mono = mono && d[i] < d[i - 1];
  return {mono, fmt("trace distance%s (monotone: %s)", vals.c_str(), mono ? "yes" : "no")};
}

Outcome c10_energy_estimate() {
  const auto g = desk_grid();
  Rng rng(1010);
  double worst = 1e300;
  for (int N : {4, 6}) {
    const auto V = make_potential(g, "gaussian", 0.5, 0.2, N);
    for (int s = 0; s < 5; ++s) {
      std::vector<Field> atoms{random_smooth_field(g, rng), random_smooth_field(g, rng)};
      const NBodyState st = superposed_state(atoms, {cplx(1.0), cplx(0.5, 0.5)}, N, V);
      for (int k : {1, 2}) worst = std::min(worst, energy_estimate_check(st, k, 0.5));
    }
  }
  return {worst >= 1.0, fmt("min ratio %.4f over N in {4,6}, k in {1,2}, 5 states (need >= 1)", worst)};
}

Outcome c11_picard() {
  const auto g = desk_grid();
  Rng rng(1111);
  const Mixture mu = random_mixture(g, 3, rng, Support::sphere);
  EvolutionConfig cfg;
  cfg.K = 2;
  const double T = cfg.T0() / 4;
  const int M = 16;
  const double dt = T / M;
  const auto V = make_potential(g, "gaussian", 0.5, 0.2, 16);
  const HierarchyState G0 = mixture_hierarchy(mu, 2, cfg.xi);
  std::vector<HierarchyState> xi_nodes;
  for (int m = 0; m <= M; ++m) xi_nodes.push_back(free_propagate_state(G0, m * dt));
  const PicardResult pr = picard_fixed_point(xi_nodes, dt, V, cfg);
  double max_ratio = 0.0;
  for (double r : pr.ratios) max_ratio = std::max(max_ratio, r);
  const double res = picard_residual(pr.theta, xi_nodes, dt, V, cfg.xi);
  return {pr.converged && res < 1e-7 && max_ratio < 1.0,
          fmt("T=%.4f, %d iterations, converged %s, residual %.3e (tol 1e-7), max contraction ratio %.3e", T,
              pr.iterations, pr.converged ? "yes" : "no", res, max_ratio)};
}

Outcome c12_weakstar() {
  const auto g = desk_grid();
  Rng rng(1212);
  const Field a = random_smooth_field(g, rng), b = random_smooth_field(g, rng);
  const Marginal lim = pure_product_marginal(a, 1);
  const Marginal other = pure_product_marginal(b, 1);
  std::vector<Marginal> obs;
  for (int i = 0; i < 12; ++i) obs.push_back(random_kernel(g, 1, rng));
  double prev = 1e300;
  bool mono = true, below = false, trace_ok = true;
  int hit = -1;
  for (int n = 1; n <= 40; ++n) {
    const double e = std::ldexp(1.0, -n);
    Marginal gn = cplx(1.0 - e) * lim;
    gn += cplx(e) * other;
    trace_ok = trace_ok && trace(gn).real() <= 1.0 + 1e-12;
    const double m = weakstar_metric(gn, lim, obs);
    mono = mono && m < prev;
    prev = m;
    if (!below && m < 1e-6) {
      below = true;
      hit = n;
    }
  }
  return {mono && below && trace_ok,
          fmt("metric below 1e-6 at n=%d, final %.3e, monotone %s, traces <= 1 %s", hit, prev, mono ? "yes" : "no",
              trace_ok ? "yes" : "no")};
}

Outcome c13_determinism() {
  ExperimentConfig cfg;
  cfg.ladder = {2, 3};
  cfg.t_final = 0.05;
  cfg.threads = 2;
  cfg.seed = 7;
  const std::string a = to_csv(run_convergence(cfg).rows);
  const std::string b = to_csv(run_convergence(cfg).rows);
  ExperimentConfig c2;
  c2.seed = 7;
  c2.t_final = 0.05;
  const std::string c = to_csv(run_conservation(c2).rows);
  const std::string d = to_csv(run_conservation(c2).rows);
  const bool pass = !a.empty() && a == b && c == d;
  return {pass, fmt("convergence CSV %zu bytes identical: %s; conservation CSV %zu bytes identical: %s", a.size(),
                    a == b ? "yes" : "no", c.size(), c == d ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<double, std::function<Outcome()>>> criteria = {
      {1, c1_norm_identity},     {10, c2_admissibility}, {30, c3_fourier_oracle}, {60, c4_collision_limit},
      {30, c5_energy_functional}, {120, c6_conservation}, {60, c7_positivity},     {120, c8_gp_residual},
      {600, c9_derivation},       {120, c10_energy_estimate}, {120, c11_picard},  {10, c12_weakstar},
      {60, c13_determinism}};
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i + 1) != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = sec < criteria[i].first;
    if (!in_time) o.detail += fmt(" [over time budget %.0f s]", criteria[i].first);
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s criterion %zu: %s (%.2f s)\n", pass ? "PASS" : "FAIL", i + 1, o.detail.c_str(), sec);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
