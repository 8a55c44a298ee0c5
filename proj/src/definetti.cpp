#include "hlab/definetti.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hlab {

namespace {

void kinetic(Field& phi, double t) {
  const int sign = 1;
  apply_quadratic_multiplier(phi, std::span<const int>(&sign, 1),
                             [t](double w) { return std::exp(cplx(0.0, -t * w)); });
}

void potential(Field& phi, double t, double coupling) {
  for (auto& v : phi.data()) v *= std::exp(cplx(0.0, -t * coupling * std::norm(v)));
}

void strang(Field& phi, double dt, double coupling) {
  kinetic(phi, dt / 2);
  potential(phi, dt, coupling);
  kinetic(phi, dt / 2);
}

long step_count(double t, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("NLS step must be positive");
  if (!(t >= 0.0)) throw InvalidArgument("NLS flow time must be nonnegative");
  return t == 0.0 ? 0 : static_cast<long>(std::ceil(t / dt - 1e-9));
}

}  // namespace

Field nls_step(const Field& phi, double dt, double coupling, SplitScheme scheme) {
  if (phi.rank() != 1) throw InvalidArgument("NLS acts on one-particle fields");
  Field out = phi;
  if (scheme == SplitScheme::strang) {
    strang(out, dt, coupling);
  } else {
    const double cbrt2 = std::cbrt(2.0);
    const double w1 = 1.0 / (2.0 - cbrt2);
    const double w0 = -cbrt2 / (2.0 - cbrt2);
    strang(out, w1 * dt, coupling);
    strang(out, w0 * dt, coupling);
    strang(out, w1 * dt, coupling);
  }
  return out;
}

Field nls_flow(const Field& phi, double t, const NlsOptions& opts) {
  const long steps = step_count(t, opts.dt);
  Field out = phi;
  if (steps == 0) return out;
  const double h = t / static_cast<double>(steps);
  for (long s = 0; s < steps; ++s) out = nls_step(out, h, opts.coupling, opts.scheme);
  return out;
}

std::vector<Field> nls_evolve(const Field& phi, double dt, double t_final, const NlsOptions& opts,
                              int record_every) {
  if (record_every < 1) throw InvalidArgument("record_every must be at least 1");
  const long steps = step_count(t_final, dt);
  std::vector<Field> out{phi};
  if (steps == 0) return out;
  const double h = t_final / static_cast<double>(steps);
  Field cur = phi;
  for (long s = 0; s < steps; ++s) {
    cur = nls_step(cur, h, opts.coupling, opts.scheme);
    if ((s + 1) % record_every == 0 || s + 1 == steps) out.push_back(cur);
  }
  return out;
}

double nls_mass(const Field& phi) {
  const double n = l2_norm(phi);
  return n * n;
}

namespace {

double l4_pow4(const Field& phi) {
  double s = 0.0;
  for (const auto& v : phi.data()) s += std::norm(v) * std::norm(v);
  return s * phi.grid().cell_volume();
}

}  // namespace

double nls_energy(const Field& phi) {
  const double h1 = sobolev_norm(phi, 1.0);
  return 0.5 * h1 * h1 * nls_mass(phi) + 0.25 * l4_pow4(phi);
}

double nls_hamiltonian(const Field& phi) {
  const double h1 = sobolev_norm(phi, 1.0);
  return 0.5 * (h1 * h1 - nls_mass(phi)) + 0.25 * l4_pow4(phi);
}

Mixture flow_mixture(const Mixture& mu, double t, const NlsOptions& opts) {
  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms()) atoms.push_back({a.weight, nls_flow(a.phi, t, opts)});
  return Mixture(std::move(atoms), mu.support());
}

namespace {

// K on the last two particles: 1/2 (1 - Delta_{x_a}) Tr_b + 1/4 B+_{a;b}.
Marginal reduce_last_pair(const Marginal& g) {
  const int p = g.k();
  Marginal kin = partial_trace(g);
  std::vector<cplx> table(g.grid().points());
  for (std::size_t q = 0; q < table.size(); ++q) table[q] = 1.0 + g.grid().frequency_sq(q);
  std::vector<const std::vector<cplx>*> symbols(static_cast<std::size_t>(2 * (p - 1)), nullptr);
  symbols[static_cast<std::size_t>(p - 2)] = &table;
  apply_slot_multipliers(kin.kernel(), symbols);
  kin *= 0.5;
  Marginal col = gp_collision(g, p - 1, Side::plus);
  col *= 0.25;
  return kin + col;
}

}  // namespace

double energy_functional_direct(const Marginal& gamma_2m, int m) {
  if (m < 0) throw InvalidArgument("energy functional order must be nonnegative");
  if (m == 0) return 1.0;
  if (gamma_2m.k() != 2 * m) throw InvalidArgument("<K^(m)> needs gamma^(2m)");
  Marginal g = gamma_2m;
  std::vector<int> order(static_cast<std::size_t>(2 * m));
  std::iota(order.begin(), order.end(), 1);
  // K_1 K_3 ... K_{2m-1}: the rightmost factor acts first.
  for (int l = 2 * m - 1; l >= 1; l -= 2) {
    const int p = g.k();
    std::vector<int> next_order;
    std::vector<int> pos;
    for (int s = 0; s < p; ++s) {
      if (order[static_cast<std::size_t>(s)] != l && order[static_cast<std::size_t>(s)] != l + 1) {
        next_order.push_back(order[static_cast<std::size_t>(s)]);
        pos.push_back(s);
      }
    }
    const auto find = [&](int label) {
      return static_cast<int>(std::find(order.begin(), order.end(), label) - order.begin());
    };
    pos.push_back(find(l));
    pos.push_back(find(l + 1));
    std::vector<int> perm(pos);
    for (int s : pos) perm.push_back(s + p);
    bool identity = true;
    for (int s = 0; s < 2 * p; ++s) identity = identity && perm[static_cast<std::size_t>(s)] == s;
    if (!identity) g = Marginal(permute_slots(g.kernel(), perm), p);
    g = reduce_last_pair(g);
    next_order.push_back(l);
    order = next_order;
  }
  const cplx value = trace(g);
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real()))) {
    throw NumericalFailure("energy functional has imaginary part " + std::to_string(value.imag()));
  }
  return value.real();
}

double energy_functional_direct(const HierarchyState& G, int m) {
  if (m == 0) return 1.0;
  if (G.K() < 2 * m) throw InvalidArgument("<K^(m)> needs gamma^(2m) in the state");
  return energy_functional_direct(G[2 * m], m);
}

double energy_functional_mixture(const Mixture& mu, int m) {
  if (m < 0) throw InvalidArgument("energy functional order must be nonnegative");
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.weight * std::pow(0.5 + nls_energy(a.phi), m);
  return s;
}

double energy_functional_atomic(const Mixture& mu, int m) {
  if (m < 0) throw InvalidArgument("energy functional order must be nonnegative");
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.weight * std::pow(nls_energy(a.phi), m);
  return s;
}

double support_bound(const Mixture& mu) {
  double m = 0.0;
  for (const auto& a : mu.atoms()) m = std::max(m, sobolev_norm(a.phi, 1.0));
  return m;
}

std::vector<double> support_moments(const Mixture& mu, const std::vector<int>& ks) {
  std::vector<double> out;
  for (int k : ks) {
    if (k < 1) throw InvalidArgument("moment order must be positive");
    double s = 0.0;
    for (const auto& a : mu.atoms()) s += a.weight * std::pow(sobolev_norm(a.phi, 1.0), 2 * k);
    out.push_back(std::pow(s, 1.0 / (2 * k)));
  }
  return out;
}

EnergyReport energy_report(const Mixture& mu, int m_max) {
  EnergyReport r;
  for (const auto& a : mu.atoms()) r.atom_energy.push_back(nls_energy(a.phi));
  for (int m = 0; m <= m_max; ++m) r.functional.push_back(energy_functional_mixture(mu, m));
  r.support = support_bound(mu);
  return r;
}

GwpReport gwp_window_chain(const Mixture& mu, double T, int windows, const EvolutionConfig& config,
                           double tolerance) {
  if (mu.support() != Support::sphere) throw InvalidArgument("window chaining needs a sphere-supported mixture");
  if (windows < 1) throw InvalidArgument("need at least one window");
  if (!(T > 0.0)) throw InvalidArgument("window length must be positive");
  EvolutionConfig cfg = config;
  cfg.t_final = T;
  cfg.closure = Closure::mixture_closure;
  cfg.validate();

  GwpReport report;
  const HierarchyState initial = mixture_hierarchy(mu, cfg.K, cfg.xi);
  const double bound = hierarchy_norm(initial, 1.0, NormFlavor::trace, cfg.xi_prime);
  Mixture current = mu;
  NlsOptions nls;
  nls.dt = cfg.closure_dt;
  for (int w = 0; w < windows; ++w) {
    const HierarchyState G0 = mixture_hierarchy(current, cfg.K, cfg.xi);
    double worst = 0.0;
    const Trajectory traj = gp_evolve(G0, cfg, &current, [&](double, const HierarchyState& G) {
      worst = std::max(worst, hierarchy_norm(G, 1.0, NormFlavor::hilbert_schmidt, cfg.xi));
    });
    worst = std::max(worst, hierarchy_norm(G0, 1.0, NormFlavor::hilbert_schmidt, cfg.xi));
    const HierarchyState& end = traj.states.back();
    WindowRecord rec;
    rec.window = w;
    rec.t = (w + 1) * T;
    rec.norm_h1 = worst;
    rec.bound = bound;
    for (const auto& g : end.entries) rec.psd.push_back(psd_defect(g));
    if (end.K() >= 2) rec.admissibility = admissibility_defect(end);
    rec.ok = worst <= bound + tolerance;
    report.ok = report.ok && rec.ok;
    report.windows.push_back(std::move(rec));
    current = flow_mixture(current, T, nls);
  }
  return report;
}

}  // namespace hlab
