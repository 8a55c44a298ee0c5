// hlab: command line front end for the hierarchy lab.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hlab/definetti.hpp"
#include "hlab/duhamel.hpp"
#include "hlab/harness.hpp"
#include "hlab/hierarchy.hpp"
#include "hlab/interactions.hpp"
#include "hlab/nbody.hpp"
#include "hlab/random_states.hpp"

namespace fs = std::filesystem;
using namespace hlab;

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<double> beta, width, t_final, dt;
  std::optional<long> bigN;
  std::optional<std::string> profile;
  std::optional<int> k_marginals, m_max, windows, n, samples, threads;
  std::optional<std::uint64_t> seed;
  std::vector<long> ladder;
};

ExperimentConfig load(const Overrides& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : ExperimentConfig::from_ini(o.config);
  if (o.beta) c.beta = *o.beta;
  if (o.width) c.width = *o.width;
  if (o.t_final) c.t_final = *o.t_final;
  if (o.dt) c.dt = *o.dt;
  if (o.bigN) c.bigN = *o.bigN;
  if (o.profile) c.profile = *o.profile;
  if (o.k_marginals) c.k_max = *o.k_marginals;
  if (o.m_max) c.m_max = *o.m_max;
  if (o.windows) c.windows = *o.windows;
  if (o.n) c.n = *o.n;
  if (o.samples) c.samples = *o.samples;
  if (o.threads) c.threads = *o.threads;
  if (o.seed) c.seed = *o.seed;
  if (!o.ladder.empty()) c.ladder = o.ladder;
  if (!o.out.empty()) c.output_dir = o.out;
  c.validate();
  fs::create_directories(c.output_dir);
  return c;
}

std::string path_in(const ExperimentConfig& c, const std::string& name) {
  return (fs::path(c.output_dir) / name).string();
}

void finish(const ExperimentConfig& c, const std::string& name, const Report& r,
            const nlohmann::json& extra = nlohmann::json::object()) {
  write_csv(path_in(c, name + ".csv"), r.rows);
  write_manifest(path_in(c, name + ".json"), c, r, extra);
  std::cout << "wrote " << r.rows.size() << " rows to " << path_in(c, name + ".csv") << '\n';
  if (!r.complete) std::cerr << "run stopped early: " << r.error << '\n';
}

// One Marginal file per (k, step) plus a JSON manifest with per-step norms.
void dump_trajectory(const ExperimentConfig& c, const std::string& name, const Trajectory& traj,
                     const nlohmann::json& extra) {
  const fs::path dir = fs::path(c.output_dir) / name;
  fs::create_directories(dir);
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const HierarchyState& G = traj.states[s];
    nlohmann::json entry = {{"t", traj.times[s]}, {"files", nlohmann::json::array()}};
    std::vector<double> tr, hs;
    for (int k = 1; k <= G.K(); ++k) {
      const std::string file = "k" + std::to_string(k) + "_step" + std::to_string(s) + ".hlab";
      write_marginal((dir / file).string(), G[k]);
      entry["files"].push_back(file);
      tr.push_back(trace(G[k]).real());
      hs.push_back(hs_norm(G[k]));
    }
    entry["trace"] = tr;
    entry["hs_norm"] = hs;
    entry["h1_xi"] = hierarchy_norm(G, 1.0, NormFlavor::hilbert_schmidt);
    steps.push_back(entry);
  }
  nlohmann::json manifest = {{"config", c.to_json()}, {"steps", steps}, {"extra", extra}};
  if (traj.states.size() >= 3 && traj.states.front().K() >= 2) {
    manifest["gp_residual"] = gp_residual(traj);
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  std::cout << "wrote " << traj.states.size() << " steps to " << dir.string() << '\n';
}

EvolutionConfig evolution_from(const ExperimentConfig& c, int record_every) {
  EvolutionConfig e;
  e.dt = c.dt;
  e.t_final = c.t_final;
  e.K = c.k_max;
  e.xi = c.xi;
  e.xi_prime = c.xi_prime;
  e.closure = Closure::mixture_closure;
  e.closure_dt = std::min(c.dt, 1e-3) / 4;
  e.record_every = record_every;
  return e;
}

int simulate_nbody(const ExperimentConfig& c) {
  const GridSpec grid = c.grid();
  Rng rng(c.seed);
  const Field phi = random_smooth_field(grid, rng);
  const PotentialSpec V = make_potential(grid, c.profile, c.width, c.beta, c.bigN);
  if (!V.warning.empty()) std::cerr << "warning: " << V.warning << '\n';
  const NBodyState s0 = factorized_state(phi, static_cast<int>(c.bigN), V);
  Report r;
  const std::string id = "s" + std::to_string(c.seed);
  const double e0 = energy_moment(s0, 1);
  const auto traj = nbody_evolve(s0, c.dt, c.t_final, 1 << 30);
  NBodyState s1 = s0;
  s1.psi = traj.states.back();
  const double e1 = energy_moment(s1, 1);
  r.rows.push_back({"nbody", id, c.bigN, c.k_max, 0.0, "energy", e0});
  r.rows.push_back({"nbody", id, c.bigN, c.k_max, c.t_final, "energy", e1});
  r.rows.push_back({"nbody", id, c.bigN, c.k_max, c.t_final, "norm", l2_norm(s1.psi)});
  nlohmann::json moments = nlohmann::json::object();
  for (int k = 1; k <= std::min<int>(2, static_cast<int>(c.bigN)); ++k) {
    moments[std::to_string(k)] = energy_moment(s0, k);
  }
  const int kmax = std::min<int>(c.k_max, static_cast<int>(c.bigN));
  for (int k = 1; k <= kmax; ++k) {
    const Marginal g = extract_marginal(s1.psi, k);
    write_marginal(path_in(c, "nbody_gamma" + std::to_string(k) + ".hlab"), g);
    r.rows.push_back({"nbody", id, c.bigN, k, c.t_final, "trace", trace(g).real()});
  }
  finish(c, "nbody", r, {{"energy_moments", moments}, {"potential_warning", V.warning}});
  return 0;
}

int simulate_gp(const ExperimentConfig& c, bool bbgky) {
  const GridSpec grid = c.grid();
  Rng rng(c.seed);
  const Mixture mu = random_mixture(grid, c.atoms, rng);
  const HierarchyState G0 = mixture_hierarchy(mu, c.k_max, c.xi);
  const int stride = std::max(1, static_cast<int>(std::lround(c.t_final / c.dt)) / std::max(c.samples, 1));
  EvolutionConfig e = evolution_from(c, stride);
  if (bbgky) {
    const PotentialSpec V = make_potential(grid, c.profile, c.width, c.beta, c.bigN);
    if (!V.warning.empty()) std::cerr << "warning: " << V.warning << '\n';
    dump_trajectory(c, "bbgky", bbgky_evolve(G0, e, V, &mu), {{"potential_warning", V.warning}});
  } else {
    dump_trajectory(c, "gp", gp_evolve(G0, e, &mu), nlohmann::json::object());
  }
  return 0;
}

int duhamel_check(const ExperimentConfig& c, int j_max) {
  const GridSpec grid = c.grid();
  Rng rng(c.seed);
  const Mixture mu = random_mixture(grid, c.atoms, rng);
  const int K = j_max + 1;
  const HierarchyState X = mixture_hierarchy(mu, K, c.xi);
  const PotentialSpec V = make_potential(grid, c.profile, c.width, c.beta, c.bigN);
  const StateSeries xi = [&](double t) { return free_propagate_state(X, t); };
  Report r;
  const std::string id = "s" + std::to_string(c.seed);
  const std::vector<double> Ts{0.01, 0.02, 0.04};
  nlohmann::json fits = nlohmann::json::object();
  for (int j = 1; j <= j_max; ++j) {
    std::vector<double> lt, ln;
    for (double T : Ts) {
      const double v = sobolev_norm(duhamel_iterate(xi, j, V, T, 16)[1], 1.0);
      r.rows.push_back({"duhamel", id, c.bigN, K, T, "duh" + std::to_string(j) + "_h1", v});
      lt.push_back(std::log(T));
      ln.push_back(std::log(v));
    }
    // Least-squares slope of log norm against log T.
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
      mx += lt[i] / lt.size();
      my += ln[i] / ln.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
      sxy += (lt[i] - mx) * (ln[i] - my);
      sxx += (lt[i] - mx) * (lt[i] - mx);
    }
    const double slope = sxy / sxx;
    fits[std::to_string(j)] = slope;
    r.rows.push_back({"duhamel", id, c.bigN, K, 0.0, "duh" + std::to_string(j) + "_exponent", slope});
  }
  finish(c, "duhamel", r, {{"fitted_exponents", fits}});
  return 0;
}

int picard(const ExperimentConfig& c, int M) {
  const GridSpec grid = c.grid();
  Rng rng(c.seed);
  const Mixture mu = random_mixture(grid, c.atoms, rng);
  const HierarchyState X = mixture_hierarchy(mu, c.k_max, c.xi);
  const PotentialSpec V = make_potential(grid, c.profile, c.width, c.beta, c.bigN);
  EvolutionConfig e = evolution_from(c, 1);
  e.K = c.k_max;
  const double T = e.T0() / 4;
  const double dt = T / M;
  std::vector<HierarchyState> nodes;
  for (int m = 0; m <= M; ++m) nodes.push_back(free_propagate_state(X, m * dt));
  const PicardResult res = picard_fixed_point(nodes, dt, V, e);
  const double residual = picard_residual(res.theta, nodes, dt, V, c.xi);
  Report r;
  const std::string id = "s" + std::to_string(c.seed);
  for (std::size_t i = 0; i < res.distances.size(); ++i) {
    r.rows.push_back({"picard", id, c.bigN, c.k_max, T, "distance_it" + std::to_string(i + 1), res.distances[i]});
  }
  for (std::size_t i = 0; i < res.ratios.size(); ++i) {
    r.rows.push_back({"picard", id, c.bigN, c.k_max, T, "ratio_it" + std::to_string(i + 2), res.ratios[i]});
  }
  r.rows.push_back({"picard", id, c.bigN, c.k_max, T, "residual", residual});
  finish(c, "picard", r, {{"converged", res.converged}, {"iterations", res.iterations}, {"T", T}});
  return res.converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for BBGKY and Gross-Pitaevskii hierarchies"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("-c,--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("-o,--out", o.out, "Output directory");
  app.add_option("--beta", o.beta, "Potential scaling exponent in (0, 1/4)");
  app.add_option("--big-n", o.bigN, "Particle number N");
  app.add_option("--profile", o.profile, "Potential profile: gaussian, bump, delta, zero");
  app.add_option("--profile-width", o.width, "Profile width");
  app.add_option("--k-marginals", o.k_marginals, "Number of marginals / truncation level K");
  app.add_option("--t-final", o.t_final, "Final time");
  app.add_option("--dt", o.dt, "Time step");
  app.add_option("--m-max", o.m_max, "Highest energy functional order");
  app.add_option("--windows", o.windows, "Number of chained time windows");
  app.add_option("--n", o.n, "Grid points per axis");
  app.add_option("--samples", o.samples, "Report times after t = 0");
  app.add_option("--threads", o.threads, "Worker threads for ladders");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--ladder", o.ladder, "Particle-number ladder")->delimiter(',');

  auto* nbody = app.add_subcommand("simulate-nbody", "Evolve a factorized N-body state and extract marginals");
  auto* gp = app.add_subcommand("simulate-gp", "Evolve a truncated GP hierarchy from a random mixture");
  auto* bbgky = app.add_subcommand("simulate-bbgky", "Evolve a truncated BBGKY hierarchy from a random mixture");
  auto* conv = app.add_subcommand("convergence", "N-body marginals against the GP hierarchy along the ladder");
  auto* cons = app.add_subcommand("conservation", "Positivity, admissibility and energy functional battery");
  auto* coll = app.add_subcommand("collision-limit", "BBGKY main collision term against the contact term");
  auto* duh = app.add_subcommand("duhamel-check", "Iterated Duhamel terms and their time scaling");
  int j_max = 2;
  duh->add_option("--j-max", j_max, "Highest Duhamel level")->check(CLI::Range(1, 3));
  auto* pic = app.add_subcommand("picard", "Picard fixed point of the BBGKY integral equation");
  int nodes = 32;
  pic->add_option("--nodes", nodes, "Time subintervals")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  try {
    const ExperimentConfig c = load(o);
    if (*nbody) return simulate_nbody(c);
    if (*gp) return simulate_gp(c, false);
    if (*bbgky) return simulate_gp(c, true);
    if (*conv) {
      finish(c, "convergence", run_convergence(c));
      return 0;
    }
    if (*cons) {
      finish(c, "conservation", run_conservation(c));
      return 0;
    }
    if (*coll) {
      finish(c, "collision_limit", run_collision_limit(c));
      return 0;
    }
    if (*duh) return duhamel_check(c, j_max);
    if (*pic) return picard(c, nodes);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
