#include "hlab/harness.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hlab/definetti.hpp"
#include "hlab/hierarchy.hpp"
#include "hlab/interactions.hpp"
#include "hlab/nbody.hpp"
#include "hlab/random_states.hpp"

namespace hlab {

namespace {

// ptree::get with a default swallows conversion failures; this does not.
template <typename T>
void read_key(const boost::property_tree::ptree& tree, const std::string& path, T& out) {
  const auto raw = tree.get_optional<std::string>(path);
  if (!raw) return;
  const auto value = tree.get_optional<T>(path);
  if (!value) throw FormatError("bad config value for " + path + ": '" + *raw + "'");
  out = *value;
}

std::vector<long> parse_ladder(const std::string& text) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item.substr(b), &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad ladder entry '" + item + "'");
    }
    if (item.find_first_not_of(" \t", b + used) != std::string::npos) {
      throw InvalidArgument("bad ladder entry '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_ini(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw FormatError(std::string("cannot parse config: ") + e.what());
  }
  ExperimentConfig c;
  try {
    read_key(tree, "grid.dim", c.dim);
    read_key(tree, "grid.n", c.n);
    read_key(tree, "grid.L", c.L);
    read_key(tree, "potential.profile", c.profile);
    read_key(tree, "potential.width", c.width);
    read_key(tree, "potential.beta", c.beta);
    read_key(tree, "potential.big_n", c.bigN);
    if (auto ladder = tree.get_optional<std::string>("experiment.ladder")) {
      try {
        c.ladder = parse_ladder(*ladder);
      } catch (const InvalidArgument& e) {
        throw FormatError(std::string("bad config value: ") + e.what());
      }
    }
    read_key(tree, "experiment.b1", c.b1);
    read_key(tree, "experiment.xi", c.xi);
    read_key(tree, "experiment.xi_prime", c.xi_prime);
    read_key(tree, "experiment.xi1", c.xi1);
    read_key(tree, "experiment.dt", c.dt);
    read_key(tree, "experiment.t_final", c.t_final);
    read_key(tree, "experiment.samples", c.samples);
    read_key(tree, "experiment.k_max", c.k_max);
    read_key(tree, "experiment.m_max", c.m_max);
    read_key(tree, "experiment.windows", c.windows);
    read_key(tree, "experiment.atoms", c.atoms);
    read_key(tree, "experiment.seed", c.seed);
    read_key(tree, "experiment.threads", c.threads);
    read_key(tree, "experiment.output", c.output_dir);
  } catch (const pt::ptree_error& e) {
    throw FormatError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  (void)grid();
  if (!(beta > 0.0 && beta < 0.25)) throw InvalidArgument("beta must lie in (0, 1/4)");
  if (bigN < 1) throw InvalidArgument("big_n must be positive");
  if (ladder.empty()) throw InvalidArgument("ladder must not be empty");
  for (long N : ladder) {
    if (N < 2) throw InvalidArgument("ladder entries must be at least 2");
  }
  if (!(b1 > 0.0)) throw InvalidArgument("b1 must be positive");
  if (!(xi1 > 0.0 && xi1 < xi && xi < xi_prime && xi_prime < 1.0)) {
    throw InvalidArgument("need 0 < xi1 < xi < xi' < 1");
  }
  if (!(dt > 0.0) || !(t_final >= 0.0)) throw InvalidArgument("need dt > 0 and t_final >= 0");
  if (samples < 1) throw InvalidArgument("samples must be at least 1");
  if (k_max < 1 || m_max < 0 || windows < 1 || atoms < 1) throw InvalidArgument("counts must be positive");
  if (threads < 1) throw InvalidArgument("threads must be at least 1");
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"grid", {{"dim", dim}, {"n", n}, {"L", L}}},
          {"potential", {{"profile", profile}, {"width", width}, {"beta", beta}, {"big_n", bigN}}},
          {"experiment",
           {{"ladder", ladder},
            {"b1", b1},
            {"xi", xi},
            {"xi_prime", xi_prime},
            {"xi1", xi1},
            {"dt", dt},
            {"t_final", t_final},
            {"samples", samples},
            {"k_max", k_max},
            {"m_max", m_max},
            {"windows", windows},
            {"atoms", atoms},
            {"seed", seed},
            {"threads", threads},
            {"output", output_dir}}}};
}

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::string out = "experiment,id,N,K,t,metric,value\n";
  for (const auto& r : rows) {
    out += r.experiment + ',' + r.id + ',' + std::to_string(r.N) + ',' + std::to_string(r.K) + ',' +
           format_double(r.t) + ',' + r.metric + ',' + format_double(r.value) + '\n';
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<ReportRow>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << to_csv(rows);
}

void write_manifest(const std::string& path, const ExperimentConfig& config, const Report& report,
                    const nlohmann::json& extra) {
  const Budget b = Budget::current();
  nlohmann::json j = {{"config", config.to_json()},
                      {"versions",
                       {{"hlab", "0.1.0"},
                        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                      "." + std::to_string(EIGEN_MINOR_VERSION)},
                        {"fftw", std::string(fftw_version)}}},
                      {"budget", {{"max_elements", b.max_elements}, {"max_eigen_rows", b.max_eigen_rows}}},
                      {"rows", report.rows.size()},
                      {"complete", report.complete},
                      {"error", report.error},
                      {"extra", extra}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

namespace {

// Runs body(i) for every ladder index on up to `threads` workers and merges
// the per-entry reports in ladder order.
template <typename Body>
Report run_ladder(const ExperimentConfig& config, Body body) {
  const std::size_t count = config.ladder.size();
  std::vector<Report> parts(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i, parts[i]);
      } catch (const Error& e) {
        parts[i].complete = false;
        parts[i].error = "N=" + std::to_string(config.ladder[i]) + ": " + e.what();
      }
    }
  };
  const int nthreads = std::min<int>(config.threads, static_cast<int>(count));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  Report out;
  for (auto& p : parts) {
    out.rows.insert(out.rows.end(), p.rows.begin(), p.rows.end());
    if (!p.complete && out.complete) {
      out.complete = false;
      out.error = p.error;
    }
  }
  return out;
}

std::string run_id(const ExperimentConfig& c) { return "s" + std::to_string(c.seed); }

HierarchyState difference(const HierarchyState& a, const HierarchyState& b) {
  HierarchyState d = a;
  for (int k = 1; k <= d.K(); ++k) d[k] -= b[k];
  return d;
}

}  // namespace

Report run_convergence(const ExperimentConfig& config) {
  config.validate();
  const GridSpec grid = config.grid();
  Rng rng(config.seed);
  const Field phi = random_smooth_field(grid, rng);
  const Mixture point({{1.0, phi}}, Support::sphere);

  return run_ladder(config, [&](std::size_t i, Report& part) {
    const long N = config.ladder[i];
    const PotentialSpec V = make_potential(grid, config.profile, config.width, config.beta, N);
    const int K = std::min<int>(k_schedule(N, config.b1, config.k_max), static_cast<int>(N));
    const NBodyState state = factorized_state(phi, static_cast<int>(N), V);

    EvolutionConfig evo;
    evo.dt = config.dt;
    evo.K = K;
    evo.xi = config.xi;
    evo.xi_prime = config.xi_prime;
    evo.closure = Closure::mixture_closure;
    evo.closure_dt = std::min(config.dt, 1e-3) / 4;
    evo.t_final = config.t_final / config.samples;

    HierarchyState gp = mixture_hierarchy(point, K, config.xi);
    Field psi = state.psi;
    Mixture mu = point;
    NlsOptions nls;
    nls.dt = evo.closure_dt;
    const auto emit = [&](double t, const HierarchyState& gp_state, const Field& wave) {
      HierarchyState nb;
      nb.xi = config.xi;
      for (int k = 1; k <= K; ++k) nb.entries.push_back(extract_marginal(wave, k));
      const std::string id = run_id(config);
      part.rows.push_back({"convergence", id, N, K, t, "h1_distance",
                           hierarchy_norm(difference(nb, gp_state), 1.0, NormFlavor::hilbert_schmidt)});
      part.rows.push_back({"convergence", id, N, K, t, "trace_distance_1", trace_distance(nb[1], gp_state[1])});
      const HierarchyState bn = bbgky_rhs(nb, V);
      const HierarchyState b = gp_collision_sum(gp_state, V.kappa0);
      part.rows.push_back({"convergence", id, N, K, t, "collision_distance",
                           hierarchy_norm(difference(bn, b), 0.0, NormFlavor::hilbert_schmidt)});
    };
    emit(0.0, gp, psi);
    for (int s = 1; s <= config.samples; ++s) {
      const double t = config.t_final * s / config.samples;
      gp = gp_evolve(gp, evo, &mu).states.back();
      mu = flow_mixture(mu, evo.t_final, nls);
      NBodyState cur = state;
      cur.psi = psi;
      psi = nbody_evolve(cur, config.dt, evo.t_final, 1 << 30).states.back();
      emit(t, gp, psi);
    }
  });
}

Report run_conservation(const ExperimentConfig& config) {
  config.validate();
  const GridSpec grid = config.grid();
  Rng rng(config.seed);
  const Mixture mu0 = random_mixture(grid, config.atoms, rng, Support::sphere);
  const int K = std::max(config.k_max, 2);
  const std::string id = run_id(config);
  const Budget budget = Budget::current();
  Report report;
  try {
    std::vector<double> k0;
    for (int m = 0; m <= config.m_max; ++m) k0.push_back(energy_functional_mixture(mu0, m));
    NlsOptions nls;
    nls.dt = config.dt;
    Mixture mu = mu0;
    for (int s = 0; s <= config.samples; ++s) {
      const double t = config.t_final * s / config.samples;
      if (s > 0) mu = flow_mixture(mu, config.t_final / config.samples, nls);
      const HierarchyState G = mixture_hierarchy(mu, K, config.xi);
      for (int k = 1; k <= K; ++k) {
        if (G[k].rows() > budget.max_eigen_rows) break;
        report.rows.push_back({"conservation", id, 0, K, t, "psd_defect_k" + std::to_string(k), psd_defect(G[k])});
      }
      const auto adm = admissibility_defect(G);
      report.rows.push_back(
          {"conservation", id, 0, K, t, "admissibility_max", *std::max_element(adm.begin(), adm.end())});
      for (int m = 1; m <= config.m_max; ++m) {
        const double v = energy_functional_mixture(mu, m);
        report.rows.push_back({"conservation", id, 0, K, t, "K" + std::to_string(m) + "_mixture", v});
        report.rows.push_back({"conservation", id, 0, K, t, "K" + std::to_string(m) + "_rel_drift",
                               std::abs(v - k0[static_cast<std::size_t>(m)]) / std::abs(k0[static_cast<std::size_t>(m)])});
        const std::size_t need = checked_pow(grid.points(), static_cast<std::size_t>(4 * m));
        if (need <= budget.max_elements) {
          const double direct = energy_functional_direct(mixture_marginal(mu, 2 * m), m);
          report.rows.push_back({"conservation", id, 0, K, t, "K" + std::to_string(m) + "_direct", direct});
        }
      }
    }
    if (config.t_final > 0.0) {
      EvolutionConfig evo;
      evo.dt = config.dt;
      evo.K = K;
      evo.xi = config.xi1;
      evo.xi_prime = config.xi_prime;
      evo.closure_dt = std::min(config.dt, 1e-3) / 4;
      const GwpReport chain = gwp_window_chain(mu0, config.t_final / config.windows, config.windows, evo);
      for (const auto& w : chain.windows) {
        report.rows.push_back({"conservation", id, 0, K, w.t, "window_norm_h1", w.norm_h1});
        report.rows.push_back({"conservation", id, 0, K, w.t, "window_bound", w.bound});
        report.rows.push_back({"conservation", id, 0, K, w.t, "window_ok", w.ok ? 1.0 : 0.0});
        if (!w.admissibility.empty()) {
          report.rows.push_back({"conservation", id, 0, K, w.t, "window_admissibility_k1", w.admissibility.front()});
        }
      }
    }
  } catch (const Error& e) {
    report.complete = false;
    report.error = e.what();
  }
  return report;
}

Report run_collision_limit(const ExperimentConfig& config) {
  config.validate();
  const GridSpec grid = config.grid();
  Rng rng(config.seed);
  const Field phi = random_smooth_field(grid, rng);
  const Marginal gamma = pure_product_marginal(phi, 2);
  const Marginal contact = gp_collision(gamma, 1, Side::plus);
  constexpr double t_oracle = 0.1;
  const Marginal flowed = free_propagate_marginal(gamma, t_oracle);

  return run_ladder(config, [&](std::size_t i, Report& part) {
    const long N = config.ladder[i];
    const PotentialSpec V = make_potential(grid, config.profile, config.width, config.beta, N);
    const std::string id = run_id(config);
    const Marginal target = V.kappa0 * contact;
    part.rows.push_back({"collision_limit", id, N, 2, 0.0, "main_minus_gp_hs",
                         hs_norm(bbgky_main_weighted(gamma, Side::plus, V) - target)});
    part.rows.push_back({"collision_limit", id, N, 2, 0.0, "main_minus_gp_hs_unweighted",
                         hs_norm(bbgky_collision_main(gamma, 1, Side::plus, V) - target)});
    const Marginal spatial = bbgky_collision_main(flowed, 1, Side::plus, V);
    const Marginal fourier = collision_fourier_oracle(gamma, t_oracle, &V);
    part.rows.push_back({"collision_limit", id, N, 2, t_oracle, "fourier_oracle_rel",
                         hs_norm(spatial - fourier) / std::max(hs_norm(spatial), 1e-300)});
  });
}

}  // namespace hlab
