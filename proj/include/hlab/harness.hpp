#pragma once

// Experiment configuration, report rows and the convergence / conservation /
// collision-limit drivers behind the command line tool.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hlab/grid.hpp"

namespace hlab {

struct ExperimentConfig {
  int dim = 1;
  int n = 16;
  double L = 2 * kPi;
  std::string profile = "gaussian";
  double width = 0.5;
  double beta = 0.2;
  long bigN = 16;
  std::vector<long> ladder{2, 3, 4, 5};
  double b1 = 1.0;
  double xi = 0.5;
  double xi_prime = 0.9;
  double xi1 = 0.3;
  double dt = 1e-3;
  double t_final = 0.2;
  /// Number of evenly spaced report times after t = 0.
  int samples = 1;
  int k_max = 2;
  int m_max = 2;
  int windows = 1;
  int atoms = 3;
  std::uint64_t seed = 1;
  /// Worker threads for ladder entries.
  int threads = 1;
  std::string output_dir = ".";

  /// Reads an INI file (sections grid, potential, experiment); keys absent
  /// from the file keep their defaults.
  static ExperimentConfig from_ini(const std::string& path);
  void validate() const;
  GridSpec grid() const { return GridSpec::make(dim, n, L); }
  nlohmann::json to_json() const;
};

struct ReportRow {
  std::string experiment;
  std::string id;
  long N = 0;
  int K = 0;
  double t = 0.0;
  std::string metric;
  double value = 0.0;
};

struct Report {
  std::vector<ReportRow> rows;
  /// False when the run stopped early; `error` then says why.
  bool complete = true;
  std::string error;
};

/// CSV with header experiment,id,N,K,t,metric,value; numbers use %.17g.
std::string to_csv(const std::vector<ReportRow>& rows);
void write_csv(const std::string& path, const std::vector<ReportRow>& rows);
/// Manifest: config echo, library versions, budget caps, row count, extras.
void write_manifest(const std::string& path, const ExperimentConfig& config, const Report& report,
                    const nlohmann::json& extra = nlohmann::json::object());

/// BBGKY-from-N-body vs GP hierarchy along the N ladder.
Report run_convergence(const ExperimentConfig& config);
/// De Finetti battery: positivity, admissibility, <K^(m)> drift, window chain.
Report run_conservation(const ExperimentConfig& config);
/// ||B^main_N gamma - kappa0 B+ gamma|| along the ladder and the Fourier oracle.
Report run_collision_limit(const ExperimentConfig& config);

}  // namespace hlab
