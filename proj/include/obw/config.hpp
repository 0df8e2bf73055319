#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "obw/errors.hpp"

namespace obw {

/// Fully-resolved run configuration. Parsed from a flat `section.key = value`
/// text file; unknown keys are hard errors.
struct RunConfig {
  std::string experiment;  // one of the six registered experiments

  std::string law_name = "uniform3";
  double law_param = 0.0;

  std::string obstacle_family = "quadratic";
  double obstacle_param = 0.5;
  long obstacle_n = 8192;  // single-n experiments (tails, covariance)

  std::vector<long> n_grid;       // empty = per-experiment default
  std::vector<double> p_grid;     // alpha_p experiment
  double beta = 1.0;

  double lambda_min = 2.0;
  double lambda_max = 0.0;  // 0 = min(8, n^{1/6})
  long lambda_points = 9;
  long tail_k = 0;  // 0 = n/2

  double cov_max_sep_factor = 8.0;  // separations up to factor * n^{2/3}
  long cov_points = 10;

  double kernel_k_cap = 12.0;
  double kernel_mass_tol = 1e-10;
  double slope_margin = 1e-6;

  double sampler_coupling_tau_multiple = 15.0;
  double sampler_post_tau_multiple = 70.0;
  double sampler_tau_coeff = 0.03;
  long sampler_thin = 1;
  double sampler_coupling_tol_coeff = 1e-3;
  long sampler_sweeps = 200000;  // free_field measurement sweeps
  long sampler_grid_points = 5;

  std::uint64_t seed = 1;
  std::string output_dir = ".";
  int threads = 0;  // 0 = hardware concurrency
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

const std::vector<std::string>& registered_experiments();
const std::vector<std::string>& registered_laws();

/// Dispatch the configured experiment; writes rows.csv, report.json and a
/// gnuplot-ready data file into output_dir. Returns 0 on verdict pass, 2 on
/// verdict fail.
int run_experiment(const RunConfig& config);

/// Built-in oracle suite (exhaustive enumeration at n <= 8). Returns 0 when
/// every check passes.
int run_check();

}  // namespace obw
