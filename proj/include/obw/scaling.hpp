#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "obw/gaussian.hpp"
#include "obw/kernel.hpp"

namespace obw {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r2 = 0.0;
};

/// OLS of ln y on ln x. Throws InsufficientData for fewer than 3 points or
/// non-positive coordinates.
FitResult fit_exponent(const std::vector<std::pair<double, double>>& points);

/// One measured observable. Inapplicable coordinates stay NaN and serialize
/// as empty CSV fields.
struct ReportRow {
  std::string observable;
  double n = std::numeric_limits<double>::quiet_NaN();
  double k = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double i = std::numeric_limits<double>::quiet_NaN();
  double j = std::numeric_limits<double>::quiet_NaN();
  double p = std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  double stderr_value = std::numeric_limits<double>::quiet_NaN();  // NaN = exact
  bool valid = true;
};

struct ExponentReport {
  std::string experiment;
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, FitResult>> fits;  // named fits
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct KernelRunOptions {
  double k_cap = 12.0;
  double mass_tol = 1e-10;
  double slope_margin = 1e-6;
};

/// Partition-function correction sweep: -logZ vs n, target slope 1/3.
ExponentReport ld_correction_experiment(const StepLaw& law, const ObstacleSpec& spec,
                                        const std::vector<long>& n_grid,
                                        const KernelRunOptions& opt, double tolerance = 0.08);

/// One-point upper-tail fit at fixed n and k: ln(-ln P(s_k >= lambda)) vs
/// ln lambda, target slope 3/2.
ExponentReport tail_experiment(const StepLaw& law, const ObstacleSpec& spec, long n, long k,
                               const std::vector<double>& lambda_grid,
                               const KernelRunOptions& opt, double tolerance = 0.15);

/// Var(W_{n/2}) vs n, target slope 2/3; also reports E(W^r)/n^{r/3} for
/// r = 1,2,3 (bounded ratios across the grid).
ExponentReport variance_experiment(const StepLaw& law, const ObstacleSpec& spec,
                                   const std::vector<long>& n_grid,
                                   const KernelRunOptions& opt, double tolerance = 0.08);

/// -ln|Cov(W_i, W_j)| vs (j-i)/n^{2/3} at fixed n, i=n/2: linear with
/// positive slope and R^2 above the threshold.
ExponentReport covariance_experiment(const StepLaw& law, const ObstacleSpec& spec, long n,
                                     const std::vector<long>& separations,
                                     const KernelRunOptions& opt, double min_r2 = 0.95);

/// Free-field Gibbs sampler vs the closed-form bridge covariances on a grid
/// of (i,j) pairs; pass = every cell within `sigmas` standard errors.
ExponentReport free_field_experiment(long n, double beta, long grid_points, long sweeps,
                                     std::uint64_t seed, double sigmas = 4.0);

/// Tip-height sweep: per p, fit ln E(S_0-n) vs ln n against
/// alpha_p = (p-1)/(2p-1); optionally a tail-exponent fit against (2p-1)/p.
ExponentReport alpha_p_experiment(const std::vector<double>& p_grid,
                                  const std::vector<long>& n_grid, double beta,
                                  const gauss::AlphaPBudget& budget,
                                  double slope_tolerance = 0.10);

std::string report_to_json(const ExponentReport& report);
std::string rows_to_csv(const ExponentReport& report);

}  // namespace obw
