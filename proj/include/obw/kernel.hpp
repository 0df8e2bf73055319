#pragma once

#include <cstdint>
#include <vector>

#include "obw/obstacle.hpp"
#include "obw/step_law.hpp"

namespace obw {

/// Truncated state space for the kernel DP, in S-coordinates (integers).
/// Row k holds states s in {ceil(hn[k]), ..., ceil(hn[k]) + cap}; rows 0 and
/// n are pinned to the boundary states.
struct HeightGrid {
  long n = 0;
  std::vector<long> floor_s;  // per k
  std::vector<long> width;    // states in row k: floor_s[k] .. floor_s[k]+width[k]-1
  long cap = 0;
  double k_cap = 12.0;
  double mass_tol = 1e-10;
};

HeightGrid build_grid(const ObstacleProfile& profile, double k_cap = 12.0,
                      double mass_tol = 1e-10);

/// Forward/backward log-domain partition function tables for the area-tilted
/// kernel. F[k][i] = log Z_{0,k}(0, s), B[k][i] = log Z_{k,n}(s, target) with
/// the convention that the per-site potential and positivity indicator at
/// time k belong to F. exp(logZ) is the full kernel Z_{0,n}(0, z_n).
struct KernelTables {
  long n = 0;
  HeightGrid grid;
  std::vector<double> hn;
  std::vector<double> alpha;                 // k=1..n-1
  std::vector<std::vector<double>> lstep;    // tilted log step probs, k=1..n
  int step_min = 0;                          // smallest step offset
  std::vector<std::vector<double>> F, B;
  double logZ = 0.0;
  double mass_loss = 0.0;  // weight observed in the top grid row, relative to Z
};

KernelTables build_tables(const StepLaw& law, const ObstacleProfile& profile,
                          const TiltSchedule& schedule, const HeightGrid& grid);

/// P(W_k = s - hn[k]) for s over row k; sums to 1.
std::vector<double> marginal(const KernelTables& tables, long k);

/// E((W_k)^r), exact from the marginal.
double moment(const KernelTables& tables, long k, int r);

/// P(W_k >= lambda * n^{1/3}).
double tail(const KernelTables& tables, long k, double lambda);

/// Cov(W_i, W_j) by propagating the height-weighted forward vector.
double covariance(const KernelTables& tables, long i, long j);

/// Exact backward sampling from the conditioned law; deterministic in seed.
std::vector<std::vector<long>> sample_paths(const KernelTables& tables, long count,
                                            std::uint64_t seed);

/// log(sum exp(v)) with max shift; -inf for an empty/all -inf input.
double log_sum_exp(const std::vector<double>& v);

}  // namespace obw
