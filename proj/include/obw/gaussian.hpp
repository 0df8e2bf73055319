#pragma once

#include <cstdint>
#include <vector>

#include "obw/errors.hpp"

namespace obw::gauss {

/// Cov(S_i, S_j) of the Gaussian bridge pinned at 0 and n, steps N(0, beta).
double bridge_covariance(long n, double beta, long i, long j);

/// q_t(x) = x/sqrt(2 pi t^3) e^{-x^2/2t} for x > 0.
double excursion_q(double t, double x);

/// p_t(x, y) = (e^{-(x-y)^2/2t} - e^{-(x+y)^2/2t}) / sqrt(2 pi t) for y > 0.
double excursion_p(double t, double x, double y);

/// Finite-dimensional density of the Brownian excursion of length L at times
/// 0 < t_1 < ... < t_m < L.
double excursion_density(double L, const std::vector<double>& times,
                         const std::vector<double>& heights);

/// Upper bound (4/sqrt(pi)) (a/sqrt(bk) + sqrt(bk)/a) e^{-a^2/2bk} on the
/// walk-excursion marginal tail P(S_k >= a | S_0=0=S_n, S >= 0), k <= n/2.
double excursion_tail_bound(long n, double beta, long k, double a);

/// The p-obstacle h_n(k) = n - |k|^p/n^{p-1} on {-n..n} together with its
/// plateau truncation h_n^- and concave extension h_n^+, plus the discrete
/// curvature weights of h_n^+.
struct PObstacleSet {
  long n = 0;
  long L = 0;
  double p = 2.0;
  std::vector<double> h, h_minus, h_plus;  // size 2n+1, index k+n
  std::vector<double> curvature;           // gamma_i, i=-n+1..n-1, index i+n-1
};

PObstacleSet build_p_obstacles(double p, long n, long L);

/// Gaussian field on sites {-n..n} with fixed boundary values, conditioned to
/// stay above `obstacle` (-inf entries mean unconstrained).
struct GaussianField {
  long n = 0;
  double beta = 1.0;
  std::vector<double> obstacle;  // size 2n+1
  double xi_left = 0.0, xi_right = 0.0;

  static GaussianField free_bridge(long n, double beta);
  static GaussianField above(long n, double beta, std::vector<double> obstacle);
};

struct GibbsOptions {
  long max_coupling_sweeps = 200000;
  long post_sweeps = 50000;
  long thin = 1;
  double coupling_tol = 1e-3;
  double ceiling_offset = 0.0;  // 0 = choose from (beta, n)
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  std::vector<long> probe_sites;  // absolute site indices in [-n, n]
};

struct GibbsResult {
  bool coupled = false;
  long coupling_sweeps = 0;
  double final_gap = 0.0;
  bool sandwich_ok = true;       // lower <= upper held at every check
  bool gap_trend_ok = true;      // window-max gap never increased
  std::vector<std::vector<double>> samples;  // [record][probe site]
};

/// Heat-bath sweeps with a monotone sandwich coupling; burn-in is accepted
/// only once the replica gap drops below coupling_tol. Throws NotCoupledError
/// if the budget runs out.
GibbsResult gibbs_sample(const GaussianField& field, const GibbsOptions& opt);

struct HolleyReport {
  bool pass = false;
  double min_density_slack = 0.0;
  double min_bond_slack = 0.0;
  long trials = 0;
};

/// Randomized verification of the Holley condition between the walk-excursion
/// density and the Brownian-excursion reference, at small n.
HolleyReport holley_check(long n, std::uint64_t seed, long trials, double beta = 1.0);

struct AlphaPRow {
  long n = 0;
  double mean = 0.0, var = 0.0, stderr_mean = 0.0;
  std::vector<std::pair<double, double>> tails;  // (lambda, P(s_0 >= lambda))
  long sweeps = 0;
  double coupling_gap = 0.0;
  bool accepted = false;
};

/// Sampling budget for the conditioned-field sweep, expressed in units of the
/// per-n relaxation estimate tau(n) ~ n^{4 alpha_p} sweeps (the squared
/// correlation length of the tip region; tau_coeff calibrated against the
/// measured autocorrelation of the tip height). Coalescence of the sandwich
/// replicas is additionally bounded below by an empirical n^{1.7} term, since
/// the flanks of the obstacle couple on a timescale roughly independent of p.
/// The coupling tolerance is coupling_tol_coeff * n^{alpha_p}, i.e. relative
/// to the observable scale.
struct AlphaPBudget {
  double coupling_tau_multiple = 15.0;  // times max(tau(n), 0.06 n^{1.7})
  double post_tau_multiple = 70.0;
  double tau_coeff = 0.03;  // tau(n) = max(200, tau_coeff * n^{4 alpha_p})
  long thin = 1;
  double coupling_tol_coeff = 1e-3;
  double lambda_ratio = 4.0 / 3.0;  // geometric tail grid
  long min_exceedances = 50;
  std::uint64_t seed = 1;
};

/// Conditioned-field sweep for height-fluctuation measurements: for each n,
/// sample the field above the p-obstacle with zero boundary and record
/// statistics of S_0 - n.
std::vector<AlphaPRow> estimate_alpha_p(double p, const std::vector<long>& n_grid,
                                        double beta, const AlphaPBudget& budget);

}  // namespace obw::gauss
