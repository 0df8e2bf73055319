#include "obw/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "obw/normal.hpp"
#include "obw/rng.hpp"

namespace obw::gauss {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kPi = std::acos(-1.0);
}  // namespace

double bridge_covariance(long n, double beta, long i, long j) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j > n) throw DomainError("bridge_covariance indices out of range");
  return beta * static_cast<double>(i) * static_cast<double>(n - j) / n;
}

double excursion_q(double t, double x) {
  if (x <= 0.0) return 0.0;
  return x / std::sqrt(2.0 * kPi * t * t * t) * std::exp(-x * x / (2.0 * t));
}

double excursion_p(double t, double x, double y) {
  if (y <= 0.0) return 0.0;
  const double d1 = x - y, d2 = x + y;
  return (std::exp(-d1 * d1 / (2.0 * t)) - std::exp(-d2 * d2 / (2.0 * t))) /
         std::sqrt(2.0 * kPi * t);
}

double excursion_density(double L, const std::vector<double>& times,
                         const std::vector<double>& heights) {
  const std::size_t m = times.size();
  if (m == 0 || heights.size() != m) throw DomainError("excursion_density: bad input sizes");
  double prev = 0.0;
  for (double t : times) {
    if (!(t > prev && t < L)) throw DomainError("excursion_density: times must be increasing in (0,L)");
    prev = t;
  }
  for (double x : heights)
    if (x <= 0.0) return 0.0;
  double val = 2.0 * std::sqrt(2.0 * kPi * L * L * L) * excursion_q(times[0], heights[0]);
  for (std::size_t i = 1; i < m; ++i)
    val *= excursion_p(times[i] - times[i - 1], heights[i - 1], heights[i]);
  val *= excursion_q(L - times[m - 1], heights[m - 1]);
  return val;
}

double excursion_tail_bound(long n, double beta, long k, double a) {
  if (!(k >= 1 && 2 * k <= n)) throw DomainError("excursion_tail_bound needs 1 <= k <= n/2");
  if (!(a > 0.0)) throw DomainError("excursion_tail_bound needs a > 0");
  const double s = std::sqrt(beta * k);
  return 4.0 / std::sqrt(kPi) * (a / s + s / a) * std::exp(-a * a / (2.0 * beta * k));
}

PObstacleSet build_p_obstacles(double p, long n, long L) {
  if (!(p >= 1.0)) throw DomainError("build_p_obstacles needs p >= 1");
  if (p == 1.0 && L > 0)
    throw DegenerateError("p=1 forces L=0 in the concave extension");
  if (!(L >= 0 && static_cast<double>(L) <= (p - 1.0) / p * n + 1e-9))
    throw DomainError("build_p_obstacles needs 0 <= L <= (p-1)/p * n");

  PObstacleSet set;
  set.n = n;
  set.L = L;
  set.p = p;
  set.h.resize(2 * n + 1);
  set.h_minus.resize(2 * n + 1);
  set.h_plus.resize(2 * n + 1);
  const double np1 = std::pow(static_cast<double>(n), p - 1.0);
  // limit convention (p-1)^{p-1} -> 1 as p -> 1
  const double slope =
      p == 1.0 ? 1.0
               : std::pow(p, p) * std::pow(static_cast<double>(L), p - 1.0) /
                     (std::pow(p - 1.0, p - 1.0) * np1);
  const double match = p == 1.0 ? 0.0 : p / (p - 1.0) * static_cast<double>(L);

  auto hn = [&](double x) { return n - std::pow(std::abs(x), p) / np1; };
  for (long k = -n; k <= n; ++k) {
    const double x = static_cast<double>(k);
    set.h[k + n] = hn(x);
    set.h_minus[k + n] = std::abs(k) <= L ? hn(static_cast<double>(L)) : hn(x);
    if (std::abs(x) <= L)
      set.h_plus[k + n] = n;
    else if (std::abs(x) <= match)
      set.h_plus[k + n] = n - slope * (std::abs(x) - L);
    else
      set.h_plus[k + n] = hn(x);
  }

  set.curvature.resize(2 * n - 1);
  for (long i = -n + 1; i <= n - 1; ++i) {
    const double g = 2.0 * set.h_plus[i + n] - set.h_plus[i + n - 1] - set.h_plus[i + n + 1];
    if (g < -1e-9) throw DomainError("h_n^+ is not concave");
    set.curvature[i + n - 1] = g;
  }
  for (long k = 0; k <= 2 * n; ++k) {
    if (set.h_minus[k] > set.h[k] + 1e-9 || set.h[k] > set.h_plus[k] + 1e-9)
      throw DomainError("p-obstacle ordering h^- <= h <= h^+ violated");
  }
  return set;
}

GaussianField GaussianField::free_bridge(long n, double beta) {
  GaussianField f;
  f.n = n;
  f.beta = beta;
  f.obstacle.assign(2 * n + 1, kNegInf);
  return f;
}

GaussianField GaussianField::above(long n, double beta, std::vector<double> obstacle) {
  if (static_cast<long>(obstacle.size()) != 2 * n + 1)
    throw DomainError("obstacle size must be 2n+1");
  GaussianField f;
  f.n = n;
  f.beta = beta;
  f.obstacle = std::move(obstacle);
  if (f.obstacle.front() != kNegInf && f.xi_left < f.obstacle.front())
    throw DomainError("left boundary below obstacle");
  if (f.obstacle.back() != kNegInf && f.xi_right < f.obstacle.back())
    throw DomainError("right boundary below obstacle");
  return f;
}

namespace {

// one heat-bath visit; monotone in both u and the neighbour mean
inline double site_update(double left, double right, double g, double sd, double u) {
  const double mean = 0.5 * (left + right);
  if (g == kNegInf || (g - mean) / sd < -10.0) {
    const double x = mean + sd * norm_ppf(u);
    return g == kNegInf ? x : std::max(x, g);
  }
  return trunc_norm_sample(mean, sd, g, u);
}

}  // namespace

GibbsResult gibbs_sample(const GaussianField& field, const GibbsOptions& opt) {
  const long n = field.n;
  const long m = 2 * n + 1;  // sites -n..n mapped to 0..2n
  const double sd = std::sqrt(field.beta / 2.0);
  const double offset =
      opt.ceiling_offset > 0.0 ? opt.ceiling_offset
                               : 4.0 * std::sqrt(field.beta * 2.0 * n) + 8.0;

  std::vector<double> lower(m), upper(m);
  for (long i = 0; i < m; ++i) {
    const double base =
        field.xi_left + (field.xi_right - field.xi_left) * static_cast<double>(i) / (m - 1);
    const double g = field.obstacle[i];
    lower[i] = g == kNegInf ? base - offset : g;
    upper[i] = std::max(g == kNegInf ? base : std::max(base, g), lower[i]) + offset;
  }
  lower[0] = upper[0] = field.xi_left;
  lower[m - 1] = upper[m - 1] = field.xi_right;

  RngStream rng(opt.seed, opt.stream);
  GibbsResult result;

  auto coupled_sweep = [&]() {
    for (long i = 1; i < m - 1; ++i) {
      const double u = rng.next_double();
      lower[i] = site_update(lower[i - 1], lower[i + 1], field.obstacle[i], sd, u);
      upper[i] = site_update(upper[i - 1], upper[i + 1], field.obstacle[i], sd, u);
    }
    for (long i = m - 2; i >= 1; --i) {
      const double u = rng.next_double();
      lower[i] = site_update(lower[i - 1], lower[i + 1], field.obstacle[i], sd, u);
      upper[i] = site_update(upper[i - 1], upper[i + 1], field.obstacle[i], sd, u);
    }
  };
  auto gap = [&]() {
    double g = 0.0;
    for (long i = 1; i < m - 1; ++i) {
      g = std::max(g, upper[i] - lower[i]);
      if (upper[i] - lower[i] < -1e-9) result.sandwich_ok = false;
    }
    return g;
  };

  long sweeps = 0;
  double window_gap = gap();
  while (window_gap > opt.coupling_tol) {
    for (int s = 0; s < 100 && sweeps < opt.max_coupling_sweeps; ++s, ++sweeps)
      coupled_sweep();
    const double g = gap();
    if (g > window_gap + 1e-9) result.gap_trend_ok = false;
    window_gap = g;
    if (sweeps >= opt.max_coupling_sweeps && window_gap > opt.coupling_tol) {
      std::ostringstream os;
      os << "sandwich gap " << window_gap << " above tolerance " << opt.coupling_tol
         << " after " << sweeps << " sweeps";
      result.coupled = false;
      result.coupling_sweeps = sweeps;
      result.final_gap = window_gap;
      throw NotCoupledError(os.str());
    }
  }
  result.coupled = true;
  result.coupling_sweeps = sweeps;
  result.final_gap = window_gap;

  // measurement phase: single chain (the replicas have coalesced)
  std::vector<double>& chain = upper;
  auto single_sweep = [&]() {
    for (long i = 1; i < m - 1; ++i)
      chain[i] = site_update(chain[i - 1], chain[i + 1], field.obstacle[i],
                             sd, rng.next_double());
    for (long i = m - 2; i >= 1; --i)
      chain[i] = site_update(chain[i - 1], chain[i + 1], field.obstacle[i],
                             sd, rng.next_double());
  };

  const std::size_t nprobe = opt.probe_sites.size();
  result.samples.reserve(nprobe ? opt.post_sweeps / std::max<long>(1, opt.thin) : 0);
  for (long s = 0; s < opt.post_sweeps; ++s) {
    single_sweep();
    if (nprobe && s % std::max<long>(1, opt.thin) == 0) {
      std::vector<double> row(nprobe);
      for (std::size_t q = 0; q < nprobe; ++q) row[q] = chain[opt.probe_sites[q] + n];
      result.samples.push_back(std::move(row));
    }
  }
  return result;
}

HolleyReport holley_check(long n, std::uint64_t seed, long trials, double beta) {
  if (n > 12 || n < 3) throw DomainError("holley_check needs 3 <= n <= 12");
  const double T = 1.0 / beta;
  const long dim = n - 1;

  auto energy = [&](const std::vector<double>& x) {
    double acc = x[0] * x[0] + x[dim - 1] * x[dim - 1];
    for (long i = 1; i < dim; ++i) acc += (x[i] - x[i - 1]) * (x[i] - x[i - 1]);
    return 0.5 * acc;
  };
  // log of the excursion-reference kernel, up to the n-dependent constant
  auto log_excursion_kernel = [&](const std::vector<double>& x) {
    double acc = std::log(x[0]) + std::log(x[dim - 1]) - T * energy(x);
    for (long i = 1; i < dim; ++i) acc += std::log1p(-std::exp(-2.0 * T * x[i] * x[i - 1]));
    return acc;
  };

  RngStream rng(seed, 0);
  const double scale = 2.0 * std::sqrt(beta * n);
  HolleyReport report;
  report.trials = trials;
  report.min_density_slack = std::numeric_limits<double>::infinity();
  report.min_bond_slack = std::numeric_limits<double>::infinity();

  std::vector<double> x(dim), y(dim), join(dim), meet(dim);
  for (long t = 0; t < trials; ++t) {
    for (long i = 0; i < dim; ++i) {
      x[i] = 0.01 + scale * rng.next_double();
      y[i] = 0.01 + scale * rng.next_double();
    }
    for (long i = 0; i < dim; ++i) {
      join[i] = std::max(x[i], y[i]);
      meet[i] = std::min(x[i], y[i]);
    }
    const double bond = energy(x) + energy(y) - energy(join) - energy(meet);
    report.min_bond_slack = std::min(report.min_bond_slack, bond);

    const double lhs = log_excursion_kernel(join) - T * energy(meet);
    const double rhs = log_excursion_kernel(y) - T * energy(x);
    report.min_density_slack = std::min(report.min_density_slack, lhs - rhs);
  }
  report.pass = report.min_bond_slack >= -1e-12 && report.min_density_slack >= -1e-9;
  return report;
}

std::vector<AlphaPRow> estimate_alpha_p(double p, const std::vector<long>& n_grid,
                                        double beta, const AlphaPBudget& budget) {
  const double alpha_p = (p - 1.0) / (2.0 * p - 1.0);
  std::vector<AlphaPRow> rows;
  rows.reserve(n_grid.size());
  for (long n : n_grid) {
    const double tau =
        std::max(200.0, budget.tau_coeff * std::pow(static_cast<double>(n), 4.0 * alpha_p));
    const double scale = std::pow(static_cast<double>(n), alpha_p);

    PObstacleSet obstacles = build_p_obstacles(p, n, 0);
    GaussianField field = GaussianField::above(n, beta, obstacles.h);

    const double couple_scale =
        std::max(tau, 0.06 * std::pow(static_cast<double>(n), 1.7));
    GibbsOptions opt;
    opt.max_coupling_sweeps = static_cast<long>(budget.coupling_tau_multiple * couple_scale);
    opt.post_sweeps = static_cast<long>(budget.post_tau_multiple * tau);
    opt.thin = budget.thin;
    opt.coupling_tol = budget.coupling_tol_coeff * scale;
    // ceiling sized to the conditioned field's fluctuation scale, not the
    // free bridge's sqrt(n): generously covers mean + max fluctuation
    opt.ceiling_offset = 8.0 * scale + 16.0;
    opt.seed = budget.seed;
    opt.stream = static_cast<std::uint64_t>(n) * 1000003ULL + static_cast<std::uint64_t>(p * 64);
    opt.probe_sites = {0};

    AlphaPRow row;
    row.n = n;
    GibbsResult res;
    try {
      res = gibbs_sample(field, opt);
    } catch (const NotCoupledError&) {
      row.accepted = false;
      row.sweeps = opt.max_coupling_sweeps;
      rows.push_back(std::move(row));
      continue;
    }
    row.sweeps = res.coupling_sweeps + opt.post_sweeps;
    row.coupling_gap = res.final_gap;
    row.accepted = res.coupled;

    const long count = static_cast<long>(res.samples.size());
    std::vector<double> heights(count);
    double mean = 0.0;
    for (long i = 0; i < count; ++i) {
      heights[i] = res.samples[i][0] - n;
      mean += heights[i];
    }
    mean /= count;
    double var = 0.0;
    for (double h : heights) var += (h - mean) * (h - mean);
    var /= (count - 1);
    row.mean = mean;
    row.var = var;

    // batch means for an autocorrelation-aware standard error
    const long nb = 32;
    const long bl = count / nb;
    double bvar = 0.0;
    for (long b = 0; b < nb; ++b) {
      double bm = 0.0;
      for (long i = b * bl; i < (b + 1) * bl; ++i) bm += heights[i];
      bm /= bl;
      bvar += (bm - mean) * (bm - mean);
    }
    row.stderr_mean = std::sqrt(bvar / (nb * (nb - 1.0)));

    for (double lambda = 1.0;; lambda *= budget.lambda_ratio) {
      long exceed = 0;
      for (double h : heights)
        if (h >= lambda * scale) ++exceed;
      if (exceed < budget.min_exceedances) break;
      row.tails.push_back({lambda, static_cast<double>(exceed) / count});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace obw::gauss
