#include <cmath>
#include <limits>

#include "doctest.h"
#include "obw/gaussian.hpp"
#include "obw/normal.hpp"
#include "obw/obstacle.hpp"

using namespace obw;
namespace gs = obw::gauss;

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kPi = std::acos(-1.0);
}  // namespace

TEST_CASE("normal helpers: quantile, tail, and their logs") {
  CHECK(norm_ppf(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(norm_ppf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(norm_cdf_c(0.0) == doctest::Approx(0.5));
  CHECK(norm_cdf_c(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-12));
  // round trips
  for (double z : {-3.0, -1.0, 0.0, 0.5, 2.0, 5.0})
    CHECK(norm_ppf(1.0 - norm_cdf_c(z)) == doctest::Approx(z).epsilon(1e-10));
  for (double z : {1.0, 5.0, 10.0, 30.0, 100.0})
    CHECK(norm_ppf_c_log(log_norm_cdf_c(z)) == doctest::Approx(z).epsilon(1e-10));
  // deep tail: log tail matches the asymptotic -z^2/2 to leading order
  CHECK(log_norm_cdf_c(50.0) ==
        doctest::Approx(-0.5 * 2500.0 - std::log(50.0) - 0.5 * std::log(2.0 * kPi))
            .epsilon(1e-3));
  CHECK(std::isfinite(norm_ppf_c_log(-1e6)));
  CHECK(norm_ppf_c_log(-1e6) == doctest::Approx(std::sqrt(2e6)).epsilon(1e-2));
}

TEST_CASE("truncated normal sampling is monotone in u and in the mean") {
  double prev = -1e300;
  for (double u : {0.01, 0.2, 0.5, 0.8, 0.99}) {
    const double x = trunc_norm_sample(0.0, 1.0, 0.5, u);
    CHECK(x >= 0.5);
    CHECK(x > prev);
    prev = x;
  }
  for (double u : {0.1, 0.5, 0.9}) {
    double prev_m = -1e300;
    for (double mean : {-40.0, -5.0, -1.0, 0.0, 2.0}) {
      const double x = trunc_norm_sample(mean, 1.0, 0.0, u);
      CHECK(x >= 0.0);
      CHECK(std::isfinite(x));
      CHECK(x >= prev_m);
      prev_m = x;
    }
  }
  // untruncated path
  CHECK(trunc_norm_sample(2.0, 3.0, kNegInf, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
  // median of the truncated law solves P(X >= x) = P(X >= lower)/2
  const double x = trunc_norm_sample(0.0, 1.0, 1.0, 0.5);
  CHECK(norm_cdf_c(x) == doctest::Approx(0.5 * norm_cdf_c(1.0)).epsilon(1e-10));
}

TEST_CASE("bridge covariance closed form") {
  CHECK(gs::bridge_covariance(10, 2.0, 3, 7) == doctest::Approx(2.0 * 3.0 * 3.0 / 10.0));
  CHECK(gs::bridge_covariance(10, 2.0, 7, 3) == doctest::Approx(gs::bridge_covariance(10, 2.0, 3, 7)));
  CHECK(gs::bridge_covariance(10, 1.0, 5, 5) == doctest::Approx(2.5));
  CHECK(gs::bridge_covariance(10, 1.0, 0, 4) == doctest::Approx(0.0));
  CHECK_THROWS_AS(gs::bridge_covariance(10, 1.0, -1, 4), DomainError);
}

TEST_CASE("excursion density: closed form, maximizer, normalization") {
  const double L = 2.0, t = 1.0;
  for (double x : {0.2, 0.7, 1.5}) {
    const double want = 2.0 * std::sqrt(2.0 * kPi * L * L * L) * gs::excursion_q(t, x) *
                        gs::excursion_q(L - t, x);
    CHECK(gs::excursion_density(L, {t}, {x}) == doctest::Approx(want).epsilon(1e-13));
  }
  // at t = L/2 the single-time density is proportional to x^2 e^{-2x^2/L},
  // maximized at sqrt(L/2)
  const double xstar = std::sqrt(L / 2.0);
  const double peak = gs::excursion_density(L, {t}, {xstar});
  CHECK(peak > gs::excursion_density(L, {t}, {xstar - 0.05}));
  CHECK(peak > gs::excursion_density(L, {t}, {xstar + 0.05}));
  // normalization over the height at a fixed time
  const double total = adaptive_simpson(
      [&](double x) { return gs::excursion_density(L, {0.7}, {x}); }, 0.0, 12.0, 1e-12);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  // multi-time consistency: integrating out the middle time recovers the pair
  const double pair = gs::excursion_density(L, {0.5, 1.5}, {0.8, 0.6});
  const double chained = adaptive_simpson(
      [&](double y) { return gs::excursion_density(L, {0.5, 1.0, 1.5}, {0.8, y, 0.6}); }, 0.0,
      12.0, 1e-12);
  CHECK(chained == doctest::Approx(pair).epsilon(1e-8));
  CHECK(gs::excursion_density(L, {t}, {-0.3}) == 0.0);
  CHECK_THROWS_AS(gs::excursion_density(L, {1.5, 0.5}, {1.0, 1.0}), DomainError);
}

TEST_CASE("excursion tail bound closed form and domination") {
  const long n = 100, k = 20;
  const double beta = 1.0;
  const double s = std::sqrt(beta * k);
  CHECK(gs::excursion_tail_bound(n, beta, k, s) ==
        doctest::Approx(4.0 / std::sqrt(kPi) * 2.0 * std::exp(-0.5)).epsilon(1e-13));
  CHECK_THROWS_AS(gs::excursion_tail_bound(n, beta, 80, 1.0), DomainError);
}

TEST_CASE("p-obstacle constructions: ordering, tangency, curvature") {
  const long n = 64, L = 16;
  const gs::PObstacleSet set = gs::build_p_obstacles(2.0, n, L);
  REQUIRE(static_cast<long>(set.h.size()) == 2 * n + 1);
  for (long i = 0; i <= 2 * n; ++i) {
    CHECK(set.h_minus[i] <= set.h[i] + 1e-12);
    CHECK(set.h[i] <= set.h_plus[i] + 1e-12);
  }
  CHECK(set.h[n] == doctest::Approx(static_cast<double>(n)));       // apex
  CHECK(set.h_plus[n] == doctest::Approx(static_cast<double>(n)));  // plateau height
  CHECK(set.h_minus[n] == doctest::Approx(set.h[n + L]));           // plateau truncation
  // linear piece has the tangency slope p^p L^{p-1} / ((p-1)^{p-1} n^{p-1})
  const double slope = 4.0 * L / n;
  CHECK(set.h_plus[n + L + 1] - set.h_plus[n + L] == doctest::Approx(-slope).epsilon(1e-10));
  // h^+ meets h tangentially at |x| = pL/(p-1) = 2L
  CHECK(set.h_plus[n + 2 * L] == doctest::Approx(set.h[n + 2 * L]).epsilon(1e-12));
  for (double g : set.curvature) CHECK(g >= -1e-12);
  // p=1 degenerates for L > 0, works for L = 0
  CHECK_THROWS_AS(gs::build_p_obstacles(1.0, 16, 4), DegenerateError);
  CHECK_NOTHROW(gs::build_p_obstacles(1.0, 16, 0));
  CHECK_THROWS_AS(gs::build_p_obstacles(2.0, 16, 10), DomainError);  // L > (p-1)/p n
}

TEST_CASE("free-field sampler reproduces the bridge covariance") {
  const long half = 12;  // bridge of length 24
  gs::GaussianField field = gs::GaussianField::free_bridge(half, 1.0);
  gs::GibbsOptions opt;
  opt.max_coupling_sweeps = 200000;
  opt.post_sweeps = 60000;
  opt.coupling_tol = 1e-3;
  opt.seed = 42;
  opt.probe_sites = {0, 6};
  const gs::GibbsResult res = gs::gibbs_sample(field, opt);
  CHECK(res.coupled);
  CHECK(res.sandwich_ok);
  CHECK(res.gap_trend_ok);
  REQUIRE(res.samples.size() >= 10000);

  const long count = static_cast<long>(res.samples.size());
  double m0 = 0.0, m1 = 0.0;
  for (const auto& row : res.samples) {
    m0 += row[0];
    m1 += row[1];
  }
  m0 /= count;
  m1 /= count;
  double v0 = 0.0, c01 = 0.0;
  for (const auto& row : res.samples) {
    v0 += (row[0] - m0) * (row[0] - m0);
    c01 += (row[0] - m0) * (row[1] - m1);
  }
  v0 /= count;
  c01 /= count;
  // site 0 is the bridge midpoint (index half of a 2*half bridge)
  const double var_want = gs::bridge_covariance(2 * half, 1.0, half, half);
  const double cov_want = gs::bridge_covariance(2 * half, 1.0, half, half + 6);
  CHECK(std::abs(m0) < 0.15);
  CHECK(v0 == doctest::Approx(var_want).epsilon(0.12));
  CHECK(c01 == doctest::Approx(cov_want).epsilon(0.2));
}

TEST_CASE("conditioned field stays above the obstacle and repels upward") {
  const long n = 8;
  std::vector<double> obstacle(2 * n + 1, 0.0);
  gs::GaussianField field = gs::GaussianField::above(n, 1.0, obstacle);
  gs::GibbsOptions opt;
  opt.max_coupling_sweeps = 100000;
  opt.post_sweeps = 20000;
  opt.coupling_tol = 1e-3;
  opt.seed = 7;
  opt.probe_sites = {0};
  const gs::GibbsResult res = gs::gibbs_sample(field, opt);
  CHECK(res.coupled);
  CHECK(res.sandwich_ok);
  double mean = 0.0;
  for (const auto& row : res.samples) {
    CHECK(row[0] >= 0.0);
    mean += row[0];
  }
  mean /= static_cast<double>(res.samples.size());
  CHECK(mean > 0.5);  // entropic repulsion pushes the field well above the wall
}

TEST_CASE("boundary below the obstacle is rejected") {
  std::vector<double> obstacle(2 * 4 + 1, 1.0);
  CHECK_THROWS_AS(gs::GaussianField::above(4, 1.0, obstacle), DomainError);
}

TEST_CASE("coupling budget exhaustion raises NotCoupledError") {
  gs::GaussianField field = gs::GaussianField::free_bridge(16, 1.0);
  gs::GibbsOptions opt;
  opt.max_coupling_sweeps = 3;
  opt.post_sweeps = 10;
  opt.coupling_tol = 1e-9;
  opt.seed = 1;
  CHECK_THROWS_AS(gs::gibbs_sample(field, opt), NotCoupledError);
}

TEST_CASE("holley condition holds on random height pairs") {
  const gs::HolleyReport report = gs::holley_check(6, 2024, 2000);
  CHECK(report.pass);
  CHECK(report.trials == 2000);
  CHECK(report.min_bond_slack >= -1e-12);
  CHECK(report.min_density_slack >= -1e-9);
  CHECK_THROWS_AS(gs::holley_check(2, 1, 10), DomainError);
}
