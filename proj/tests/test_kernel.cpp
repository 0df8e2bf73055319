#include <cmath>
#include <map>

#include "doctest.h"
#include "enumeration.hpp"
#include "obw/kernel.hpp"

using namespace obw;

namespace {

KernelTables tables_for(const StepLaw& law, const ObstacleSpec& spec, long n,
                        double k_cap = 12.0, double mass_tol = 1e-10) {
  const ObstacleProfile prof = discretize(spec, n);
  const TiltSchedule sched = tilt_schedule(law, spec, prof);
  const HeightGrid grid = build_grid(prof, k_cap, mass_tol);
  return build_tables(law, prof, sched, grid);
}

ObstacleSpec flat() {
  return ObstacleSpec::tabulated([](double) { return 0.0; }, [](double) { return 0.0; },
                                 [](double) { return 0.0; });
}

}  // namespace

TEST_CASE("flat obstacle, n=2, uniform steps: Z = 2/9 by hand") {
  // two paths survive: 0 -> 0 -> 0 and 0 -> 1 -> 0, each of weight 1/9
  const KernelTables t = tables_for(StepLaw::uniform3(), flat(), 2);
  CHECK(std::exp(t.logZ) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("full agreement with path enumeration at n=6") {
  const StepLaw law = StepLaw::uniform3();
  const ObstacleSpec spec = ObstacleSpec::quadratic(0.5);
  const long n = 6;
  const ObstacleProfile prof = discretize(spec, n);
  const TiltSchedule sched = tilt_schedule(law, spec, prof);
  const KernelTables t = build_tables(law, prof, sched, build_grid(prof));
  const pathsum::PathSet ps = pathsum::enumerate_paths(law, prof, sched);

  CHECK(std::exp(t.logZ) == doctest::Approx(ps.Z).epsilon(1e-12));
  for (long k = 0; k <= n; ++k) {
    const auto m = marginal(t, k);
    double total = 0.0;
    for (long i = 0; i < static_cast<long>(m.size()); ++i) {
      total += m[i];
      const double want = pathsum::marginal_prob(ps, k, t.grid.floor_s[k] + i);
      CHECK(m[i] == doctest::Approx(want).epsilon(1e-12));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int r = 1; r <= 3; ++r)
    CHECK(moment(t, 3, r) == doctest::Approx(pathsum::moment(ps, 3, r)).epsilon(1e-12));
  CHECK(tail(t, 3, 0.5) == doctest::Approx(pathsum::tail(ps, 3, 0.5)).epsilon(1e-12));
  CHECK(covariance(t, 2, 4) == doctest::Approx(pathsum::covariance(ps, 2, 4)).epsilon(1e-11));
  CHECK(covariance(t, 2, 2) == doctest::Approx(pathsum::covariance(ps, 2, 2)).epsilon(1e-11));
}

TEST_CASE("forward and backward tables tell the same story") {
  const KernelTables t = tables_for(StepLaw::uniform3(), ObstacleSpec::quadratic(0.5), 64);
  CHECK(t.logZ <= 0.0);
  for (long k = 0; k <= t.n; ++k) {
    std::vector<double> terms;
    for (long i = 0; i < t.grid.width[k]; ++i) terms.push_back(t.F[k][i] + t.B[k][i]);
    CHECK(log_sum_exp(terms) == doctest::Approx(t.logZ).epsilon(1e-9));
  }
}

TEST_CASE("logZ is insensitive to the grid cap") {
  const double z12 =
      tables_for(StepLaw::uniform3(), ObstacleSpec::quadratic(0.5), 64, 12.0).logZ;
  const double z24 =
      tables_for(StepLaw::uniform3(), ObstacleSpec::quadratic(0.5), 64, 24.0).logZ;
  CHECK(std::abs(z12 - z24) <= 1e-10);
}

TEST_CASE("a too-small cap is detected as mass loss") {
  CHECK_THROWS_AS(tables_for(StepLaw::uniform3(), ObstacleSpec::quadratic(0.5), 64, 0.5, 1e-12),
                  MassLossError);
}

TEST_CASE("symmetric obstacle and law give a symmetric marginal profile") {
  const KernelTables t = tables_for(StepLaw::uniform3(), ObstacleSpec::quadratic(0.5), 32);
  for (long k = 1; k < 32; ++k) {
    const auto a = marginal(t, k);
    const auto b = marginal(t, 32 - k);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
  }
}

TEST_CASE("covariance: pinned endpoints and positive correlations") {
  const KernelTables t = tables_for(StepLaw::uniform3(), ObstacleSpec::quadratic(0.5), 64);
  CHECK(covariance(t, 0, 10) == 0.0);
  CHECK(covariance(t, 10, 64) == 0.0);
  const double var = covariance(t, 32, 32);
  CHECK(var > 0.0);
  const double c1 = covariance(t, 32, 36);
  const double c2 = covariance(t, 32, 44);
  CHECK(c1 > 0.0);
  CHECK(c1 < var);
  CHECK(c2 < c1);  // decays with separation
  CHECK(covariance(t, 28, 32) == doctest::Approx(covariance(t, 32, 36)).epsilon(1e-8));
}

TEST_CASE("backward path sampling reproduces the marginal") {
  const long n = 16;
  const KernelTables t = tables_for(StepLaw::uniform3(), ObstacleSpec::quadratic(0.5), n);
  const long count = 20000;
  const auto paths = sample_paths(t, count, 1234);
  REQUIRE(static_cast<long>(paths.size()) == count);

  std::map<long, long> hist;
  for (const auto& path : paths) {
    REQUIRE(static_cast<long>(path.size()) == n + 1);
    CHECK(path[0] == 0);
    CHECK(path[n] == t.grid.floor_s[n]);
    for (long k = 1; k < n; ++k) {
      CHECK(path[k] >= t.grid.floor_s[k]);
      CHECK(std::abs(path[k] - path[k - 1]) <= 1);
    }
    ++hist[path[n / 2]];
  }
  const auto m = marginal(t, n / 2);
  for (long i = 0; i < static_cast<long>(m.size()); ++i) {
    const double p = m[i];
    const double emp = static_cast<double>(hist[t.grid.floor_s[n / 2] + i]) / count;
    const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-12) / count);
    CHECK(std::abs(emp - p) <= 4.0 * sigma + 1e-12);
  }
  // determinism in the seed
  const auto again = sample_paths(t, 5, 1234);
  for (long idx = 0; idx < 5; ++idx) CHECK(again[idx] == paths[idx]);
}

TEST_CASE("gaussian laws are rejected by the lattice kernel") {
  const ObstacleSpec spec = ObstacleSpec::quadratic(0.5);
  const ObstacleProfile prof = discretize(spec, 8);
  const TiltSchedule sched = tilt_schedule(StepLaw::gaussian(1.0), spec, prof);
  CHECK_THROWS_AS(build_tables(StepLaw::gaussian(1.0), prof, sched, build_grid(prof)),
                  DomainError);
}
