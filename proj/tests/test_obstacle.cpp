#include <cmath>

#include "doctest.h"
#include "obw/obstacle.hpp"

using namespace obw;

TEST_CASE("quadratic discretization values and telescoping") {
  const ObstacleSpec spec = ObstacleSpec::quadratic(0.5);
  const ObstacleProfile prof = discretize(spec, 8);
  // hn[k] = n c (k/n)(1-k/n) = c k(n-k)/n
  CHECK(prof.hn[0] == doctest::Approx(0.0));
  CHECK(prof.hn[4] == doctest::Approx(1.0));
  CHECK(prof.hn[8] == doctest::Approx(0.0));
  CHECK(prof.zn == doctest::Approx(0.0));
  double total = 0.0;
  for (double d : prof.delta) total += d;
  CHECK(total == doctest::Approx(prof.hn[8] - prof.hn[0]).epsilon(1e-12));
  CHECK_THROWS_AS(discretize(spec, 1), DomainError);
}

TEST_CASE("endpoint offset zn for a non-integer terminal height") {
  const ObstacleSpec spec = ObstacleSpec::tabulated(
      [](double x) { return 0.3 * x; }, [](double) { return 0.3; }, [](double) { return 0.0; });
  const ObstacleProfile prof = discretize(spec, 5);
  CHECK(prof.hn[5] == doctest::Approx(1.5));
  CHECK(prof.zn == doctest::Approx(0.5));
}

TEST_CASE("tilt schedule: gamma decreasing, alpha positive for concave obstacles") {
  const StepLaw law = StepLaw::uniform3();
  for (const ObstacleSpec& spec : {ObstacleSpec::quadratic(0.5), ObstacleSpec::cosine(0.8)}) {
    const ObstacleProfile prof = discretize(spec, 64);
    const TiltSchedule sched = tilt_schedule(law, spec, prof);
    REQUIRE(sched.gamma.size() == 64);
    REQUIRE(sched.alpha.size() == 63);
    for (std::size_t k = 1; k < sched.gamma.size(); ++k)
      CHECK(sched.gamma[k] < sched.gamma[k - 1]);
    for (double a : sched.alpha) CHECK(a > 0.0);
    CHECK(sched.alpha_bounds.first > 0.0);
    CHECK(sched.alpha_bounds.second >= sched.alpha_bounds.first);
  }
}

TEST_CASE("gaussian steps give the closed-form constant potential 2c/beta") {
  const double beta = 1.7, c = 0.5;
  const StepLaw law = StepLaw::gaussian(beta);
  const ObstacleSpec spec = ObstacleSpec::quadratic(c);
  const ObstacleProfile prof = discretize(spec, 32);
  const TiltSchedule sched = tilt_schedule(law, spec, prof);
  // gamma_k = delta_k/beta and the second difference of hn is -2c/n
  for (std::size_t k = 0; k < sched.gamma.size(); ++k)
    CHECK(sched.gamma[k] == doctest::Approx(prof.delta[k] / beta).epsilon(1e-12));
  for (double a : sched.alpha) CHECK(a == doctest::Approx(2.0 * c / beta).epsilon(1e-10));
}

TEST_CASE("alpha converges to -h''/H''(gamma(h')) with O(1/n) error") {
  const StepLaw law = StepLaw::uniform3();
  const ObstacleSpec spec = ObstacleSpec::quadratic(0.5);
  // at the midpoint h'=0, gamma=0, H''(0)=sigma^2=2/3, h''=-1: limit 3/2
  const double limit = 1.0 / law.sigma2();
  double prev_err = 0.0;
  for (long n : {128L, 256L, 512L}) {
    const ObstacleProfile prof = discretize(spec, n);
    const TiltSchedule sched = tilt_schedule(law, spec, prof);
    const double err = std::abs(sched.alpha[n / 2 - 1] - limit);
    CHECK(err < 0.05);
    if (prev_err > 1e-10) CHECK(err < 0.75 * prev_err);
    prev_err = err;
  }
}

TEST_CASE("LD exponent: sum and integral forms agree to O(1/n)") {
  const StepLaw law = StepLaw::uniform3();
  const ObstacleSpec spec = ObstacleSpec::quadratic(0.5);
  double prev_gap = 0.0;
  for (long n : {64L, 128L, 256L}) {
    const ObstacleProfile prof = discretize(spec, n);
    const TiltSchedule sched = tilt_schedule(law, spec, prof);
    CHECK(sched.ld_exponent_sum > 0.0);
    const double gap = std::abs(sched.ld_exponent_sum - sched.ld_exponent_integral);
    CHECK(gap < 0.05);
    if (prev_gap > 0.0) CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("too-steep obstacles are rejected with a slope error") {
  const StepLaw law = StepLaw::uniform3();  // slopes limited to (-1, 1)
  const ObstacleSpec spec = ObstacleSpec::quadratic(3.0);  // h'(0) = 3
  const ObstacleProfile prof = discretize(spec, 16);
  CHECK_THROWS_AS(tilt_schedule(law, spec, prof), SlopeError);
}

TEST_CASE("adaptive_simpson hits analytic integrals") {
  CHECK(adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const double pi = std::acos(-1.0);
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, pi) ==
        doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("parse_obstacle dispatch") {
  CHECK(parse_obstacle("quadratic", 0.5).h(0.5) == doctest::Approx(0.125));
  CHECK(parse_obstacle("cosine", 1.0).h(0.5) == doctest::Approx(1.0 / std::acos(-1.0)));
  CHECK(parse_obstacle("p_obstacle", 2.0).h(0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(parse_obstacle("staircase", 1.0), ConfigError);
}
