#include "obw/obstacle.hpp"

#include <cmath>
#include <sstream>

namespace obw {

ObstacleSpec ObstacleSpec::quadratic(double c) {
  if (!(c > 0.0)) throw DomainError("quadratic obstacle needs c > 0");
  ObstacleSpec s;
  s.family = Family::Quadratic;
  s.param = c;
  s.h = [c](double x) { return c * x * (1.0 - x); };
  s.dh = [c](double x) { return c * (1.0 - 2.0 * x); };
  s.d2h = [c](double) { return -2.0 * c; };
  return s;
}

ObstacleSpec ObstacleSpec::cosine(double c) {
  if (!(c > 0.0)) throw DomainError("cosine obstacle needs c > 0");
  const double pi = std::acos(-1.0);
  ObstacleSpec s;
  s.family = Family::Cosine;
  s.param = c;
  s.h = [c, pi](double x) { return c / pi * std::sin(pi * x); };
  s.dh = [c, pi](double x) { return c * std::cos(pi * x); };
  s.d2h = [c, pi](double x) { return -c * pi * std::sin(pi * x); };
  return s;
}

ObstacleSpec ObstacleSpec::p_obstacle(double p) {
  if (!(p >= 1.0)) throw DomainError("p-obstacle needs p >= 1");
  ObstacleSpec s;
  s.family = Family::PObstacle;
  s.param = p;
  s.h = [p](double x) { return 1.0 - std::pow(std::abs(x), p); };
  s.dh = [p](double x) {
    const double sign = x >= 0.0 ? 1.0 : -1.0;
    return -sign * p * std::pow(std::abs(x), p - 1.0);
  };
  s.d2h = [p](double x) { return -p * (p - 1.0) * std::pow(std::abs(x), p - 2.0); };
  return s;
}

ObstacleSpec ObstacleSpec::tabulated(std::function<double(double)> h,
                                     std::function<double(double)> dh,
                                     std::function<double(double)> d2h) {
  ObstacleSpec s;
  s.family = Family::Tabulated;
  s.h = std::move(h);
  s.dh = std::move(dh);
  s.d2h = std::move(d2h);
  return s;
}

ObstacleSpec parse_obstacle(const std::string& family, double param) {
  if (family == "quadratic") return ObstacleSpec::quadratic(param);
  if (family == "cosine") return ObstacleSpec::cosine(param);
  if (family == "p_obstacle") return ObstacleSpec::p_obstacle(param);
  throw ConfigError("unknown obstacle family: " + family);
}

ObstacleProfile discretize(const ObstacleSpec& spec, long n) {
  if (n < 2) throw DomainError("discretize needs n >= 2");
  ObstacleProfile prof;
  prof.n = n;
  prof.hn.resize(n + 1);
  prof.delta.resize(n);
  for (long k = 0; k <= n; ++k) prof.hn[k] = n * spec.h(static_cast<double>(k) / n);
  for (long k = 1; k <= n; ++k) prof.delta[k - 1] = prof.hn[k] - prof.hn[k - 1];
  prof.zn = std::ceil(prof.hn[n]) - prof.hn[n];
  return prof;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  struct Impl {
    const std::function<double(double)>& f;
    double recurse(double a, double m, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) const {
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      if (depth > 40 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
      return recurse(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
             recurse(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
  };
  Impl impl{f};
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return impl.recurse(a, m, b, fa, fm, fb, whole, tol, 0);
}

TiltSchedule tilt_schedule(const StepLaw& law, const ObstacleSpec& spec,
                           const ObstacleProfile& profile, double slope_margin) {
  const long n = profile.n;
  TiltSchedule sched;
  sched.gamma.resize(n);
  sched.alpha.resize(n - 1);

  for (long k = 1; k <= n; ++k) {
    try {
      sched.gamma[k - 1] = law.invert_mean(profile.delta[k - 1], slope_margin);
    } catch (const SlopeError&) {
      std::ostringstream os;
      os << "obstacle too steep for this step law at k=" << k
         << " (delta=" << profile.delta[k - 1] << ")";
      throw SlopeError(os.str());
    }
  }
  for (long k = 1; k <= n - 1; ++k)
    sched.alpha[k - 1] = n * (sched.gamma[k - 1] - sched.gamma[k]);

  double sum = 0.0;
  for (long k = 1; k <= n; ++k) sum += law.rate_function(profile.delta[k - 1]);
  sched.ld_exponent_sum = sum;
  sched.ld_exponent_integral =
      n * adaptive_simpson([&](double s) { return law.rate_function(spec.dh(s)); }, 0.0, 1.0);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double a : sched.alpha) {
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  sched.alpha_bounds = {lo, hi};
  return sched;
}

}  // namespace obw
