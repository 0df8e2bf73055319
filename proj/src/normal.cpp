#include "obw/normal.hpp"

#include <cmath>
#include <limits>

namespace obw {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
}  // namespace

double norm_cdf_c(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double log_norm_cdf_c(double z) {
  if (z < 28.0) {
    const double p = norm_cdf_c(z);
    if (p > 0.0) return std::log(p);
  }
  // asymptotic expansion of Mills' ratio
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z2 - std::log(z) - kLogSqrt2Pi + std::log(series);
}

double norm_ppf(double p) {
  // AS241 PPND16
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

double norm_ppf_c_log(double lp) {
  if (lp >= 0.0) return -std::numeric_limits<double>::infinity();
  if (lp > std::log(1e-290)) return -norm_ppf(std::exp(lp));
  // beyond double range of AS241: fixed point then Newton on log_norm_cdf_c
  double z = std::sqrt(-2.0 * lp);
  for (int i = 0; i < 4; ++i)
    z = std::sqrt(2.0 * (-lp - std::log(z) - kLogSqrt2Pi));
  for (int i = 0; i < 6; ++i) {
    const double f = log_norm_cdf_c(z) - lp;
    const double logpdf = -0.5 * z * z - kLogSqrt2Pi;
    const double fp = -std::exp(logpdf - log_norm_cdf_c(z));
    const double step = f / fp;
    z -= step;
    if (std::abs(step) < 1e-14 * z) break;
  }
  return z;
}

double trunc_norm_sample(double mean, double sd, double lower, double u) {
  double lw = std::log1p(-u);
  if (lower != -std::numeric_limits<double>::infinity()) {
    const double a = (lower - mean) / sd;
    lw += log_norm_cdf_c(a);
  }
  const double x = mean + sd * norm_ppf_c_log(lw);
  return lower == -std::numeric_limits<double>::infinity() ? x : std::max(x, lower);
}

}  // namespace obw
