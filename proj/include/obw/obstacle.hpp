#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "obw/step_law.hpp"

namespace obw {

/// A concave obstacle profile h on [0,1] with h(0)=0, given with its first
/// two derivatives. The p-obstacle family 1-|x|^p lives on [-1,1] and is used
/// only by the Gaussian lab; it is kept here for config parsing.
struct ObstacleSpec {
  enum class Family { Quadratic, Cosine, PObstacle, Tabulated };

  Family family = Family::Quadratic;
  double param = 0.5;
  std::function<double(double)> h, dh, d2h;

  static ObstacleSpec quadratic(double c);   // h(x) = c x (1-x)
  static ObstacleSpec cosine(double c);      // h(x) = (c/pi) sin(pi x)
  static ObstacleSpec p_obstacle(double p);  // h(x) = 1-|x|^p on [-1,1]
  static ObstacleSpec tabulated(std::function<double(double)> h,
                                std::function<double(double)> dh,
                                std::function<double(double)> d2h);
};

ObstacleSpec parse_obstacle(const std::string& family, double param);

/// Discretization h_n(k) = n h(k/n) with its increments and endpoint offset.
struct ObstacleProfile {
  long n = 0;
  std::vector<double> hn;     // size n+1
  std::vector<double> delta;  // delta[k-1] = hn[k]-hn[k-1], k=1..n
  double zn = 0.0;            // ceil(hn[n]) - hn[n], in [0,1)
};

ObstacleProfile discretize(const ObstacleSpec& spec, long n);

/// Per-step tilts gamma_k, effective potential alpha_k = n(gamma_k-gamma_{k+1})
/// for k=1..n-1, and the large-deviation exponent in both its sum and
/// integral forms.
struct TiltSchedule {
  std::vector<double> gamma;  // gamma[k-1], k=1..n
  std::vector<double> alpha;  // alpha[k-1], k=1..n-1
  double ld_exponent_sum = 0.0;       // sum_k I(delta_k)
  double ld_exponent_integral = 0.0;  // n * int_0^1 I(h'(s)) ds
  std::pair<double, double> alpha_bounds{0.0, 0.0};
};

TiltSchedule tilt_schedule(const StepLaw& law, const ObstacleSpec& spec,
                           const ObstacleProfile& profile,
                           double slope_margin = 1e-6);

/// Adaptive Simpson quadrature, used for the LD integral.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10);

}  // namespace obw
