#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "obw/errors.hpp"

namespace obw {

enum class LawKind { Lattice, Gaussian };

/// A centred step distribution together with its cumulant-generating toolkit:
/// H(t) = ln E(e^{tX}), its first two derivatives, the Legendre transform I,
/// and exponential tilting. Lattice laws are stored as finite probability
/// tables (unbounded-support families are truncated at tail mass <= 1e-14 and
/// renormalized; the truncation radius is recorded). Immutable after
/// construction.
class StepLaw {
 public:
  static StepLaw lattice(std::vector<std::pair<int, double>> support,
                         double a_star = -std::numeric_limits<double>::infinity(),
                         double b_star = std::numeric_limits<double>::infinity(),
                         int truncation_radius = 0);
  static StepLaw gaussian(double beta);

  // named families used by the experiment configs
  static StepLaw uniform3();
  static StepLaw lazy_srw(double q);
  static StepLaw centered_binomial(int m);
  static StepLaw two_sided_geometric(double r);

  LawKind kind() const { return kind_; }
  double sigma2() const { return sigma2_; }
  double mean() const { return mean_; }
  double beta() const { return beta_; }
  double a_star() const { return a_star_; }
  double b_star() const { return b_star_; }
  int truncation_radius() const { return truncation_radius_; }
  const std::vector<std::pair<int, double>>& support() const { return support_; }

  /// Open interval of slopes attainable as H'(t), t in (a_*, b_*).
  std::pair<double, double> slope_range() const;

  double cumulant(double t) const;
  std::pair<double, double> cumulant_derivatives(double t) const;

  /// Solves H'(gamma) = m. Newton with bisection fallback; refuses slopes
  /// whose tilt lands within `slope_margin` of a finite domain bound.
  double invert_mean(double m, double slope_margin = 1e-6) const;

  double rate_function(double x) const;

  /// Exponential tilt e^{gamma x}/M(gamma). The result is not recentred: its
  /// mean is H'(gamma).
  StepLaw tilt(double gamma) const;

 private:
  StepLaw() = default;
  void require_in_domain(double t) const;

  LawKind kind_ = LawKind::Lattice;
  std::vector<std::pair<int, double>> support_;  // lattice only, ordered
  double sigma2_ = 0.0;
  double mean_ = 0.0;
  double beta_ = 0.0;  // Gaussian variance
  double a_star_ = -std::numeric_limits<double>::infinity();
  double b_star_ = std::numeric_limits<double>::infinity();
  int truncation_radius_ = 0;
};

/// Parse a law declaration of the form `uniform3`, `lazy_srw(q)`, ...
StepLaw parse_step_law(const std::string& name, double param);

}  // namespace obw
