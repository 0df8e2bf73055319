#include "obw/step_law.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace obw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int gcd_of_support_gaps(const std::vector<std::pair<int, double>>& support) {
  int g = 0;
  for (std::size_t i = 1; i < support.size(); ++i) {
    g = std::gcd(g, support[i].first - support[0].first);
  }
  return g;
}

}  // namespace

StepLaw StepLaw::lattice(std::vector<std::pair<int, double>> support,
                         double a_star, double b_star, int truncation_radius) {
  std::sort(support.begin(), support.end());
  double total = 0.0, mean = 0.0;
  for (const auto& [x, p] : support) {
    if (p < 0.0 || p > 1.0) throw DomainError("lattice probability out of [0,1]");
    total += p;
    mean += p * x;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("lattice probabilities do not sum to 1");
  if (std::abs(mean) > 1e-12) throw DomainError("lattice law is not centred");
  if (support.size() < 2) throw DomainError("lattice support is degenerate");
  if (gcd_of_support_gaps(support) != 1)
    throw DomainError("lattice support gaps have gcd > 1 (periodic law)");
  if (!(a_star < 0.0 && 0.0 < b_star)) throw DomainError("domain bounds must straddle 0");

  StepLaw law;
  law.kind_ = LawKind::Lattice;
  law.support_ = std::move(support);
  law.mean_ = 0.0;
  double var = 0.0;
  for (const auto& [x, p] : law.support_) var += p * x * x;
  law.sigma2_ = var;
  law.a_star_ = a_star;
  law.b_star_ = b_star;
  law.truncation_radius_ = truncation_radius;
  return law;
}

StepLaw StepLaw::gaussian(double beta) {
  if (!(beta > 0.0)) throw DomainError("gaussian variance must be positive");
  StepLaw law;
  law.kind_ = LawKind::Gaussian;
  law.beta_ = beta;
  law.sigma2_ = beta;
  return law;
}

StepLaw StepLaw::uniform3() {
  return lattice({{-1, 1.0 / 3}, {0, 1.0 / 3}, {1, 1.0 / 3}});
}

StepLaw StepLaw::lazy_srw(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("lazy_srw holding probability must be in (0,1)");
  return lattice({{-1, (1.0 - q) / 2}, {0, q}, {1, (1.0 - q) / 2}});
}

StepLaw StepLaw::centered_binomial(int m) {
  if (m < 2 || m % 2 != 0) throw DomainError("centered_binomial requires even m >= 2");
  std::vector<double> binom(m + 1, 0.0);
  binom[0] = 1.0;
  for (int row = 1; row <= m; ++row)
    for (int j = row; j > 0; --j) binom[j] += binom[j - 1];
  const double norm = std::pow(2.0, m);
  std::vector<std::pair<int, double>> support;
  for (int j = 0; j <= m; ++j) support.push_back({j - m / 2, binom[j] / norm});
  return lattice(std::move(support));
}

StepLaw StepLaw::two_sided_geometric(double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("two_sided_geometric ratio must be in (0,1)");
  // p(x) proportional to r^{|x|}; H is finite exactly on (ln r, -ln r).
  // Truncate at total tail mass <= 1e-14 and renormalize.
  const double c = (1.0 - r) / (1.0 + r);
  int radius = 1;
  while (2.0 * c * std::pow(r, radius + 1) / (1.0 - r) > 1e-14) ++radius;
  std::vector<std::pair<int, double>> support;
  double total = 0.0;
  for (int x = -radius; x <= radius; ++x) {
    const double p = c * std::pow(r, std::abs(x));
    support.push_back({x, p});
    total += p;
  }
  for (auto& [x, p] : support) p /= total;
  return lattice(std::move(support), std::log(r), -std::log(r), radius);
}

std::pair<double, double> StepLaw::slope_range() const {
  if (kind_ == LawKind::Gaussian) return {-kInf, kInf};
  return {static_cast<double>(support_.front().first),
          static_cast<double>(support_.back().first)};
}

void StepLaw::require_in_domain(double t) const {
  if (!(t > a_star_ && t < b_star_)) {
    std::ostringstream os;
    os << "t=" << t << " outside the domain (" << a_star_ << ", " << b_star_ << ") of H";
    throw DomainError(os.str());
  }
}

double StepLaw::cumulant(double t) const {
  require_in_domain(t);
  if (kind_ == LawKind::Gaussian) return mean_ * t + 0.5 * beta_ * t * t;
  // max-shifted exponential sum, stable for |t x| up to ~700
  double shift = -kInf;
  for (const auto& [x, p] : support_)
    if (p > 0.0) shift = std::max(shift, t * x);
  double acc = 0.0;
  for (const auto& [x, p] : support_)
    if (p > 0.0) acc += p * std::exp(t * x - shift);
  return shift + std::log(acc);
}

std::pair<double, double> StepLaw::cumulant_derivatives(double t) const {
  require_in_domain(t);
  if (kind_ == LawKind::Gaussian) return {mean_ + beta_ * t, beta_};
  double shift = -kInf;
  for (const auto& [x, p] : support_)
    if (p > 0.0) shift = std::max(shift, t * x);
  double w = 0.0, wx = 0.0, wxx = 0.0;
  for (const auto& [x, p] : support_) {
    if (p <= 0.0) continue;
    const double e = p * std::exp(t * x - shift);
    w += e;
    wx += e * x;
    wxx += e * x * x;
  }
  const double m1 = wx / w;
  const double var = wxx / w - m1 * m1;
  return {m1, var};
}

double StepLaw::invert_mean(double m, double slope_margin) const {
  if (kind_ == LawKind::Gaussian) return (m - mean_) / beta_;

  const auto [lo_slope, hi_slope] = slope_range();
  if (!(m > lo_slope && m < hi_slope)) {
    std::ostringstream os;
    os << "slope m=" << m << " outside attainable range (" << lo_slope << ", " << hi_slope << ")";
    throw SlopeError(os.str());
  }

  const double tol = 1e-12 * std::max(1.0, std::abs(m));
  auto hp = [&](double t) { return cumulant_derivatives(t).first; };

  // bracket the root; H' is strictly increasing
  double lo = 0.0, hi = 0.0;
  if (m >= hp(0.0)) {
    hi = std::isinf(b_star_) ? 1.0 : 0.5 * b_star_;
    while (hp(hi) < m) {
      if (std::isinf(b_star_)) {
        hi *= 2.0;
        if (hi > 1e9) throw SlopeError("failed to bracket slope from above");
      } else {
        hi = 0.5 * (hi + b_star_);
        if (b_star_ - hi < slope_margin) throw SlopeError("slope requires tilt too close to b_*");
      }
    }
  } else {
    lo = std::isinf(a_star_) ? -1.0 : 0.5 * a_star_;
    while (hp(lo) > m) {
      if (std::isinf(a_star_)) {
        lo *= 2.0;
        if (lo < -1e9) throw SlopeError("failed to bracket slope from below");
      } else {
        lo = 0.5 * (lo + a_star_);
        if (lo - a_star_ < slope_margin) throw SlopeError("slope requires tilt too close to a_*");
      }
    }
  }

  double gamma = 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    const auto [h1, h2] = cumulant_derivatives(gamma);
    const double err = h1 - m;
    if (std::abs(err) <= tol) break;
    if (err > 0.0) hi = gamma; else lo = gamma;
    double next = gamma - err / h2;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    gamma = next;
  }

  if (!std::isinf(a_star_) && gamma - a_star_ < slope_margin)
    throw SlopeError("tilt lands within the safety margin of a_*");
  if (!std::isinf(b_star_) && b_star_ - gamma < slope_margin)
    throw SlopeError("tilt lands within the safety margin of b_*");
  return gamma;
}

double StepLaw::rate_function(double x) const {
  const double gamma = invert_mean(x);
  return gamma * x - cumulant(gamma);
}

StepLaw StepLaw::tilt(double gamma) const {
  require_in_domain(gamma);
  StepLaw out;
  if (kind_ == LawKind::Gaussian) {
    out.kind_ = LawKind::Gaussian;
    out.beta_ = beta_;
    out.sigma2_ = beta_;
    out.mean_ = mean_ + gamma * beta_;
    return out;
  }
  const double logM = cumulant(gamma);
  out.kind_ = LawKind::Lattice;
  out.support_ = support_;
  double mean = 0.0, m2 = 0.0;
  for (auto& [x, p] : out.support_) {
    p = p * std::exp(gamma * x - logM);
    mean += p * x;
    m2 += p * x * x;
  }
  out.mean_ = mean;
  out.sigma2_ = m2 - mean * mean;
  out.a_star_ = a_star_ - gamma;
  out.b_star_ = b_star_ - gamma;
  out.truncation_radius_ = truncation_radius_;
  return out;
}

StepLaw parse_step_law(const std::string& name, double param) {
  if (name == "uniform3") return StepLaw::uniform3();
  if (name == "lazy_srw") return StepLaw::lazy_srw(param);
  if (name == "centered_binomial") return StepLaw::centered_binomial(static_cast<int>(param));
  if (name == "two_sided_geometric") return StepLaw::two_sided_geometric(param);
  if (name == "gaussian") return StepLaw::gaussian(param);
  throw ConfigError("unknown step law: " + name);
}

}  // namespace obw
