#include "obw/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "obw/rng.hpp"

namespace obw {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_sum_exp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : v)
    if (x != kNegInf) acc += std::exp(x - m);
  return m + std::log(acc);
}

HeightGrid build_grid(const ObstacleProfile& profile, double k_cap, double mass_tol) {
  const long n = profile.n;
  HeightGrid grid;
  grid.n = n;
  grid.k_cap = k_cap;
  grid.mass_tol = mass_tol;
  grid.cap = static_cast<long>(std::ceil(k_cap * std::cbrt(static_cast<double>(n))));
  grid.floor_s.resize(n + 1);
  grid.width.resize(n + 1);
  for (long k = 0; k <= n; ++k) {
    grid.floor_s[k] = static_cast<long>(std::ceil(profile.hn[k]));
    grid.width[k] = grid.cap + 1;
  }
  grid.floor_s[0] = 0;
  grid.width[0] = 1;
  grid.width[n] = 1;
  return grid;
}

KernelTables build_tables(const StepLaw& law, const ObstacleProfile& profile,
                          const TiltSchedule& schedule, const HeightGrid& grid) {
  if (law.kind() != LawKind::Lattice)
    throw DomainError("kernel tables require a lattice step law");
  const long n = profile.n;

  KernelTables t;
  t.n = n;
  t.grid = grid;
  t.hn = profile.hn;
  t.alpha = schedule.alpha;

  // tilted log step probabilities per time step
  const auto& sup = law.support();
  t.step_min = sup.front().first;
  const int step_max = sup.back().first;
  const int nsteps = step_max - t.step_min + 1;
  t.lstep.assign(n + 1, std::vector<double>(nsteps, kNegInf));
  for (long k = 1; k <= n; ++k) {
    const double g = schedule.gamma[k - 1];
    const double logM = law.cumulant(g);
    for (const auto& [x, p] : sup)
      if (p > 0.0) t.lstep[k][x - t.step_min] = std::log(p) + g * x - logM;
  }

  auto pot = [&](long k, long s) -> double {
    if (k >= 1 && k <= n - 1)
      return -(t.alpha[k - 1] / n) * (static_cast<double>(s) - t.hn[k]);
    return 0.0;
  };

  // forward pass
  t.F.assign(n + 1, {});
  t.F[0] = {0.0};
  std::vector<double> terms;
  for (long k = 1; k <= n; ++k) {
    t.F[k].assign(grid.width[k], kNegInf);
    for (long i = 0; i < grid.width[k]; ++i) {
      const long sp = grid.floor_s[k] + i;
      terms.clear();
      for (long j = 0; j < grid.width[k - 1]; ++j) {
        const long s = grid.floor_s[k - 1] + j;
        const long dx = sp - s;
        if (dx < t.step_min || dx > step_max) continue;
        const double w = t.lstep[k][dx - t.step_min];
        if (w == kNegInf || t.F[k - 1][j] == kNegInf) continue;
        terms.push_back(t.F[k - 1][j] + w);
      }
      t.F[k][i] = log_sum_exp(terms) + pot(k, sp);
    }
  }

  // backward pass
  t.B.assign(n + 1, {});
  t.B[n] = {0.0};
  for (long k = n - 1; k >= 0; --k) {
    t.B[k].assign(grid.width[k], kNegInf);
    for (long i = 0; i < grid.width[k]; ++i) {
      const long s = grid.floor_s[k] + i;
      terms.clear();
      for (long j = 0; j < grid.width[k + 1]; ++j) {
        const long sp = grid.floor_s[k + 1] + j;
        const long dx = sp - s;
        if (dx < t.step_min || dx > step_max) continue;
        const double w = t.lstep[k + 1][dx - t.step_min];
        if (w == kNegInf || t.B[k + 1][j] == kNegInf) continue;
        terms.push_back(w + pot(k + 1, sp) + t.B[k + 1][j]);
      }
      t.B[k][i] = log_sum_exp(terms);
    }
  }

  t.logZ = t.F[n][0];
  if (!std::isfinite(t.logZ))
    throw MassLossError("kernel partition function vanished (grid unreachable)");

  // weight observed in the top grid row, relative to Z
  terms.clear();
  for (long k = 1; k <= n - 1; ++k) {
    const long top = grid.width[k] - 1;
    if (t.F[k][top] != kNegInf && t.B[k][top] != kNegInf)
      terms.push_back(t.F[k][top] + t.B[k][top]);
  }
  const double lost = log_sum_exp(terms);
  t.mass_loss = lost == kNegInf ? 0.0 : std::exp(lost - t.logZ);
  if (t.mass_loss > grid.mass_tol) {
    std::ostringstream os;
    os << "grid cap too low: top-row mass " << t.mass_loss << " exceeds tolerance "
       << grid.mass_tol;
    throw MassLossError(os.str());
  }
  return t;
}

std::vector<double> marginal(const KernelTables& t, long k) {
  std::vector<double> out(t.grid.width[k], 0.0);
  for (long i = 0; i < t.grid.width[k]; ++i) {
    const double l = t.F[k][i] + t.B[k][i];
    out[i] = l == kNegInf ? 0.0 : std::exp(l - t.logZ);
  }
  return out;
}

double moment(const KernelTables& t, long k, int r) {
  const auto m = marginal(t, k);
  double acc = 0.0;
  for (long i = 0; i < static_cast<long>(m.size()); ++i) {
    const double w = static_cast<double>(t.grid.floor_s[k] + i) - t.hn[k];
    acc += m[i] * std::pow(w, r);
  }
  return acc;
}

double tail(const KernelTables& t, long k, double lambda) {
  const double threshold = lambda * std::cbrt(static_cast<double>(t.n));
  const auto m = marginal(t, k);
  double acc = 0.0;
  for (long i = 0; i < static_cast<long>(m.size()); ++i) {
    const double w = static_cast<double>(t.grid.floor_s[k] + i) - t.hn[k];
    if (w >= threshold) acc += m[i];
  }
  return acc;
}

double covariance(const KernelTables& t, long i, long j) {
  if (i > j) std::swap(i, j);
  if (i == 0 || j == t.n) return 0.0;
  if (i == j) {
    const double m1 = moment(t, i, 1);
    return moment(t, i, 2) - m1 * m1;
  }
  const long n = t.n;
  const int step_max = t.step_min + static_cast<int>(t.lstep[1].size()) - 1;
  auto pot = [&](long k, long s) -> double {
    if (k >= 1 && k <= n - 1)
      return -(t.alpha[k - 1] / n) * (static_cast<double>(s) - t.hn[k]);
    return 0.0;
  };

  // height-weighted forward vector G_i(s) = F_i(s) + log(W_i)
  std::vector<double> G(t.grid.width[i], kNegInf);
  for (long a = 0; a < t.grid.width[i]; ++a) {
    const double w = static_cast<double>(t.grid.floor_s[i] + a) - t.hn[i];
    if (w > 0.0 && t.F[i][a] != kNegInf) G[a] = t.F[i][a] + std::log(w);
  }
  std::vector<double> next, terms;
  for (long k = i + 1; k <= j; ++k) {
    next.assign(t.grid.width[k], kNegInf);
    for (long b = 0; b < t.grid.width[k]; ++b) {
      const long sp = t.grid.floor_s[k] + b;
      terms.clear();
      for (long a = 0; a < t.grid.width[k - 1]; ++a) {
        const long s = t.grid.floor_s[k - 1] + a;
        const long dx = sp - s;
        if (dx < t.step_min || dx > step_max) continue;
        const double w = t.lstep[k][dx - t.step_min];
        if (w == kNegInf || G[a] == kNegInf) continue;
        terms.push_back(G[a] + w);
      }
      next[b] = log_sum_exp(terms) + pot(k, sp);
    }
    G.swap(next);
  }
  terms.clear();
  for (long b = 0; b < t.grid.width[j]; ++b) {
    const double w = static_cast<double>(t.grid.floor_s[j] + b) - t.hn[j];
    if (w > 0.0 && G[b] != kNegInf && t.B[j][b] != kNegInf)
      terms.push_back(G[b] + std::log(w) + t.B[j][b]);
  }
  const double lmixed = log_sum_exp(terms);
  const double mixed = lmixed == kNegInf ? 0.0 : std::exp(lmixed - t.logZ);
  return mixed - moment(t, i, 1) * moment(t, j, 1);
}

std::vector<std::vector<long>> sample_paths(const KernelTables& t, long count,
                                            std::uint64_t seed) {
  const long n = t.n;
  const int step_max = t.step_min + static_cast<int>(t.lstep[1].size()) - 1;
  std::vector<std::vector<long>> paths(count);
  std::vector<double> probs;
  for (long idx = 0; idx < count; ++idx) {
    RngStream rng(seed, static_cast<std::uint64_t>(idx));
    std::vector<long>& path = paths[idx];
    path.assign(n + 1, 0);
    path[n] = t.grid.floor_s[n];
    for (long k = n - 1; k >= 1; --k) {
      const long sp = path[k + 1];
      probs.assign(t.grid.width[k], 0.0);
      double shift = kNegInf;
      for (long a = 0; a < t.grid.width[k]; ++a) {
        const long s = t.grid.floor_s[k] + a;
        const long dx = sp - s;
        if (dx < t.step_min || dx > step_max) continue;
        const double w = t.lstep[k + 1][dx - t.step_min];
        if (w == kNegInf || t.F[k][a] == kNegInf) continue;
        shift = std::max(shift, t.F[k][a] + w);
      }
      double total = 0.0;
      for (long a = 0; a < t.grid.width[k]; ++a) {
        const long s = t.grid.floor_s[k] + a;
        const long dx = sp - s;
        if (dx < t.step_min || dx > step_max) continue;
        const double w = t.lstep[k + 1][dx - t.step_min];
        if (w == kNegInf || t.F[k][a] == kNegInf) continue;
        probs[a] = std::exp(t.F[k][a] + w - shift);
        total += probs[a];
      }
      double u = rng.next_double() * total;
      long chosen = -1;
      for (long a = 0; a < t.grid.width[k]; ++a) {
        if (probs[a] <= 0.0) continue;
        chosen = a;
        u -= probs[a];
        if (u <= 0.0) break;
      }
      path[k] = t.grid.floor_s[k] + chosen;
    }
    path[0] = 0;
  }
  return paths;
}

}  // namespace obw
