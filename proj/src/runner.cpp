#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "obw/config.hpp"
#include "obw/parallel.hpp"
#include "obw/scaling.hpp"

namespace obw {

namespace {

std::atomic<int> g_threads{0};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

/// Gnuplot-ready columns: x value stderr, one block per observable.
std::string rows_to_plot(const ExponentReport& report) {
  std::map<std::string, std::vector<const ReportRow*>> groups;
  for (const auto& row : report.rows) groups[row.observable].push_back(&row);
  std::ostringstream os;
  os.precision(17);
  for (const auto& [name, rows] : groups) {
    os << "# " << name << "  (x value stderr)\n";
    for (const ReportRow* row : rows) {
      double x = row->n;
      if (!std::isnan(row->lambda)) x = row->lambda;
      if (!std::isnan(row->j)) x = row->j - row->i;
      os << x << ' ' << row->value << ' '
         << (std::isnan(row->stderr_value) ? 0.0 : row->stderr_value) << '\n';
    }
    os << "\n\n";
  }
  return os.str();
}

std::vector<double> lambda_grid_for(const RunConfig& cfg, long n) {
  double lo = cfg.lambda_min;
  double hi = cfg.lambda_max;
  if (hi <= 0.0) hi = std::min(8.0, std::pow(static_cast<double>(n), 1.0 / 6.0));
  if (hi <= lo) hi = lo * 2.0;
  std::vector<double> grid;
  const long m = cfg.lambda_points;
  for (long q = 0; q < m; ++q)
    grid.push_back(lo * std::pow(hi / lo, m > 1 ? static_cast<double>(q) / (m - 1) : 0.0));
  return grid;
}

std::vector<long> separation_grid_for(const RunConfig& cfg, long n) {
  const double corr_len = std::pow(static_cast<double>(n), 2.0 / 3.0);
  std::vector<long> seps;
  for (long q = 1; q <= cfg.cov_points; ++q) {
    const long s = std::lround(cfg.cov_max_sep_factor * corr_len * q / cfg.cov_points);
    if (s >= 1 && (seps.empty() || s != seps.back())) seps.push_back(s);
  }
  return seps;
}

}  // namespace

void set_thread_count(int threads) { g_threads.store(threads); }

int thread_count() {
  int t = g_threads.load();
  if (t > 0) return t;
  if (const char* env = std::getenv("OBSTACLE_WALK_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

int run_experiment(const RunConfig& cfg) {
  set_thread_count(cfg.threads);

  const StepLaw law = parse_step_law(cfg.law_name, cfg.law_param);
  const ObstacleSpec spec = parse_obstacle(cfg.obstacle_family, cfg.obstacle_param);
  KernelRunOptions kopt;
  kopt.k_cap = cfg.kernel_k_cap;
  kopt.mass_tol = cfg.kernel_mass_tol;
  kopt.slope_margin = cfg.slope_margin;

  ExponentReport report;
  if (cfg.experiment == "ld_correction") {
    report = ld_correction_experiment(law, spec, cfg.n_grid, kopt);
  } else if (cfg.experiment == "tails") {
    const long n = cfg.obstacle_n;
    const long k = cfg.tail_k > 0 ? cfg.tail_k : n / 2;
    report = tail_experiment(law, spec, n, k, lambda_grid_for(cfg, n), kopt);
  } else if (cfg.experiment == "variance") {
    report = variance_experiment(law, spec, cfg.n_grid, kopt);
  } else if (cfg.experiment == "covariance") {
    const long n = cfg.obstacle_n;
    report = covariance_experiment(law, spec, n, separation_grid_for(cfg, n), kopt);
  } else if (cfg.experiment == "free_field") {
    report = free_field_experiment(cfg.n_grid.front(), cfg.beta, cfg.sampler_grid_points,
                                   cfg.sampler_sweeps, cfg.seed);
  } else if (cfg.experiment == "alpha_p") {
    gauss::AlphaPBudget budget;
    budget.coupling_tau_multiple = cfg.sampler_coupling_tau_multiple;
    budget.post_tau_multiple = cfg.sampler_post_tau_multiple;
    budget.tau_coeff = cfg.sampler_tau_coeff;
    budget.thin = cfg.sampler_thin;
    budget.coupling_tol_coeff = cfg.sampler_coupling_tol_coeff;
    budget.seed = cfg.seed;
    report = alpha_p_experiment(cfg.p_grid, cfg.n_grid, cfg.beta, budget);
  } else {
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  }

  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "rows.csv", rows_to_csv(report));
  write_file(dir / "report.json", report_to_json(report));
  write_file(dir / (report.experiment + ".dat"), rows_to_plot(report));

  std::cout << report.experiment << ": " << (report.pass ? "pass" : "fail");
  for (const auto& [name, fit] : report.fits)
    std::cout << "  " << name << " slope=" << fit.slope << " (+-" << fit.stderr_slope
              << ", R2=" << fit.r2 << ")";
  if (!report.detail.empty()) std::cout << "  [" << report.detail << "]";
  std::cout << "\n";
  return report.pass ? 0 : 2;
}

namespace {

/// Exhaustive path enumeration of the conditioned, tilted, area-weighted walk
/// at tiny n; deliberately independent of the DP tables.
struct EnumResult {
  double Z = 0.0;
  std::map<long, double> marginal;  // S_k -> weight (unnormalized)
};

EnumResult enumerate_paths(const StepLaw& law, const ObstacleProfile& prof,
                           const TiltSchedule& sched, long probe_k) {
  const long n = prof.n;
  std::vector<long> floor_s(n + 1);
  for (long k = 0; k <= n; ++k) floor_s[k] = static_cast<long>(std::ceil(prof.hn[k]));
  EnumResult res;
  std::vector<double> logM(n + 1);
  for (long k = 1; k <= n; ++k) logM[k] = law.cumulant(sched.gamma[k - 1]);

  // the marginal needs the terminal pinning, so enumerate full paths and
  // remember the height seen at probe_k
  std::function<void(long, long, double, long)> walk = [&](long k, long s, double w,
                                                           long seen) {
    if (k == n) {
      if (s == floor_s[n]) {
        res.Z += w;
        if (probe_k >= 0) res.marginal[seen] += w;
      }
      return;
    }
    for (const auto& [x, px] : law.support()) {
      const long s2 = s + x;
      const long k2 = k + 1;
      if (k2 < n && s2 < floor_s[k2]) continue;
      if (k2 == n && s2 != floor_s[n]) continue;
      double w2 = w * px * std::exp(sched.gamma[k2 - 1] * x - logM[k2]);
      if (k2 >= 1 && k2 <= n - 1)
        w2 *= std::exp(-(sched.alpha[k2 - 1] / n) * (s2 - prof.hn[k2]));
      walk(k2, s2, w2, k2 == probe_k ? s2 : seen);
    }
  };
  walk(0, 0, 1.0, probe_k == 0 ? 0 : -1);
  return res;
}

bool check_one(const std::string& label, const StepLaw& law, long n) {
  const ObstacleSpec spec = ObstacleSpec::quadratic(0.5);
  const ObstacleProfile prof = discretize(spec, n);
  const TiltSchedule sched = tilt_schedule(law, spec, prof);
  const HeightGrid grid = build_grid(prof);
  const KernelTables tables = build_tables(law, prof, sched, grid);

  const long k = n / 2;
  const EnumResult ref = enumerate_paths(law, prof, sched, k);
  bool ok = true;

  const double z_dp = std::exp(tables.logZ);
  if (std::abs(z_dp - ref.Z) > 1e-12 * std::max(ref.Z, 1e-300)) ok = false;

  const std::vector<double> marg = marginal(tables, k);
  for (long i = 0; i < static_cast<long>(marg.size()); ++i) {
    const long s = tables.grid.floor_s[k] + i;
    const auto it = ref.marginal.find(s);
    const double want = (it == ref.marginal.end() ? 0.0 : it->second / ref.Z);
    if (std::abs(marg[i] - want) > 1e-12) ok = false;
  }

  std::cout << "  " << label << " n=" << n << " Z=" << z_dp << "  "
            << (ok ? "ok" : "MISMATCH") << "\n";
  return ok;
}

}  // namespace

int run_check() {
  bool all_ok = true;
  std::cout << "exhaustive-oracle checks (quadratic obstacle, c=1/2):\n";
  for (long n = 2; n <= 8; ++n) all_ok &= check_one("uniform3", StepLaw::uniform3(), n);
  for (long n = 2; n <= 7; ++n)
    all_ok &= check_one("centered_binomial(2)", StepLaw::centered_binomial(2), n);
  std::cout << (all_ok ? "all checks passed\n" : "CHECK FAILURES\n");
  return all_ok ? 0 : 1;
}

}  // namespace obw
