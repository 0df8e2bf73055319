#include "obw/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace obw {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& value, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    std::ostringstream os;
    os << "line " << line << ": key '" << key << "' expects a number, got '" << value << "'";
    throw ConfigError(os.str());
  }
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& value, int line) {
  std::vector<T> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<T>(parse_number(key, item, line)));
  }
  if (out.empty()) {
    std::ostringstream os;
    os << "line " << line << ": key '" << key << "' expects a comma-separated list";
    throw ConfigError(os.str());
  }
  return out;
}

void require_positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError("key '" + key + "' must be positive");
}

}  // namespace

const std::vector<std::string>& registered_experiments() {
  static const std::vector<std::string> list = {"ld_correction", "tails",     "variance",
                                                "covariance",    "free_field", "alpha_p"};
  return list;
}

const std::vector<std::string>& registered_laws() {
  static const std::vector<std::string> list = {"uniform3", "lazy_srw", "centered_binomial",
                                                "two_sided_geometric", "gaussian"};
  return list;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool have_experiment = false;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "line " << lineno << ": expected 'key = value', got '" << trim(raw) << "'";
      throw ConfigError(os.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const int ln = lineno;

    if (key == "experiment") {
      cfg.experiment = value;
      have_experiment = true;
    } else if (key == "law") {
      cfg.law_name = value;
    } else if (key == "law.param") {
      cfg.law_param = parse_number(key, value, ln);
    } else if (key == "obstacle.family") {
      cfg.obstacle_family = value;
    } else if (key == "obstacle.param") {
      cfg.obstacle_param = parse_number(key, value, ln);
    } else if (key == "obstacle.n") {
      cfg.obstacle_n = static_cast<long>(parse_number(key, value, ln));
    } else if (key == "n_grid") {
      cfg.n_grid = parse_list<long>(key, value, ln);
    } else if (key == "p_grid") {
      cfg.p_grid = parse_list<double>(key, value, ln);
    } else if (key == "beta") {
      cfg.beta = parse_number(key, value, ln);
    } else if (key == "lambda.min") {
      cfg.lambda_min = parse_number(key, value, ln);
    } else if (key == "lambda.max") {
      cfg.lambda_max = parse_number(key, value, ln);
    } else if (key == "lambda.points") {
      cfg.lambda_points = static_cast<long>(parse_number(key, value, ln));
    } else if (key == "tail.k") {
      cfg.tail_k = static_cast<long>(parse_number(key, value, ln));
    } else if (key == "cov.max_sep_factor") {
      cfg.cov_max_sep_factor = parse_number(key, value, ln);
    } else if (key == "cov.points") {
      cfg.cov_points = static_cast<long>(parse_number(key, value, ln));
    } else if (key == "kernel.k_cap") {
      cfg.kernel_k_cap = parse_number(key, value, ln);
    } else if (key == "kernel.mass_tol") {
      cfg.kernel_mass_tol = parse_number(key, value, ln);
    } else if (key == "slope_margin") {
      cfg.slope_margin = parse_number(key, value, ln);
    } else if (key == "sampler.coupling_tau_multiple") {
      cfg.sampler_coupling_tau_multiple = parse_number(key, value, ln);
    } else if (key == "sampler.post_tau_multiple") {
      cfg.sampler_post_tau_multiple = parse_number(key, value, ln);
    } else if (key == "sampler.tau_coeff") {
      cfg.sampler_tau_coeff = parse_number(key, value, ln);
    } else if (key == "sampler.thin") {
      cfg.sampler_thin = static_cast<long>(parse_number(key, value, ln));
    } else if (key == "sampler.coupling_tol_coeff") {
      cfg.sampler_coupling_tol_coeff = parse_number(key, value, ln);
    } else if (key == "sampler.sweeps") {
      cfg.sampler_sweeps = static_cast<long>(parse_number(key, value, ln));
    } else if (key == "sampler.grid_points") {
      cfg.sampler_grid_points = static_cast<long>(parse_number(key, value, ln));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_number(key, value, ln));
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_number(key, value, ln));
    } else {
      std::ostringstream os;
      os << "line " << lineno << ": unknown key '" << key << "'";
      throw ConfigError(os.str());
    }
  }

  if (!have_experiment) throw ConfigError("missing required key 'experiment'");
  const auto& experiments = registered_experiments();
  if (std::find(experiments.begin(), experiments.end(), cfg.experiment) == experiments.end())
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  const auto& laws = registered_laws();
  if (std::find(laws.begin(), laws.end(), cfg.law_name) == laws.end())
    throw ConfigError("unknown law '" + cfg.law_name + "'");

  require_positive("obstacle.param", cfg.obstacle_param);
  require_positive("obstacle.n", static_cast<double>(cfg.obstacle_n));
  require_positive("beta", cfg.beta);
  require_positive("lambda.min", cfg.lambda_min);
  require_positive("lambda.points", static_cast<double>(cfg.lambda_points));
  require_positive("cov.max_sep_factor", cfg.cov_max_sep_factor);
  require_positive("cov.points", static_cast<double>(cfg.cov_points));
  require_positive("kernel.k_cap", cfg.kernel_k_cap);
  require_positive("kernel.mass_tol", cfg.kernel_mass_tol);
  require_positive("slope_margin", cfg.slope_margin);
  require_positive("sampler.coupling_tau_multiple", cfg.sampler_coupling_tau_multiple);
  require_positive("sampler.post_tau_multiple", cfg.sampler_post_tau_multiple);
  require_positive("sampler.tau_coeff", cfg.sampler_tau_coeff);
  require_positive("sampler.thin", static_cast<double>(cfg.sampler_thin));
  require_positive("sampler.coupling_tol_coeff", cfg.sampler_coupling_tol_coeff);
  require_positive("sampler.sweeps", static_cast<double>(cfg.sampler_sweeps));
  require_positive("sampler.grid_points", static_cast<double>(cfg.sampler_grid_points));
  if (cfg.threads < 0) throw ConfigError("key 'threads' must be non-negative");
  if (cfg.tail_k < 0) throw ConfigError("key 'tail.k' must be non-negative");

  if (cfg.n_grid.empty()) {
    if (cfg.experiment == "alpha_p")
      cfg.n_grid = {256, 512, 1024, 2048, 4096};
    else if (cfg.experiment == "free_field")
      cfg.n_grid = {64};
    else
      cfg.n_grid = {512, 1024, 2048, 4096, 8192};
  }
  for (long n : cfg.n_grid) require_positive("n_grid", static_cast<double>(n));
  if (cfg.p_grid.empty()) cfg.p_grid = {1.5, 2.0, 3.0};
  for (double p : cfg.p_grid)
    if (!(p >= 1.0)) throw ConfigError("p_grid entries must be >= 1");
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace obw
