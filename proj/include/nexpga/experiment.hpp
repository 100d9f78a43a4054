/**
 * @file experiment.hpp
 * @brief Trial orchestration for the l1-2 least squares comparison.
 *
 * For every lambda and trial an instance is generated from stream
 * (seed, trial), every method is run from the origin under the same time
 * budget, and the per-method E(t) curves are averaged across trials.
 *
 * Outputs under output_dir:
 *   curves.csv                         method,lambda,n,t,E_mean,E_stderr,trials
 *   traces/<method>_lambda<l>_trial<j>.csv
 *       method,lambda,n,trial,k,time_s,F,R,H,gamma_bar,beta_bar,inner_iters,step_norm,residual
 *   failures.csv                       method,lambda,n,trial,error
 *   plot_lambda<l>_n<n>.svg
 */
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "nexpga/baselines.hpp"
#include "nexpga/instances.hpp"
#include "nexpga/metrics.hpp"
#include "nexpga/solver.hpp"

namespace nexpga {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  Eigen::Index n = 1000;
  std::optional<Eigen::Index> m;  ///< defaults to 0.1 n
  std::optional<Eigen::Index> s;  ///< defaults to 0.2 m
  std::vector<double> lambdas{0.1};
  std::size_t trials = 10;
  double t_max = 2.0;
  std::vector<std::string> methods = method_labels();
  std::uint64_t seed = 1;
  std::size_t time_grid_points = 200;
  std::filesystem::path output_dir = "bench_out";
  double noise_scale = 0.01;
  std::size_t max_iters = 0;  ///< 0 means unlimited
  bool log_y = false;
  bool write_traces = true;

  Eigen::Index rows() const {
    return m ? *m : std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(0.1 * static_cast<double>(n))));
  }
  Eigen::Index sparsity() const {
    return s ? *s : std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(0.2 * static_cast<double>(rows()))));
  }

  void validate() const {
    if (n < 1) throw ConfigError("n must be >= 1");
    const auto mm = rows();
    const auto ss = sparsity();
    if (!(ss >= 1 && ss <= mm && mm <= n)) throw ConfigError("need 1 <= s <= m <= n");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max must be positive");
    if (time_grid_points < 2) throw ConfigError("time_grid_points must be >= 2");
    if (lambdas.empty()) throw ConfigError("lambda list is empty");
    for (double l : lambdas) {
      if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("lambda values must be positive");
    }
    if (methods.empty()) throw ConfigError("method list is empty");
    for (const auto& label : methods) {
      const auto& known = method_labels();
      if (std::find(known.begin(), known.end(), label) == known.end()) {
        throw ConfigError("unknown method: " + label);
      }
    }
    if (!(noise_scale >= 0.0)) throw ConfigError("noise_scale must be >= 0");
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("invalid value for '" + key + "': " + text);
  }
  return value;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean for '" + key + "': " + text);
}

/// Shortest round-trip decimal representation.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Applies one `key = value` assignment. Unknown keys raise ConfigError.
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_number;
  if (key == "n") {
    cfg.n = parse_number<long long>(key, value);
  } else if (key == "m") {
    cfg.m = parse_number<long long>(key, value);
  } else if (key == "s") {
    cfg.s = parse_number<long long>(key, value);
  } else if (key == "lambda") {
    cfg.lambdas.clear();
    for (const auto& item : detail::split_list(value)) cfg.lambdas.push_back(parse_number<double>(key, item));
  } else if (key == "trials") {
    cfg.trials = parse_number<std::size_t>(key, value);
  } else if (key == "t_max") {
    cfg.t_max = parse_number<double>(key, value);
  } else if (key == "methods") {
    cfg.methods = detail::split_list(value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "time_grid_points") {
    cfg.time_grid_points = parse_number<std::size_t>(key, value);
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "noise_scale") {
    cfg.noise_scale = parse_number<double>(key, value);
  } else if (key == "max_iters") {
    cfg.max_iters = parse_number<std::size_t>(key, value);
  } else if (key == "log_y") {
    cfg.log_y = detail::parse_bool(key, value);
  } else if (key == "write_traces") {
    cfg.write_traces = detail::parse_bool(key, value);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

/// Line-oriented `key = value`; blank lines and lines starting with '#' are skipped.
inline ExperimentConfig parse_config(std::istream& is, ExperimentConfig cfg = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = detail::trim(std::string_view(text).substr(0, eq));
    const std::string value = detail::trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    apply_config_entry(cfg, key, value);
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  return parse_config(in);
}

/// Builds the method's splitting of the instance and runs it from x0.
inline SolveResult run_method(const MethodConfig& method, const Instance& inst, double lambda,
                              const Vector& x0, const StoppingRule& stop,
                              const WarningSink& warn = warn_to_stderr) {
  const CompositeProblem problem = method.decomposition == Decomposition::kI
                                       ? decomposition_I(inst, lambda)
                                       : decomposition_II(inst, lambda, warn);
  if (const auto* ls = std::get_if<LineSearchBinding>(&method.binding)) {
    SolverParams params = ls->params;
    params.stopping = stop;
    if (ls->lipschitz_cutoff && !params.beta_cutoff_gamma) {
      params.beta_cutoff_gamma = lipschitz_bound(inst.A());
    }
    return solve(problem, x0, params, ls->policy);
  }
  const auto& pd = std::get<PdcaeBinding>(method.binding);
  const double L = pd.lipschitz ? *pd.lipschitz : lipschitz_bound(inst.A());
  return solve_pdcae(problem, x0, L, pd.restart_period, stop);
}

struct TrialFailure {
  std::string method;
  double lambda = 0.0;
  std::size_t trial = 0;
  std::string error;
};

struct MethodCurve {
  std::string method;
  double lambda = 0.0;
  CurveStats stats;
  std::vector<std::vector<double>> per_trial;
};

struct ExperimentResult {
  std::vector<double> grid;
  std::vector<MethodCurve> curves;
  std::vector<TrialFailure> failures;
  std::size_t trials_attempted = 0;
  std::size_t trials_failed = 0;
  std::size_t trials_degenerate = 0;
  std::vector<std::filesystem::path> trace_files;

  const MethodCurve* find(const std::string& method, double lambda) const {
    for (const auto& c : curves) {
      if (c.method == method && c.lambda == lambda) return &c;
    }
    return nullptr;
  }
};

inline const char* kTraceHeader =
    "method,lambda,n,trial,k,time_s,F,R,H,gamma_bar,beta_bar,inner_iters,step_norm,residual";
inline const char* kCurveHeader = "method,lambda,n,t,E_mean,E_stderr,trials";

inline void write_trace_csv(std::ostream& os, const std::string& method, double lambda,
                            Eigen::Index n, std::size_t trial, const std::vector<IterTrace>& trace) {
  using detail::fmt;
  os << kTraceHeader << '\n';
  for (const auto& r : trace) {
    os << method << ',' << fmt(lambda) << ',' << n << ',' << trial << ',' << r.k << ','
       << fmt(r.wall_time) << ',' << fmt(r.F) << ',' << fmt(r.R) << ',' << fmt(r.H) << ','
       << fmt(r.gamma_bar) << ',' << fmt(r.beta_bar) << ',' << r.inner_iters << ','
       << fmt(r.step_norm) << ',' << fmt(r.residual) << '\n';
  }
}

/// Static SVG line chart of the averaged E(t) curves for one lambda.
inline void write_curve_svg(std::ostream& os, const std::vector<double>& grid,
                            const std::vector<const MethodCurve*>& curves, double lambda,
                            Eigen::Index n, bool log_y) {
  using detail::fmt;
  constexpr double W = 640, H = 420, left = 70, right = 150, top = 40, bottom = 50;
  const double pw = W - left - right;
  const double ph = H - top - bottom;
  const double t_max = grid.back() > 0 ? grid.back() : 1.0;
  constexpr double floor_log = -16.0;
  auto ymap = [&](double e) {
    double frac = e;
    if (log_y) {
      const double le = e > 0 ? std::max(std::log10(e), floor_log) : floor_log;
      frac = (le - floor_log) / -floor_log;
    }
    return top + ph * (1.0 - std::clamp(frac, 0.0, 1.0));
  };
  auto xmap = [&](double t) { return left + pw * t / t_max; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << "average E(t), lambda = " << fmt(lambda) << ", n = " << n << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double t = t_max * i / 4.0;
    os << "<text x=\"" << xmap(t) << "\" y=\"" << top + ph + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(t) << "</text>\n";
    const double e = log_y ? std::pow(10.0, floor_log * (1.0 - i / 4.0)) : i / 4.0;
    os << "<text x=\"" << left - 6 << "\" y=\"" << ymap(e) + 4
       << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(e) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10
     << "\" text-anchor=\"middle\" font-size=\"12\">time (s)</text>\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = colors[c % std::size(colors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      os << xmap(grid[i]) << ',' << ymap(curves[c]->stats.mean[i]) << ' ';
    }
    os << "\"/>\n";
    const double ly = top + 16 + 18.0 * static_cast<double>(c);
    os << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 34
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
       << curves[c]->method << "</text>\n";
  }
  os << "</svg>\n";
}

/**
 * Runs the full protocol and writes all outputs. A hard error in any method
 * aborts that trial (recorded in failures.csv); other trials continue.
 * Trials whose starting objective equals F_min are excluded from averages.
 */
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  if (cfg.write_traces) fs::create_directories(cfg.output_dir / "traces");

  ExperimentResult result;
  result.grid = uniform_grid(cfg.t_max, cfg.time_grid_points);

  StoppingRule stop;
  stop.max_time_s = cfg.t_max;
  if (cfg.max_iters > 0) stop.max_iters = cfg.max_iters;

  std::vector<MethodConfig> methods;
  for (const auto& label : cfg.methods) methods.push_back(make_method(label));

  for (double lambda : cfg.lambdas) {
    std::map<std::string, std::vector<std::vector<double>>> per_method;
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      ++result.trials_attempted;
      const Instance inst =
          generate_instance(cfg.n, cfg.rows(), cfg.sparsity(), cfg.noise_scale, cfg.seed, trial);
      const Vector x0 = Vector::Zero(cfg.n);

      std::vector<SolveResult> runs;
      bool failed = false;
      for (const auto& method : methods) {
        try {
          auto warn = [&](std::string_view msg) {
            if (log) *log << "warning: " << msg << '\n';
          };
          runs.push_back(run_method(method, inst, lambda, x0, stop, warn));
        } catch (const std::exception& ex) {
          result.failures.push_back({method.label, lambda, trial, ex.what()});
          failed = true;
          break;
        }
      }
      if (failed) {
        ++result.trials_failed;
        if (log) *log << "lambda " << lambda << " trial " << trial << ": aborted\n";
        continue;
      }

      if (cfg.write_traces) {
        for (std::size_t i = 0; i < methods.size(); ++i) {
          const fs::path path = cfg.output_dir / "traces" /
                                (methods[i].label + "_lambda" + detail::fmt(lambda) + "_trial" +
                                 std::to_string(trial) + ".csv");
          std::ofstream out(path);
          write_trace_csv(out, methods[i].label, lambda, cfg.n, trial, runs[i].traces);
          result.trace_files.push_back(path);
        }
      }

      std::vector<double> finals;
      for (const auto& r : runs) finals.push_back(r.F);
      const double F_min = f_min_of_trial(finals);

      std::vector<std::vector<double>> curves;
      bool degenerate = false;
      for (const auto& r : runs) {
        const auto series = relative_error_series(r.traces, F_min, r.traces.front().F);
        if (!series) {
          degenerate = true;
          break;
        }
        curves.push_back(evolution_curve(*series, result.grid));
      }
      if (degenerate) {
        ++result.trials_degenerate;
        if (log) *log << "lambda " << lambda << " trial " << trial << ": degenerate, excluded\n";
        continue;
      }
      for (std::size_t i = 0; i < methods.size(); ++i) {
        per_method[methods[i].label].push_back(std::move(curves[i]));
      }
      if (log) {
        *log << "lambda " << lambda << " trial " << trial << ": F_min = " << F_min;
        for (std::size_t i = 0; i < methods.size(); ++i) {
          *log << "  " << methods[i].label << " " << runs[i].F << " (" << runs[i].traces.size() - 1
               << " it)";
        }
        *log << '\n';
      }
    }
    for (const auto& method : methods) {
      auto it = per_method.find(method.label);
      if (it == per_method.end()) continue;
      MethodCurve curve;
      curve.method = method.label;
      curve.lambda = lambda;
      curve.stats = average_curves(it->second);
      curve.per_trial = std::move(it->second);
      result.curves.push_back(std::move(curve));
    }
  }

  {
    std::ofstream out(cfg.output_dir / "curves.csv");
    out << kCurveHeader << '\n';
    for (const auto& c : result.curves) {
      for (std::size_t i = 0; i < result.grid.size(); ++i) {
        out << c.method << ',' << detail::fmt(c.lambda) << ',' << cfg.n << ','
            << detail::fmt(result.grid[i]) << ',' << detail::fmt(c.stats.mean[i]) << ','
            << detail::fmt(c.stats.stderr_[i]) << ',' << c.stats.count << '\n';
      }
    }
  }
  {
    std::ofstream out(cfg.output_dir / "failures.csv");
    out << "method,lambda,n,trial,error\n";
    for (const auto& f : result.failures) {
      std::string msg = f.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out << f.method << ',' << detail::fmt(f.lambda) << ',' << cfg.n << ',' << f.trial << ','
          << msg << '\n';
    }
  }
  for (double lambda : cfg.lambdas) {
    std::vector<const MethodCurve*> subset;
    for (const auto& c : result.curves) {
      if (c.lambda == lambda) subset.push_back(&c);
    }
    if (subset.empty()) continue;
    std::ofstream out(cfg.output_dir /
                      ("plot_lambda" + detail::fmt(lambda) + "_n" + std::to_string(cfg.n) + ".svg"));
    write_curve_svg(out, result.grid, subset, lambda, cfg.n, cfg.log_y);
  }
  return result;
}

}  // namespace nexpga
