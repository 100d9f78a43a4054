// bench: runs the l1-2 least squares method comparison and writes E(t) curves.
//
//   bench run [--config FILE] [--n N] [--lambda L1,L2] [--trials T] [--t-max S]
//             [--methods A,B] [--seed S] [--out DIR] [--quiet]
//
// Exit codes: 0 success, 1 configuration error, 2 every trial hit a solver error.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nexpga/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nexPGA benchmark harness"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "run the experiment protocol");

  std::optional<std::string> config_path;
  std::optional<long long> n;
  std::optional<std::string> lambdas;
  std::optional<std::size_t> trials;
  std::optional<double> t_max;
  std::optional<std::string> methods;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool quiet = false;

  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--n", n, "problem dimension");
  run->add_option("--lambda", lambdas, "comma-separated regularization weights");
  run->add_option("--trials", trials, "independent trials per lambda");
  run->add_option("--t-max", t_max, "time budget per method (s)");
  run->add_option("--methods", methods, "comma-separated method labels");
  run->add_option("--seed", seed, "base seed");
  run->add_option("--out", out, "output directory");
  run->add_flag("--quiet", quiet, "suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  nexpga::ExperimentConfig cfg;
  try {
    if (config_path) cfg = nexpga::load_config(*config_path);
    if (n) nexpga::apply_config_entry(cfg, "n", std::to_string(*n));
    if (lambdas) nexpga::apply_config_entry(cfg, "lambda", *lambdas);
    if (trials) cfg.trials = *trials;
    if (t_max) cfg.t_max = *t_max;
    if (methods) nexpga::apply_config_entry(cfg, "methods", *methods);
    if (seed) cfg.seed = *seed;
    if (out) cfg.output_dir = *out;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }

  try {
    const auto result = nexpga::run_experiment(cfg, quiet ? nullptr : &std::clog);
    std::cout << "wrote " << result.curves.size() << " curves to " << cfg.output_dir.string()
              << " (" << result.trials_attempted << " trials, " << result.trials_failed
              << " failed, " << result.trials_degenerate << " degenerate)\n";
    if (result.trials_failed == result.trials_attempted) return 2;
  } catch (const nexpga::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
