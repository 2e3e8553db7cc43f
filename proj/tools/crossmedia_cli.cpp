// Command-line front end: Monte Carlo runs, parameter sweeps and
// convergence traces over the RIS-aided cross-media link simulator.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "crossmedia/config_io.hpp"
#include "crossmedia/experiment.hpp"

namespace {

using namespace crossmedia;

struct CommonOpts {
  std::string config_path;
  int trials = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file; omit for defaults");
  cmd->add_option("--trials", o.trials, "trials per axis point")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "master RNG seed")
      ->each([&](const std::string&) { o.seed_set = true; });
  cmd->add_option("--out", o.out, "output directory");
}

LoadedConfig load(const CommonOpts& o) {
  LoadedConfig lc =
      o.config_path.empty() ? parse_config("") : load_config(o.config_path);
  if (o.trials > 0) lc.experiment.trials = o.trials;
  if (o.seed_set) lc.system.solver.seed = o.seed;
  if (!o.out.empty()) lc.experiment.out_dir = o.out;
  return lc;
}

int execute(const LoadedConfig& lc) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentResults results = run_experiment(lc.system, lc.experiment);
  write_results(results, lc.experiment.out_dir);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const std::size_t ok = results.rows.size() - results.failures.size();
  std::cout << "wrote " << ok << " rows to " << lc.experiment.out_dir << "/ in "
            << secs << " s\n";
  for (const std::string& f : results.failures)
    std::cerr << "trial failed: " << f << "\n";
  if (ok == 0 && !results.rows.empty()) {
    std::cerr << "all trials failed\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided cross-media information exchange simulator"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  CLI::App* run = app.add_subcommand("run", "run the experiment from the config");
  add_common(run, run_opts);

  CommonOpts sweep_opts;
  std::string sweep_axis;
  double sweep_from = 0.0, sweep_to = 0.0;
  int sweep_steps = 0;
  CLI::App* sweep = app.add_subcommand("sweep", "sweep one parameter axis");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", sweep_axis,
                    "axis: power_dbm, x_ris, y_ris, rho_e, rho_si or N")
      ->required();
  sweep->add_option("--from", sweep_from, "first axis value")->required();
  sweep->add_option("--to", sweep_to, "last axis value")->required();
  sweep->add_option("--steps", sweep_steps, "number of axis points")
      ->required()
      ->check(CLI::PositiveNumber);

  CommonOpts trace_opts;
  std::string trace_scheme;
  CLI::App* trace =
      app.add_subcommand("trace", "record one convergence trace F(t)");
  add_common(trace, trace_opts);
  trace->add_option("--scheme", trace_scheme,
                    "scheme: P1, P2, EqualT, RandPhi, 2bitPhi or APBased")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return execute(load(run_opts));

    if (sweep->parsed()) {
      LoadedConfig lc = load(sweep_opts);
      lc.experiment.axis = axis_from_name(sweep_axis);
      if (sweep_to < sweep_from)
        throw ConfigError("sweep requires --from <= --to");
      lc.experiment.values.clear();
      for (int i = 0; i < sweep_steps; ++i) {
        const double v =
            sweep_steps == 1
                ? sweep_from
                : sweep_from + i * (sweep_to - sweep_from) / (sweep_steps - 1);
        lc.experiment.values.push_back(v);
      }
      return execute(lc);
    }

    if (trace->parsed()) {
      LoadedConfig lc = load(trace_opts);
      lc.experiment.trials = 1;
      lc.experiment.schemes = {scheme_from_name(trace_scheme)};
      const ExperimentResults results = run_experiment(lc.system, lc.experiment);
      write_results(results, lc.experiment.out_dir);
      for (const TraceRecord& tr : results.traces) {
        for (std::size_t t = 0; t < tr.trace.size(); ++t)
          std::cout << (t + 1) << ',' << tr.trace[t] << "\n";
      }
      for (const std::string& f : results.failures)
        std::cerr << "trial failed: " << f << "\n";
      return results.failures.empty() ? 0 : 2;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
