#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "crossmedia/baselines.hpp"
#include "crossmedia/channel.hpp"
#include "crossmedia/config.hpp"
#include "crossmedia/rng.hpp"

namespace crossmedia {

enum class SweepAxis { power_dbm, x_ris, y_ris, rho_e, rho_si, num_elements };

inline std::string_view axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::power_dbm: return "power_dbm";
    case SweepAxis::x_ris: return "x_ris";
    case SweepAxis::y_ris: return "y_ris";
    case SweepAxis::rho_e: return "rho_e";
    case SweepAxis::rho_si: return "rho_si";
    case SweepAxis::num_elements: return "N";
  }
  return "?";
}

inline SweepAxis axis_from_name(std::string_view name) {
  for (SweepAxis a : {SweepAxis::power_dbm, SweepAxis::x_ris, SweepAxis::y_ris,
                      SweepAxis::rho_e, SweepAxis::rho_si, SweepAxis::num_elements}) {
    if (axis_name(a) == name) return a;
  }
  throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
}

inline double axis_value(const SystemConfig& cfg, SweepAxis a) {
  switch (a) {
    case SweepAxis::power_dbm: return cfg.power_dbm;
    case SweepAxis::x_ris: return cfg.geometry.ris.x;
    case SweepAxis::y_ris: return cfg.geometry.ris.y;
    case SweepAxis::rho_e: return cfg.rho_e;
    case SweepAxis::rho_si: return cfg.rho_si;
    case SweepAxis::num_elements: return cfg.num_ris_elements;
  }
  return 0.0;
}

/// Returns the config with one swept parameter replaced. Sweeping the
/// transmit power moves the AP power along with it (the benchmark is defined
/// with P_AP = P).
inline SystemConfig apply_axis(SystemConfig cfg, SweepAxis a, double value) {
  switch (a) {
    case SweepAxis::power_dbm:
      cfg.power_dbm = value;
      cfg.ap_power_dbm = value;
      break;
    case SweepAxis::x_ris: cfg.geometry.ris.x = value; break;
    case SweepAxis::y_ris: cfg.geometry.ris.y = value; break;
    case SweepAxis::rho_e: cfg.rho_e = value; break;
    case SweepAxis::rho_si: cfg.rho_si = value; break;
    case SweepAxis::num_elements: {
      const double rounded = std::round(value);
      if (rounded != value)
        throw ConfigError("axis N requires integer values");
      cfg.num_ris_elements = static_cast<int>(rounded);
      break;
    }
  }
  cfg.validate();
  return cfg;
}

/// A Monte Carlo sweep: one axis, a list of points, trials per point.
struct Experiment {
  std::string name = "default";
  SweepAxis axis = SweepAxis::power_dbm;
  std::vector<double> values;
  int trials = 100;
  std::vector<Scheme> schemes{Scheme::p1, Scheme::p2};
  std::string out_dir = "out";

  bool operator==(const Experiment&) const = default;

  void validate() const {
    if (trials < 1) throw ConfigError("experiment field 'trials': must be >= 1");
    if (values.empty()) throw ConfigError("experiment field 'values': must be nonempty");
    for (double v : values)
      if (!std::isfinite(v)) throw ConfigError("experiment field 'values': must be finite");
    if (!std::is_sorted(values.begin(), values.end()))
      throw ConfigError("experiment field 'values': must be sorted ascending");
    if (schemes.empty())
      throw ConfigError("experiment field 'schemes': must be nonempty");
  }
};

/// One (scheme, axis value, trial) outcome.
struct ResultRow {
  Scheme scheme = Scheme::p1;
  int axis_index = 0;
  double axis_val = 0.0;
  int trial = 0;
  double f_bits = 0.0;
  double ee_bits_per_joule = 0.0;
  double t1 = 0.0;
  LinkValues caps{};
  LinkValues rates{};
  int iterations = 0;
  double wall_ms = 0.0;  // measured; excluded from the deterministic CSV
  bool failed = false;
  std::string error;
};

struct TraceRecord {
  Scheme scheme = Scheme::p1;
  double axis_val = 0.0;
  std::vector<double> trace;
};

struct ExperimentResults {
  std::vector<ResultRow> rows;      // failures included, flagged
  std::vector<TraceRecord> traces;  // trial 0 of each (scheme, axis point)
  std::vector<std::string> failures;
};

/// Runs the sweep on a worker pool. Per-trial seeds derive from
/// (master seed, axis index, trial index), rows land in preassigned slots
/// and all draws go through explicitly coded samplers, so the output is
/// identical for any worker count.
inline ExperimentResults run_experiment(const SystemConfig& cfg,
                                        const Experiment& exp,
                                        int num_threads = 0) {
  cfg.validate();
  exp.validate();
  const std::uint64_t master = cfg.solver.seed;
  const int n_schemes = static_cast<int>(exp.schemes.size());
  const int n_tasks = static_cast<int>(exp.values.size()) * exp.trials;

  ExperimentResults results;
  results.rows.resize(static_cast<std::size_t>(n_tasks) * n_schemes);
  results.traces.resize(exp.values.size() * n_schemes);

  const auto run_task = [&](int task) {
    const int axis_i = task / exp.trials;
    const int trial = task % exp.trials;
    const double value = exp.values[axis_i];
    const std::size_t row0 = static_cast<std::size_t>(task) * n_schemes;

    SystemConfig point_cfg;
    std::optional<ChannelSet> channels;
    std::string draw_error;
    try {
      point_cfg = apply_axis(cfg, exp.axis, value);
      Rng rng(derive_seed(master, axis_i, trial, 0));
      channels = draw_channel_set(point_cfg, rng);
      *channels = apply_estimation_error(*channels, point_cfg.rho_e, point_cfg);
    } catch (const std::exception& e) {
      draw_error = e.what();
    }

    std::optional<Solution> p2_solution;
    for (int s = 0; s < n_schemes; ++s) {
      ResultRow& row = results.rows[row0 + s];
      row.scheme = exp.schemes[s];
      row.axis_index = axis_i;
      row.axis_val = value;
      row.trial = trial;
      if (!channels) {
        row.failed = true;
        row.error = draw_error;
        continue;
      }
      try {
        Rng scheme_rng(derive_seed(master, axis_i, trial, 1 + s));
        const auto start = std::chrono::steady_clock::now();
        SchemeResult res;
        if (row.scheme == Scheme::two_bit_phi && p2_solution) {
          res = two_bit_from(point_cfg, *channels, *p2_solution);
        } else {
          res = run_scheme(row.scheme, point_cfg, *channels, scheme_rng);
        }
        if (row.scheme == Scheme::p2) p2_solution = res.solution;
        const auto stop = std::chrono::steady_clock::now();
        row.wall_ms =
            std::chrono::duration<double, std::milli>(stop - start).count();
        row.f_bits = res.objective_bits;
        row.ee_bits_per_joule = res.ee_bits_per_joule;
        row.t1 = res.solution.alloc.t1;
        row.caps = res.solution.capacities;
        row.rates = res.solution.rates;
        row.iterations = res.solution.iterations;
        if (trial == 0) {
          results.traces[static_cast<std::size_t>(axis_i) * n_schemes + s] =
              TraceRecord{row.scheme, value, res.solution.trace};
        }
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
      }
    }
  };

  int workers = num_threads > 0
                    ? num_threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, n_tasks));
  if (workers == 1) {
    for (int t = 0; t < n_tasks; ++t) run_task(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < n_tasks; t = next.fetch_add(1))
          run_task(t);
      });
    }
    for (std::thread& th : pool) th.join();
  }

  for (const ResultRow& row : results.rows) {
    if (row.failed) {
      results.failures.push_back(std::string(scheme_name(row.scheme)) + " axis=" +
                                 std::to_string(row.axis_val) + " trial=" +
                                 std::to_string(row.trial) + ": " + row.error);
    }
  }
  return results;
}

namespace detail {

/// Shortest round-trip decimal form; deterministic across runs.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.axis_index != b.axis_index) return a.axis_index < b.axis_index;
    if (a.trial != b.trial) return a.trial < b.trial;
    return scheme_name(a.scheme) < scheme_name(b.scheme);
  });
}

}  // namespace detail

inline constexpr std::string_view kResultsHeader =
    "scheme,axis,trial,F_bits,EE_bits_per_J,T1,C1U,C2U,C1D,C2D,R1U,R2U,R1D,R2D,"
    "iters,ms";

/// Writes results.csv, summary.csv and one trace_<scheme>_<point>.csv per
/// (scheme, axis point). Every byte is a deterministic function of
/// (master seed, config): the ms column is therefore written as 0; measured
/// wall times stay on the ResultRow for diagnostics.
inline void write_results(const ExperimentResults& results, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::vector<ResultRow> rows;
  rows.reserve(results.rows.size());
  for (const ResultRow& r : results.rows)
    if (!r.failed) rows.push_back(r);
  detail::sort_rows(rows);

  {
    std::ofstream out(fs::path(dir) / "results.csv");
    if (!out) throw std::runtime_error("cannot write results.csv in " + dir);
    out << kResultsHeader << "\n";
    for (const ResultRow& r : rows) {
      out << scheme_name(r.scheme) << ',' << detail::format_double(r.axis_val)
          << ',' << r.trial << ',' << detail::format_double(r.f_bits) << ','
          << detail::format_double(r.ee_bits_per_joule) << ','
          << detail::format_double(r.t1);
      for (double c : r.caps) out << ',' << detail::format_double(c);
      for (double x : r.rates) out << ',' << detail::format_double(x);
      out << ',' << r.iterations << ",0\n";
    }
  }

  {
    std::ofstream out(fs::path(dir) / "summary.csv");
    if (!out) throw std::runtime_error("cannot write summary.csv in " + dir);
    out << "scheme,axis,n,F_mean,F_std,EE_mean,EE_std\n";
    // One line per (axis point, scheme), in first-appearance order of the
    // sorted rows: axis point major, scheme name minor.
    std::vector<std::pair<int, Scheme>> groups;
    for (const ResultRow& r : rows) {
      bool seen = false;
      for (const auto& g : groups)
        seen = seen || (g.first == r.axis_index && g.second == r.scheme);
      if (!seen) groups.emplace_back(r.axis_index, r.scheme);
    }
    for (const auto& [axis_i, scheme] : groups) {
      double fsum = 0, f2sum = 0, esum = 0, e2sum = 0, axis_val = 0;
      int n = 0;
      for (const ResultRow& r : rows) {
        if (r.axis_index != axis_i || r.scheme != scheme) continue;
        fsum += r.f_bits;
        f2sum += r.f_bits * r.f_bits;
        esum += r.ee_bits_per_joule;
        e2sum += r.ee_bits_per_joule * r.ee_bits_per_joule;
        axis_val = r.axis_val;
        ++n;
      }
      const auto stddev = [n](double sum, double sq) {
        if (n < 2) return 0.0;
        const double mean = sum / n;
        return std::sqrt(std::max(0.0, (sq - n * mean * mean) / (n - 1)));
      };
      out << scheme_name(scheme) << ',' << detail::format_double(axis_val) << ','
          << n << ',' << detail::format_double(fsum / n) << ','
          << detail::format_double(stddev(fsum, f2sum)) << ','
          << detail::format_double(esum / n) << ','
          << detail::format_double(stddev(esum, e2sum)) << "\n";
    }
  }

  for (const TraceRecord& tr : results.traces) {
    if (tr.trace.empty()) continue;
    const std::string name = "trace_" + std::string(scheme_name(tr.scheme)) + "_" +
                             detail::format_double(tr.axis_val) + ".csv";
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw std::runtime_error("cannot write " + name + " in " + dir);
    out << "iter,F_bits\n";
    for (std::size_t i = 0; i < tr.trace.size(); ++i)
      out << (i + 1) << ',' << detail::format_double(tr.trace[i]) << "\n";
  }
}

}  // namespace crossmedia
