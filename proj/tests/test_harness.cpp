#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crossmedia/config_io.hpp"
#include "crossmedia/experiment.hpp"
#include "test_support.hpp"

using namespace crossmedia;
using test_support::close_abs;
using test_support::close_rel;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("crossmedia_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

Experiment tiny_experiment() {
  Experiment exp;
  exp.values = {23.0};
  exp.trials = 1;
  exp.schemes = {Scheme::p1};
  return exp;
}

}  // namespace

TEST_CASE("empty config gives the documented defaults") {
  const LoadedConfig lc = parse_config("");
  const SystemConfig& c = lc.system;
  REQUIRE(c.media[0].carrier_freq_hz == 2.4e9);
  REQUIRE(c.media[1].carrier_freq_hz == 30e9);
  REQUIRE(c.media[0].bandwidth_hz == 10e6);
  REQUIRE(c.media[1].bandwidth_hz == 100e6);
  REQUIRE(c.media[0].total_antenna_gain_db == 10.0);
  REQUIRE(c.media[1].total_antenna_gain_db == 20.0);
  REQUIRE(c.media[0].rician_factor_db == 5.0);
  REQUIRE(c.media[1].rician_factor_db == 10.0);
  REQUIRE(c.num_ap_antennas == 4);
  REQUIRE(c.num_ris_elements == 16);
  REQUIRE(c.reference_distance_m == 1.0);
  REQUIRE(c.pathloss_exponent == 2.2);
  REQUIRE(c.rho_si == 0.5);
  REQUIRE(c.noise_psd_dbm_hz == -174.0);
  REQUIRE(c.li_noise_ratio == 1.1);
  REQUIRE(c.power_dbm == 23.0);
  REQUIRE(lc.experiment.values == std::vector<double>{23.0});
}

TEST_CASE("invariant violations name the offending field") {
  try {
    parse_config(R"({"system": {"num_ris_elements": 0}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(std::string(e.what()).find("num_ris_elements") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected with their path") {
  try {
    parse_config(R"({"system": {"bandwidht_hz": 1}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(std::string(e.what()).find("bandwidht_hz") != std::string::npos);
  }
}

TEST_CASE("malformed JSON is a config error") {
  REQUIRE_THROWS_AS(parse_config("{"), ConfigError);
}

TEST_CASE("geometry and ratio invariants are enforced") {
  SystemConfig cfg;
  cfg.geometry.ris = cfg.geometry.d1;  // node on top of the RIS
  REQUIRE_THROWS_AS(cfg.validate(), ConfigError);

  SystemConfig cfg2;
  cfg2.li_noise_ratio = 0.9;
  REQUIRE_THROWS_AS(cfg2.validate(), ConfigError);

  // A node inside the reference distance surfaces as a domain error when
  // channels are drawn.
  SystemConfig cfg3;
  cfg3.geometry.ris = {cfg3.geometry.d1.x + 0.5, cfg3.geometry.d1.y};
  Rng rng(1);
  REQUIRE_THROWS_AS(draw_channel_set(cfg3, rng), std::domain_error);
}

TEST_CASE("config save/load round-trip") {
  SystemConfig cfg;
  cfg.geometry.ris = {3.5, -7.25};
  cfg.num_ris_elements = 24;
  cfg.rho_e = 0.05;
  cfg.solver.k_max = 50;
  cfg.solver.seed = 12345;
  Experiment exp;
  exp.name = "roundtrip";
  exp.axis = SweepAxis::x_ris;
  exp.values = {-20.0, 0.0, 20.0};
  exp.trials = 7;
  exp.schemes = {Scheme::p2, Scheme::rand_phi};
  exp.out_dir = "elsewhere";

  const LoadedConfig lc = parse_config(save_config(cfg, exp));
  REQUIRE(lc.system == cfg);
  REQUIRE(lc.experiment == exp);
}

TEST_CASE("axis application") {
  SystemConfig cfg;
  const SystemConfig p = apply_axis(cfg, SweepAxis::power_dbm, 30.0);
  REQUIRE(p.power_dbm == 30.0);
  REQUIRE(p.ap_power_dbm == 30.0);
  const SystemConfig x = apply_axis(cfg, SweepAxis::x_ris, -12.5);
  REQUIRE(x.geometry.ris.x == -12.5);
  const SystemConfig n = apply_axis(cfg, SweepAxis::num_elements, 8.0);
  REQUIRE(n.num_ris_elements == 8);
  REQUIRE_THROWS_AS(apply_axis(cfg, SweepAxis::num_elements, 8.5), ConfigError);
}

TEST_CASE("scheme and axis names round-trip") {
  for (Scheme s : {Scheme::p1, Scheme::p2, Scheme::equal_t, Scheme::rand_phi,
                   Scheme::two_bit_phi, Scheme::ap_based}) {
    REQUIRE(scheme_from_name(scheme_name(s)) == s);
  }
  for (SweepAxis a : {SweepAxis::power_dbm, SweepAxis::x_ris, SweepAxis::y_ris,
                      SweepAxis::rho_e, SweepAxis::rho_si, SweepAxis::num_elements}) {
    REQUIRE(axis_from_name(axis_name(a)) == a);
  }
  REQUIRE_THROWS_AS(scheme_from_name("NotAScheme"), ConfigError);
}

TEST_CASE("single point, single trial, single scheme gives one row") {
  SystemConfig cfg = test_support::small_config(2, 1);
  cfg.solver.t_max = 5;
  const ExperimentResults res = run_experiment(cfg, tiny_experiment());
  REQUIRE(res.rows.size() == 1);
  REQUIRE_FALSE(res.rows[0].failed);
  REQUIRE(res.failures.empty());
}

TEST_CASE("identical master seeds give byte-identical results.csv") {
  SystemConfig cfg = test_support::small_config(3, 2);
  cfg.solver.t_max = 8;
  cfg.solver.seed = 20250810;
  Experiment exp;
  exp.values = {15.0, 23.0};
  exp.trials = 2;
  exp.schemes = {Scheme::p1, Scheme::rand_phi};

  const auto dir_a = temp_dir("det_a");
  const auto dir_b = temp_dir("det_b");
  write_results(run_experiment(cfg, exp, 2), dir_a.string());
  write_results(run_experiment(cfg, exp, 1), dir_b.string());  // worker count must not matter
  REQUIRE(read_file(dir_a / "results.csv") == read_file(dir_b / "results.csv"));
  REQUIRE(read_file(dir_a / "summary.csv") == read_file(dir_b / "summary.csv"));
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("row cardinality and summary statistics") {
  SystemConfig cfg = test_support::small_config(2, 1);
  cfg.solver.t_max = 5;
  Experiment exp;
  exp.values = {20.0, 23.0, 26.0};
  exp.trials = 2;
  exp.schemes = {Scheme::rand_phi, Scheme::equal_t};
  const auto dir = temp_dir("rows");
  const ExperimentResults res = run_experiment(cfg, exp);
  write_results(res, dir.string());

  REQUIRE(res.rows.size() == 12);
  const std::string csv = read_file(dir / "results.csv");
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 13);  // header + 12 rows

  // Recompute one summary mean from the rows.
  double sum = 0.0;
  int n = 0;
  for (const ResultRow& r : res.rows) {
    if (r.scheme == Scheme::equal_t && r.axis_val == 23.0) {
      sum += r.f_bits;
      ++n;
    }
  }
  REQUIRE(n == 2);
  const std::string summary = read_file(dir / "summary.csv");
  std::ostringstream expect;
  expect << "EqualT,23," << n << ',' << detail::format_double(sum / n);
  REQUIRE(summary.find(expect.str()) != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("trace files exist and are nondecreasing") {
  SystemConfig cfg = test_support::small_config(3, 2);
  cfg.solver.t_max = 12;
  Experiment exp;
  exp.values = {23.0};
  exp.trials = 1;
  exp.schemes = {Scheme::p2};
  const auto dir = temp_dir("trace");
  write_results(run_experiment(cfg, exp), dir.string());
  const std::string trace = read_file(dir / "trace_P2_23.csv");
  std::istringstream lines(trace);
  std::string line;
  std::getline(lines, line);
  REQUIRE(line == "iter,F_bits");
  double prev = -1.0;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto comma = line.find(',');
    const double f = std::stod(line.substr(comma + 1));
    REQUIRE(f >= prev - 1e-9 * std::max(1.0, std::abs(f)));
    prev = f;
    ++count;
  }
  REQUIRE(count >= 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("a failing axis point is recorded without aborting the sweep") {
  SystemConfig cfg = test_support::small_config(2, 1);
  cfg.solver.t_max = 5;
  cfg.geometry.ris.y = cfg.geometry.d1.y;  // sweep along the device row
  Experiment exp;
  exp.axis = SweepAxis::x_ris;
  exp.values = {cfg.geometry.d1.x, 0.0};  // first point sits on device 1
  exp.trials = 2;
  exp.schemes = {Scheme::rand_phi};
  const auto dir = temp_dir("fail");
  const ExperimentResults res = run_experiment(cfg, exp);
  REQUIRE(res.failures.size() == 2);
  REQUIRE(res.rows.size() == 4);
  write_results(res, dir.string());
  const std::string csv = read_file(dir / "results.csv");
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 good rows
  std::filesystem::remove_all(dir);
}

TEST_CASE("mean throughput grows with transmit power") {
  SystemConfig cfg = test_support::small_config(4, 2);
  cfg.solver.t_max = 15;
  Experiment exp;
  exp.values = {10.0, 25.0, 40.0};
  exp.trials = 6;
  exp.schemes = {Scheme::p1};
  const ExperimentResults res = run_experiment(cfg, exp);
  double mean[3] = {0, 0, 0};
  for (const ResultRow& r : res.rows) mean[r.axis_index] += r.f_bits / exp.trials;
  REQUIRE(mean[0] < mean[1]);
  REQUIRE(mean[1] < mean[2]);
}
