#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "crossmedia/common.hpp"

namespace crossmedia {

/// One propagation medium. Medium 1 is the sub-6 GHz RF band, medium 2 the
/// mmWave band; the index decides the small-scale LOS phase model.
struct Medium {
  int id = 1;                          // 1 or 2
  double carrier_freq_hz = 2.4e9;      // f_i
  double bandwidth_hz = 10e6;          // B_i
  double total_antenna_gain_db = 10.0; // G_i, lumped over one cascade hop pair
  double rician_factor_db = 5.0;       // K_i

  double wavelength_m() const { return kSpeedOfLight / carrier_freq_hz; }

  bool operator==(const Medium&) const = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Node placement in meters. Devices and APs are fixed, the RIS is the knob.
struct Geometry {
  Vec2 d1{-25.0, -25.0};
  Vec2 d2{25.0, -25.0};
  Vec2 ap1{-25.0, 25.0};
  Vec2 ap2{25.0, 25.0};
  Vec2 ris{0.0, 0.0};

  const Vec2& device(int i) const { return i == 0 ? d1 : d2; }
  const Vec2& ap(int i) const { return i == 0 ? ap1 : ap2; }

  bool operator==(const Geometry&) const = default;
};

/// Knobs of the iterative optimizers. Not physical parameters.
struct SolverOptions {
  int k_max = 100;           // time grid resolution, dt = 1/k_max
  int t_max = 100;           // outer iteration cap
  double ero_rel = 1e-4;     // relative objective-improvement stop threshold
  int inner_iters = 40;      // gradient steps per smoothing stage
  int smoothing_stages = 5;
  double smoothing_lambda0 = 8.0;
  double smoothing_growth = 40.0;
  double step0 = 0.5;        // base step of the diminishing c/sqrt(t) rule
  std::uint64_t seed = 1;

  bool operator==(const SolverOptions&) const = default;
};

struct SystemConfig {
  std::array<Medium, 2> media{
      Medium{1, 2.4e9, 10e6, 10.0, 5.0},
      Medium{2, 30e9, 100e6, 20.0, 10.0},
  };
  Geometry geometry;
  int num_ap_antennas = 4;         // M
  int num_ris_elements = 16;       // N
  double reference_distance_m = 1.0;
  double pathloss_exponent = 2.2;  // eta
  double rho_si = 0.5;             // residual self-interference coefficient
  double li_noise_ratio = 1.1;     // sigma_tilde^2 / sigma^2
  double noise_psd_dbm_hz = -174.0;
  double power_dbm = 23.0;         // device 1 transmit power; device 2 scales by B2/B1
  double ap_power_dbm = 23.0;      // AP 1 transmit power; AP 2 scales by B2/B1
  double rho_e = 0.0;              // channel estimation error coefficient
  double circuit_mw_d1 = 10.0;
  double circuit_mw_d2 = 100.0;
  double circuit_mw_ap1 = 200.0;
  double circuit_mw_ap2 = 2000.0;
  double circuit_mw_ris_element = 5.0;
  SolverOptions solver;

  void validate() const;

  bool operator==(const SystemConfig&) const = default;
};

/// Thrown on config parse or invariant failures; the CLI maps it to exit 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void SystemConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
  };
  for (int i = 0; i < 2; ++i) {
    const Medium& m = media[i];
    const std::string p = "media[" + std::to_string(i) + "].";
    if (m.id != i + 1) fail(p + "id", "must equal " + std::to_string(i + 1));
    if (!(m.carrier_freq_hz > 0)) fail(p + "carrier_freq_hz", "must be > 0");
    if (!(m.bandwidth_hz > 0)) fail(p + "bandwidth_hz", "must be > 0");
    if (!std::isfinite(m.rician_factor_db))
      fail(p + "rician_factor_db", "must be finite");
    if (!std::isfinite(m.total_antenna_gain_db))
      fail(p + "total_antenna_gain_db", "must be finite");
  }
  if (num_ap_antennas < 1) fail("num_ap_antennas", "must be >= 1");
  if (num_ris_elements < 1) fail("num_ris_elements", "must be >= 1");
  if (!(reference_distance_m > 0)) fail("reference_distance_m", "must be > 0");
  if (!(rho_si >= 0.0 && rho_si <= 1.0)) fail("rho_si", "must be in [0, 1]");
  if (!(li_noise_ratio >= 1.0)) fail("li_noise_ratio", "must be >= 1");
  if (!(rho_e >= 0.0)) fail("rho_e", "must be >= 0");
  if (!std::isfinite(power_dbm)) fail("power_dbm", "must be finite");
  if (!std::isfinite(ap_power_dbm)) fail("ap_power_dbm", "must be finite");
  if (circuit_mw_d1 < 0 || circuit_mw_d2 < 0 || circuit_mw_ap1 < 0 ||
      circuit_mw_ap2 < 0 || circuit_mw_ris_element < 0)
    fail("circuit_mw_*", "must be >= 0");
  if (solver.k_max < 2) fail("solver.k_max", "must be >= 2");
  if (solver.t_max < 1) fail("solver.t_max", "must be >= 1");
  if (!(solver.ero_rel > 0)) fail("solver.ero_rel", "must be > 0");
  if (solver.inner_iters < 1) fail("solver.inner_iters", "must be >= 1");
  if (solver.smoothing_stages < 1) fail("solver.smoothing_stages", "must be >= 1");
  if (!(solver.smoothing_lambda0 > 0)) fail("solver.smoothing_lambda0", "must be > 0");
  if (!(solver.smoothing_growth > 1.0)) fail("solver.smoothing_growth", "must be > 1");
  if (!(solver.step0 > 0)) fail("solver.step0", "must be > 0");
  // All node pair distances that feed a channel must be usable.
  const Geometry& g = geometry;
  const Vec2 nodes[] = {g.d1, g.d2, g.ap1, g.ap2};
  for (const Vec2& n : nodes) {
    if (!(distance(n, g.ris) > 0)) fail("geometry", "node coincides with the RIS");
  }
}

/// Transmit powers and uplink noise floors implied by the config. The device
/// (and AP) of medium 2 transmits B2/B1 times more power so both media see
/// the same transmit SNR, and sigma_i^2 = B_i * N0.
struct LinkPowers {
  std::array<double, 2> device_tx_w;
  std::array<double, 2> ap_tx_w;
  std::array<double, 2> uplink_noise_w;  // sigma_i^2
};

inline LinkPowers derived_powers(const SystemConfig& cfg) {
  LinkPowers out{};
  const double p1 = dbm_to_watt(cfg.power_dbm);
  const double p_ap1 = dbm_to_watt(cfg.ap_power_dbm);
  const double n0_w_per_hz = dbm_to_watt(cfg.noise_psd_dbm_hz);
  const double b1 = cfg.media[0].bandwidth_hz;
  for (int i = 0; i < 2; ++i) {
    const double ratio = cfg.media[i].bandwidth_hz / b1;
    out.device_tx_w[i] = p1 * ratio;
    out.ap_tx_w[i] = p_ap1 * ratio;
    out.uplink_noise_w[i] = cfg.media[i].bandwidth_hz * n0_w_per_hz;
  }
  return out;
}

}  // namespace crossmedia
