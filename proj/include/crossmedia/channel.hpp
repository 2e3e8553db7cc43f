#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "crossmedia/common.hpp"
#include "crossmedia/config.hpp"
#include "crossmedia/rng.hpp"

namespace crossmedia {

/// One realization of every channel in the scenario, per device/medium.
/// Noise variances live here (not in the config) because the estimation
/// error model inflates them per realization.
struct ChannelSet {
  struct PerDevice {
    VectorXcd device_to_ris;     // N, carries the lumped antenna gain G_i
    MatrixXcd ris_to_ap;         // M x N, pathloss only
    RowVectorXcd ris_to_device;  // 1 x N, pathloss only
    RowVectorXcd ap_to_ris;      // 1 x N, pathloss only (AP-based benchmark)
    cxd loop{0.0, 0.0};          // transmit->receive loop channel, unit large-scale
    double uplink_noise_w = 0.0;    // sigma_i^2
    double downlink_noise_w = 0.0;  // sigma_tilde_i^2
  };
  std::array<PerDevice, 2> dev;

  int num_elements() const { return static_cast<int>(dev[0].device_to_ris.size()); }
  int num_antennas() const { return static_cast<int>(dev[0].ris_to_ap.rows()); }
};

/// Distance-only part of the log-normal pathloss model, in dB (gain <= 0).
inline double pathloss_db(double dist_m, const Medium& medium,
                          const SystemConfig& cfg) {
  const double d0 = cfg.reference_distance_m;
  if (dist_m < d0) {
    throw std::domain_error("pathloss distance " + std::to_string(dist_m) +
                            " m below reference distance");
  }
  const double lambda = medium.wavelength_m();
  return -20.0 * std::log10(4.0 * std::numbers::pi * d0 / lambda) -
         10.0 * cfg.pathloss_exponent * std::log10(dist_m / d0);
}

/// Large-scale link gain in dB including the lumped antenna gain G_i.
/// The gain is applied to the device/AP -> RIS hop of each cascade only,
/// so every two-hop cascade counts G_i exactly once.
inline double large_scale_gain_db(double dist_m, const Medium& medium,
                                  const SystemConfig& cfg) {
  return pathloss_db(dist_m, medium, cfg) + medium.total_antenna_gain_db;
}

/// Rician small-scale coefficient. Medium 1 draws a random LOS phase
/// theta ~ N(0,1); medium 2 uses the deterministic phase 2*pi*d/lambda.
/// The NLOS term is a real Exponential(1) amplitude.
inline cxd small_scale_sample(const Medium& medium, double dist_m, Rng& rng) {
  const double k = db_to_linear(medium.rician_factor_db);
  const double los_amp = std::sqrt(k / (k + 1.0));
  const double nlos_amp = std::sqrt(1.0 / (k + 1.0));
  double theta;
  if (medium.id == 2) {
    theta = 2.0 * std::numbers::pi * dist_m / medium.wavelength_m();
  } else {
    theta = rng.normal();
  }
  const cxd los{los_amp * std::cos(theta), los_amp * std::sin(theta)};
  return los + cxd{nlos_amp * rng.exponential(), 0.0};
}

namespace detail {

inline cxd channel_coeff(double gain_db, const Medium& medium, double dist_m,
                         Rng& rng) {
  return std::sqrt(db_to_linear(gain_db)) * small_scale_sample(medium, dist_m, rng);
}

}  // namespace detail

/// Draws a full channel realization. Draw order is fixed (device 1 then 2;
/// within a device: device->RIS, RIS->AP column by column, RIS->device,
/// AP->RIS, loop) so a seed pins the whole set.
inline ChannelSet draw_channel_set(const SystemConfig& cfg, Rng& rng) {
  const int n = cfg.num_ris_elements;
  const int m = cfg.num_ap_antennas;
  const LinkPowers powers = derived_powers(cfg);
  ChannelSet out;
  for (int i = 0; i < 2; ++i) {
    const Medium& medium = cfg.media[i];
    ChannelSet::PerDevice& d = out.dev[i];
    const double dist_dev = distance(cfg.geometry.device(i), cfg.geometry.ris);
    const double dist_ap = distance(cfg.geometry.ap(i), cfg.geometry.ris);
    const double gain_dev_db = large_scale_gain_db(dist_dev, medium, cfg);
    const double loss_ap_db = pathloss_db(dist_ap, medium, cfg);
    const double loss_dev_db = pathloss_db(dist_dev, medium, cfg);

    d.device_to_ris.resize(n);
    for (int e = 0; e < n; ++e)
      d.device_to_ris(e) = detail::channel_coeff(gain_dev_db, medium, dist_dev, rng);

    d.ris_to_ap.resize(m, n);
    for (int e = 0; e < n; ++e)
      for (int a = 0; a < m; ++a)
        d.ris_to_ap(a, e) = detail::channel_coeff(loss_ap_db, medium, dist_ap, rng);

    d.ris_to_device.resize(n);
    for (int e = 0; e < n; ++e)
      d.ris_to_device(e) = detail::channel_coeff(loss_dev_db, medium, dist_dev, rng);

    d.ap_to_ris.resize(n);
    for (int e = 0; e < n; ++e)
      d.ap_to_ris(e) = detail::channel_coeff(loss_ap_db, medium, dist_ap, rng);

    d.loop = small_scale_sample(medium, 0.0, rng);

    d.uplink_noise_w = powers.uplink_noise_w[i];
    d.downlink_noise_w = cfg.li_noise_ratio * powers.uplink_noise_w[i];
  }
  return out;
}

/// Large-scale gain (linear) of the two-hop cascade feeding each link; this
/// is the variance scale of the estimation error term.
inline double cascade_gain_linear(const SystemConfig& cfg, int device, bool uplink) {
  const Medium& medium = cfg.media[device];
  const double dist_dev = distance(cfg.geometry.device(device), cfg.geometry.ris);
  const double first = large_scale_gain_db(dist_dev, medium, cfg);
  const double second =
      uplink ? pathloss_db(distance(cfg.geometry.ap(device), cfg.geometry.ris),
                           medium, cfg)
             : pathloss_db(dist_dev, medium, cfg);
  return db_to_linear(first + second);
}

/// Models maximum-likelihood channel estimation error of coefficient rho_e.
/// The drawn channels play the role of the estimates consumed by the
/// optimizer; the residual error shows up as inflated receiver noise:
///   uplink    sigma^2      -> (1 + rho_e^2 P_i a_U / sigma^2) sigma^2
///   downlink  sigma_t^2    -> (1 + rho_e^2 P_i a_D (1 + rho_si) / sigma^2) sigma_t^2
/// with a_* the cascade large-scale gain of the corresponding link.
inline ChannelSet apply_estimation_error(ChannelSet channels, double rho_e,
                                         const SystemConfig& cfg) {
  if (rho_e < 0.0) throw std::domain_error("rho_e must be >= 0");
  if (rho_e == 0.0) return channels;
  const LinkPowers powers = derived_powers(cfg);
  for (int i = 0; i < 2; ++i) {
    ChannelSet::PerDevice& d = channels.dev[i];
    const double p = powers.device_tx_w[i];
    const double sigma2 = powers.uplink_noise_w[i];
    const double a_up = cascade_gain_linear(cfg, i, /*uplink=*/true);
    const double a_down = cascade_gain_linear(cfg, i, /*uplink=*/false);
    d.uplink_noise_w *= 1.0 + rho_e * rho_e * p * a_up / sigma2;
    d.downlink_noise_w *=
        1.0 + rho_e * rho_e * p * a_down * (1.0 + cfg.rho_si) / sigma2;
  }
  return channels;
}

}  // namespace crossmedia
