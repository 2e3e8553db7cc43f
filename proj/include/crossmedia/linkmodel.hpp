#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "crossmedia/channel.hpp"
#include "crossmedia/common.hpp"
#include "crossmedia/config.hpp"

namespace crossmedia {

/// Index order used for every per-link 4-tuple in the project:
/// capacities, rates, quadratic forms, CSV columns.
enum LinkId : int {
  kUplinkD1 = 0,
  kUplinkD2 = 1,
  kDownlinkD1 = 2,
  kDownlinkD2 = 3,
};

using LinkValues = std::array<double, 4>;  // one value per LinkId

enum class PhaseMode { relaxed, feasible };

/// The N RIS reflection coefficients. Relaxed mode allows |phi_n| <= 1,
/// feasible mode requires |phi_n| = 1.
struct PhaseVector {
  VectorXcd coeff;
  PhaseMode mode = PhaseMode::feasible;

  static PhaseVector all_ones(int n) {
    return PhaseVector{VectorXcd::Ones(n), PhaseMode::feasible};
  }
};

struct Beamformers {
  std::array<VectorXcd, 2> uplink;  // M x 1 per device
  std::array<cxd, 2> downlink;      // scalar per device
};

struct AuxWeights {
  std::array<double, 2> uplink;
  std::array<double, 2> downlink;
};

/// Coefficients of one objective term f(phi) = 2 Re{a phi} - phi^H b phi + c.
struct QuadForm {
  RowVectorXcd a;
  MatrixXcd b;  // Hermitian PSD
  double c = 0.0;
  LinkId label = kUplinkD1;
};

inline double quad_eval(const QuadForm& f, const VectorXcd& phi) {
  const cxd lin = f.a * phi;
  const cxd quad = phi.adjoint() * (f.b * phi);
  return 2.0 * lin.real() - quad.real() + f.c;
}

/// Gradient with respect to the conjugate coordinates: a^H - b phi.
inline VectorXcd quad_grad(const QuadForm& f, const VectorXcd& phi) {
  return f.a.adjoint() - f.b * phi;
}

/// Downlink signal path: which row channel reflects off the RIS and with
/// what transmit power. The proposed scheme reflects the device's own
/// carrier; the AP-based benchmark substitutes the AP->RIS channel and the
/// AP transmit power into the same formulas.
struct DownlinkPath {
  RowVectorXcd row;
  double tx_power_w = 0.0;
};

inline DownlinkPath ris_downlink_path(const SystemConfig& cfg,
                                      const ChannelSet& ch, int device) {
  return DownlinkPath{ch.dev[device].ris_to_device,
                      derived_powers(cfg).device_tx_w[device]};
}

inline DownlinkPath ap_downlink_path(const SystemConfig& cfg,
                                     const ChannelSet& ch, int device) {
  return DownlinkPath{ch.dev[device].ap_to_ris,
                      derived_powers(cfg).ap_tx_w[device]};
}

inline std::array<DownlinkPath, 2> ris_downlink_paths(const SystemConfig& cfg,
                                                      const ChannelSet& ch) {
  return {ris_downlink_path(cfg, ch, 0), ris_downlink_path(cfg, ch, 1)};
}

inline std::array<DownlinkPath, 2> ap_downlink_paths(const SystemConfig& cfg,
                                                     const ChannelSet& ch) {
  return {ap_downlink_path(cfg, ch, 0), ap_downlink_path(cfg, ch, 1)};
}

/// Uplink cascade sqrt(P_i) H_i0 diag(phi) h_ir, an M x 1 vector.
inline VectorXcd uplink_cascade(const SystemConfig& cfg, const ChannelSet& ch,
                                const VectorXcd& phi, int device) {
  const ChannelSet::PerDevice& d = ch.dev[device];
  if (phi.size() != d.device_to_ris.size())
    throw std::invalid_argument("phase vector length does not match channel");
  const double p = derived_powers(cfg).device_tx_w[device];
  return std::sqrt(p) *
         (d.ris_to_ap * phi.cwiseProduct(d.device_to_ris).matrix());
}

/// Downlink cascade sqrt(P) row diag(phi) h_ir, a scalar.
inline cxd downlink_cascade(const DownlinkPath& path, const VectorXcd& device_to_ris,
                            const VectorXcd& phi) {
  if (phi.size() != device_to_ris.size() || phi.size() != path.row.size())
    throw std::invalid_argument("phase vector length does not match channel");
  const cxd sum = path.row * phi.cwiseProduct(device_to_ris).matrix();
  return std::sqrt(path.tx_power_w) * sum;
}

/// Column-form MMSE receive beamformer (h h^H + sigma^2 I)^{-1} h.
inline VectorXcd mmse_uplink(const VectorXcd& cascade, double noise_w) {
  if (!(noise_w > 0)) throw std::invalid_argument("noise variance must be > 0");
  MatrixXcd cov = cascade * cascade.adjoint();
  cov.diagonal().array() += noise_w;
  return cov.ldlt().solve(cascade);
}

/// Scalar MMSE receiver; si_power_w is the residual self-interference power.
inline cxd mmse_downlink(cxd cascade, double si_power_w, double noise_w) {
  if (!(noise_w > 0)) throw std::invalid_argument("noise variance must be > 0");
  if (si_power_w < 0) throw std::invalid_argument("si power must be >= 0");
  return cascade / (std::norm(cascade) + si_power_w + noise_w);
}

inline double uplink_sinr(const SystemConfig& cfg, const ChannelSet& ch,
                          const VectorXcd& phi, int device) {
  const VectorXcd cascade = uplink_cascade(cfg, ch, phi, device);
  const double noise = ch.dev[device].uplink_noise_w;
  const VectorXcd w = mmse_uplink(cascade, noise);
  const double num = std::norm(cxd(w.dot(cascade)));
  const double den = w.squaredNorm() * noise;
  return den > 0.0 ? num / den : 0.0;
}

inline double downlink_sinr(const SystemConfig& cfg, const DownlinkPath& path,
                            const VectorXcd& device_to_ris, const VectorXcd& phi,
                            double noise_w) {
  const double sig = std::norm(downlink_cascade(path, device_to_ris, phi));
  return sig / (cfg.rho_si * sig + noise_w);
}

/// Shannon capacity in bit/s; the bandwidth stays unnormalized on purpose,
/// the two media differ by an order of magnitude in B_i.
inline double capacity_bits(const Medium& medium, double gamma) {
  if (gamma < 0) throw std::invalid_argument("SINR must be >= 0");
  return medium.bandwidth_hz * std::log2(1.0 + gamma);
}

/// Decoding MSE of the uplink symbol for an arbitrary receiver w.
inline double uplink_mse(const VectorXcd& w, const VectorXcd& cascade,
                         double noise_w) {
  const cxd gain = w.dot(cascade);  // w^H cascade
  return std::norm(gain - 1.0) + w.squaredNorm() * noise_w;
}

/// Downlink MSE; the residual self-interference contributes
/// rho_si |w|^2 |cascade|^2 on top of the usual terms.
inline double downlink_mse(const SystemConfig& cfg, cxd w, cxd cascade,
                           double noise_w) {
  const cxd gain = std::conj(w) * cascade;
  return std::norm(gain - 1.0) + std::norm(w) * noise_w +
         cfg.rho_si * std::norm(w) * std::norm(cascade);
}

inline double optimal_weight(double mse) {
  if (!(mse > 0)) throw std::domain_error("MSE must be > 0");
  return 1.0 / mse;
}

/// Rate surrogate B_i (log2 mu - (mu e - 1)/ln 2). At mu = 1/e it equals
/// B_i log2(1/e) = capacity, so maximizing it over (w, mu, phi) in turn
/// maximizes the true rate.
inline double surrogate_rate_bits(const Medium& medium, double mu, double e) {
  if (!(mu > 0) || !(e > 0)) throw std::invalid_argument("mu and e must be > 0");
  return medium.bandwidth_hz * (std::log2(mu) - (mu * e - 1.0) / std::numbers::ln2);
}

/// All four capacities at a given phase; order per LinkId.
inline LinkValues capacities(const SystemConfig& cfg, const ChannelSet& ch,
                             const VectorXcd& phi,
                             const std::array<DownlinkPath, 2>& downlink) {
  LinkValues out{};
  for (int i = 0; i < 2; ++i) {
    out[kUplinkD1 + i] = capacity_bits(cfg.media[i], uplink_sinr(cfg, ch, phi, i));
    const double g = downlink_sinr(cfg, downlink[i], ch.dev[i].device_to_ris, phi,
                                   ch.dev[i].downlink_noise_w);
    out[kDownlinkD1 + i] = capacity_bits(cfg.media[i], g);
  }
  return out;
}

inline LinkValues capacities(const SystemConfig& cfg, const ChannelSet& ch,
                             const VectorXcd& phi) {
  return capacities(cfg, ch, phi, ris_downlink_paths(cfg, ch));
}

/// MMSE receivers and optimal weights at the current phase: one block update
/// of the alternating optimization.
struct WmmseState {
  Beamformers w;
  AuxWeights mu;
};

inline WmmseState wmmse_update(const SystemConfig& cfg, const ChannelSet& ch,
                               const VectorXcd& phi,
                               const std::array<DownlinkPath, 2>& downlink) {
  WmmseState s;
  for (int i = 0; i < 2; ++i) {
    const ChannelSet::PerDevice& d = ch.dev[i];
    const VectorXcd up = uplink_cascade(cfg, ch, phi, i);
    s.w.uplink[i] = mmse_uplink(up, d.uplink_noise_w);
    s.mu.uplink[i] = optimal_weight(uplink_mse(s.w.uplink[i], up, d.uplink_noise_w));

    const cxd down = downlink_cascade(downlink[i], d.device_to_ris, phi);
    s.w.downlink[i] = mmse_downlink(down, cfg.rho_si * std::norm(down),
                                    d.downlink_noise_w);
    s.mu.downlink[i] =
        optimal_weight(downlink_mse(cfg, s.w.downlink[i], down, d.downlink_noise_w));
  }
  return s;
}

/// Builds the four slot-weighted quadratic forms of the phase subproblem.
/// f_i^U pairs with the partner slot (uplink of device i is consumed during
/// the other device's downlink slot) and f_i^D with its own slot:
///   f_1^U ~ T2, f_2^U ~ T1, f_1^D ~ T1, f_2^D ~ T2.
/// Each form evaluates to the slot-weighted surrogate rate in bits so the
/// inner max-min objective matches the outer throughput objective.
inline std::array<QuadForm, 4> quad_forms(const SystemConfig& cfg,
                                          const ChannelSet& ch,
                                          const WmmseState& s,
                                          const std::array<DownlinkPath, 2>& downlink,
                                          double t1, double t2) {
  const LinkPowers powers = derived_powers(cfg);
  std::array<QuadForm, 4> out;
  const double slot[2] = {t1, t2};
  for (int i = 0; i < 2; ++i) {
    const ChannelSet::PerDevice& d = ch.dev[i];
    const double bw = cfg.media[i].bandwidth_hz;

    // Uplink term: c_n = sqrt(P) h_n (w^H H)_n, e(phi) = |c^T phi|^2
    //   - 2 Re{c^T phi} + (|w|^2 sigma^2 + 1).
    {
      const double t_weight = slot[1 - i];
      const double mu = s.mu.uplink[i];
      const VectorXcd& w = s.w.uplink[i];
      const RowVectorXcd wh = w.adjoint() * d.ris_to_ap;  // 1 x N
      const RowVectorXcd c =
          std::sqrt(powers.device_tx_w[i]) *
          wh.cwiseProduct(d.device_to_ris.transpose());
      const double k = w.squaredNorm() * d.uplink_noise_w + 1.0;
      const double scale = t_weight * bw * mu / std::numbers::ln2;
      QuadForm& f = out[kUplinkD1 + i];
      f.a = scale * c;
      f.b = scale * (c.adjoint() * c).eval();
      f.c = t_weight * bw *
            (std::log2(mu) + (1.0 - mu * k) / std::numbers::ln2);
      f.label = static_cast<LinkId>(kUplinkD1 + i);
    }

    // Downlink term: c_n = sqrt(P) h_n w* row_n; the residual SI folds into
    // the quadratic part as a (1 + rho_si) factor.
    {
      const double t_weight = slot[i];
      const double mu = s.mu.downlink[i];
      const cxd w = s.w.downlink[i];
      const RowVectorXcd c = std::sqrt(downlink[i].tx_power_w) * std::conj(w) *
                             downlink[i].row.cwiseProduct(d.device_to_ris.transpose());
      const double k = std::norm(w) * d.downlink_noise_w + 1.0;
      const double scale = t_weight * bw * mu / std::numbers::ln2;
      QuadForm& f = out[kDownlinkD1 + i];
      f.a = scale * c;
      f.b = scale * (1.0 + cfg.rho_si) * (c.adjoint() * c).eval();
      f.c = t_weight * bw *
            (std::log2(mu) + (1.0 - mu * k) / std::numbers::ln2);
      f.label = static_cast<LinkId>(kDownlinkD1 + i);
    }
  }
  return out;
}

}  // namespace crossmedia
