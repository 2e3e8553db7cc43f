#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "crossmedia/allocation.hpp"
#include "crossmedia/channel.hpp"
#include "crossmedia/config.hpp"
#include "crossmedia/linkmodel.hpp"
#include "crossmedia/rng.hpp"

namespace crossmedia {

enum class Scheme {
  p1,           // no delay constraints
  p2,           // delay constrained
  equal_t,      // delay constrained, slots fixed to 0.5/0.5
  rand_phi,     // random phase, equal slots
  two_bit_phi,  // delay constrained with 2-bit quantized phase
  ap_based,     // downlink transmitted from the APs
};

inline std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::p1: return "P1";
    case Scheme::p2: return "P2";
    case Scheme::equal_t: return "EqualT";
    case Scheme::rand_phi: return "RandPhi";
    case Scheme::two_bit_phi: return "2bitPhi";
    case Scheme::ap_based: return "APBased";
  }
  return "?";
}

inline Scheme scheme_from_name(std::string_view name) {
  for (Scheme s : {Scheme::p1, Scheme::p2, Scheme::equal_t, Scheme::rand_phi,
                   Scheme::two_bit_phi, Scheme::ap_based}) {
    if (scheme_name(s) == name) return s;
  }
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

/// Transmit and circuit powers feeding the energy-efficiency accounting.
struct PowerBudget {
  std::array<double, 2> device_tx_w{};
  std::array<double, 2> ap_tx_w{};
  std::array<double, 2> device_circuit_w{};
  std::array<double, 2> ap_circuit_w{};
  double ris_element_circuit_w = 0.0;
  int num_elements = 0;
};

inline PowerBudget power_budget(const SystemConfig& cfg) {
  const LinkPowers p = derived_powers(cfg);
  PowerBudget b;
  b.device_tx_w = p.device_tx_w;
  b.ap_tx_w = p.ap_tx_w;
  b.device_circuit_w = {cfg.circuit_mw_d1 * 1e-3, cfg.circuit_mw_d2 * 1e-3};
  b.ap_circuit_w = {cfg.circuit_mw_ap1 * 1e-3, cfg.circuit_mw_ap2 * 1e-3};
  b.ris_element_circuit_w = cfg.circuit_mw_ris_element * 1e-3;
  b.num_elements = cfg.num_ris_elements;
  return b;
}

/// Total consumed power: devices plus the RIS control circuits; the AP-based
/// scheme additionally pays the AP transmit and circuit powers.
inline double total_power_w(Scheme scheme, const PowerBudget& b) {
  double total = b.device_tx_w[0] + b.device_tx_w[1] + b.device_circuit_w[0] +
                 b.device_circuit_w[1] + b.num_elements * b.ris_element_circuit_w;
  if (scheme == Scheme::ap_based)
    total += b.ap_tx_w[0] + b.ap_tx_w[1] + b.ap_circuit_w[0] + b.ap_circuit_w[1];
  return total;
}

/// Bits per Joule with the frame normalized to one second.
inline double energy_efficiency(double f_bits, double total_power_w) {
  if (!(total_power_w > 0)) throw std::invalid_argument("total power must be > 0");
  return f_bits / total_power_w;
}

/// Downlink capacity of the AP-based benchmark: the device formula with the
/// device power and reflect row replaced by the AP's.
inline double ap_downlink_capacity_bits(const SystemConfig& cfg,
                                        const ChannelSet& ch,
                                        const VectorXcd& phi, int device) {
  if (ch.dev[device].ap_to_ris.size() == 0)
    throw std::invalid_argument("channel set lacks the AP->RIS benchmark link");
  const DownlinkPath path = ap_downlink_path(cfg, ch, device);
  const double gamma = downlink_sinr(cfg, path, ch.dev[device].device_to_ris, phi,
                                     ch.dev[device].downlink_noise_w);
  return capacity_bits(cfg.media[device], gamma);
}

/// 2-bit uniform quantization: each entry snaps to the nearest of
/// {1, j, -1, -j}; ties pick the smaller angle, zero entries map to 1.
inline PhaseVector quantize_phase_2bit(const PhaseVector& phi) {
  PhaseVector out{VectorXcd(phi.coeff.size()), PhaseMode::feasible};
  for (Eigen::Index i = 0; i < phi.coeff.size(); ++i) {
    const cxd z = phi.coeff(i);
    if (std::abs(z) == 0.0) {
      out.coeff(i) = cxd{1.0, 0.0};
      continue;
    }
    const double angle = std::arg(z);
    int best_q = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int q = 0; q < 4; ++q) {
      double d = std::remainder(angle - q * std::numbers::pi / 2.0,
                                2.0 * std::numbers::pi);
      d = std::abs(d);
      if (d < best_dist) {
        best_dist = d;
        best_q = q;
      }
    }
    const double a = best_q * std::numbers::pi / 2.0;
    out.coeff(i) = cxd{std::cos(a), std::sin(a)};
  }
  return out;
}

struct SchemeResult {
  Scheme scheme = Scheme::p1;
  double objective_bits = 0.0;
  double ee_bits_per_joule = 0.0;
  Solution solution;
};

namespace detail {

inline SchemeResult finish(Scheme scheme, const SystemConfig& cfg, Solution sol) {
  SchemeResult r;
  r.scheme = scheme;
  r.objective_bits = sol.objective_bits;
  r.ee_bits_per_joule =
      energy_efficiency(sol.objective_bits, total_power_w(scheme, power_budget(cfg)));
  r.solution = std::move(sol);
  return r;
}

}  // namespace detail

/// AP-based benchmark: both downlinks run over the whole frame, so the rate
/// program is solved at T1 = T2 = 1 with AP downlink capacities.
inline SchemeResult optimize_ap_based(const SystemConfig& cfg, const ChannelSet& ch) {
  const std::vector<Allocation> full_frame{Allocation{1.0, 1.0}};
  Solution sol =
      optimize_delay_constrained(cfg, ch, full_frame, ap_downlink_paths(cfg, ch));
  return detail::finish(Scheme::ap_based, cfg, std::move(sol));
}

/// Derives the 2-bit scheme from an already computed delay-constrained
/// solution: quantize the phase, recompute capacities and re-solve the rate
/// program at the same slots.
inline SchemeResult two_bit_from(const SystemConfig& cfg, const ChannelSet& ch,
                                 const Solution& continuous) {
  Solution sol;
  sol.phase = quantize_phase_2bit(continuous.phase);
  sol.alloc = continuous.alloc;
  sol.capacities = capacities(cfg, ch, sol.phase.coeff);
  const RateLpResult lp = solve_rate_lp(sol.capacities, sol.alloc);
  sol.rates = lp.rates;
  sol.objective_bits = lp.objective;
  sol.trace = {lp.objective};
  sol.iterations = continuous.iterations;
  sol.converged = continuous.converged;
  return detail::finish(Scheme::two_bit_phi, cfg, std::move(sol));
}

inline SchemeResult run_baseline(Scheme kind, const SystemConfig& cfg,
                                 const ChannelSet& ch, Rng& rng) {
  switch (kind) {
    case Scheme::equal_t: {
      const std::vector<Allocation> half{Allocation{0.5, 0.5}};
      return detail::finish(kind, cfg,
                            optimize_delay_constrained(cfg, ch, half,
                                                       ris_downlink_paths(cfg, ch)));
    }
    case Scheme::rand_phi: {
      PhaseVector phi{VectorXcd(cfg.num_ris_elements), PhaseMode::feasible};
      for (Eigen::Index i = 0; i < phi.coeff.size(); ++i)
        phi.coeff(i) = rng.unit_phase();
      Solution sol;
      sol.phase = phi;
      sol.alloc = Allocation{0.5, 0.5};
      sol.capacities = capacities(cfg, ch, phi.coeff);
      const RateLpResult lp = solve_rate_lp(sol.capacities, sol.alloc);
      sol.rates = lp.rates;
      sol.objective_bits = lp.objective;
      sol.trace = {lp.objective};
      sol.iterations = 1;
      sol.converged = true;
      return detail::finish(kind, cfg, std::move(sol));
    }
    case Scheme::two_bit_phi:
      return two_bit_from(cfg, ch, optimize_p2(cfg, ch));
    default:
      throw std::invalid_argument("run_baseline handles EqualT/RandPhi/2bitPhi");
  }
}

/// Uniform entry point used by the Monte Carlo harness.
inline SchemeResult run_scheme(Scheme scheme, const SystemConfig& cfg,
                               const ChannelSet& ch, Rng& rng) {
  switch (scheme) {
    case Scheme::p1:
      return detail::finish(scheme, cfg, optimize_p1(cfg, ch));
    case Scheme::p2:
      return detail::finish(scheme, cfg, optimize_p2(cfg, ch));
    case Scheme::ap_based:
      return optimize_ap_based(cfg, ch);
    default:
      return run_baseline(scheme, cfg, ch, rng);
  }
}

}  // namespace crossmedia
