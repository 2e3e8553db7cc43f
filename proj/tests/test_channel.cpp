#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_support.hpp"

using namespace crossmedia;
using test_support::close_abs;
using test_support::close_rel;

TEST_CASE("derived powers follow the bandwidth ratio") {
  SystemConfig cfg;  // B1 = 10 MHz, B2 = 100 MHz, P = 23 dBm
  const LinkPowers p = derived_powers(cfg);
  // Hand-evaluated dBm -> W conversion: 10^(2.3) mW.
  REQUIRE(close_rel(p.device_tx_w[0], 0.19952623149688786, 1e-12));
  REQUIRE(close_rel(p.device_tx_w[1], 1.9952623149688786, 1e-12));
  // sigma_1^2 = B1 * N0 = -104 dBm.
  REQUIRE(close_rel(p.uplink_noise_w[0], dbm_to_watt(-104.0), 1e-12));
  REQUIRE(close_rel(p.uplink_noise_w[1], 10.0 * p.uplink_noise_w[0], 1e-12));
  // Equal transmit SNR on both media.
  REQUIRE(close_rel(p.device_tx_w[0] / p.uplink_noise_w[0],
                    p.device_tx_w[1] / p.uplink_noise_w[1], 1e-12));
}

TEST_CASE("derived powers with equal bandwidths are symmetric") {
  SystemConfig cfg;
  cfg.media[1].bandwidth_hz = cfg.media[0].bandwidth_hz;
  const LinkPowers p = derived_powers(cfg);
  REQUIRE(p.device_tx_w[0] == p.device_tx_w[1]);
}

TEST_CASE("large-scale gain at the reference distance with lambda = 4 pi") {
  SystemConfig cfg;
  Medium m{1, kSpeedOfLight / (4.0 * std::numbers::pi), 1e6, 0.0, 5.0};
  REQUIRE(close_abs(large_scale_gain_db(1.0, m, cfg), 0.0, 1e-9));
}

TEST_CASE("large-scale gain matches the hand-evaluated pathloss formula") {
  SystemConfig cfg;  // eta = 2.2, d0 = 1 m
  const Medium& m = cfg.media[0];  // 2.4 GHz, G = 10 dB
  REQUIRE(close_abs(large_scale_gain_db(50.0, m, cfg), -67.42934815150791, 1e-9));
}

TEST_CASE("doubling distance costs 10 eta log10(2) dB") {
  SystemConfig cfg;
  const Medium& m = cfg.media[0];
  const double drop = 10.0 * cfg.pathloss_exponent * std::log10(2.0);
  for (double d : {1.0, 7.5, 40.0}) {
    REQUIRE(close_abs(large_scale_gain_db(2.0 * d, m, cfg),
                      large_scale_gain_db(d, m, cfg) - drop, 1e-10));
  }
}

TEST_CASE("pathloss gain is strictly decreasing in distance") {
  SystemConfig cfg;
  for (const Medium& m : cfg.media) {
    double prev = large_scale_gain_db(1.0, m, cfg);
    for (double d = 2.0; d < 200.0; d *= 1.7) {
      const double g = large_scale_gain_db(d, m, cfg);
      REQUIRE(g < prev);
      prev = g;
    }
  }
}

TEST_CASE("distances below the reference distance are rejected") {
  SystemConfig cfg;
  REQUIRE_THROWS_AS(large_scale_gain_db(0.5, cfg.media[0], cfg),
                    std::domain_error);
}

TEST_CASE("small-scale sample becomes pure LOS as K grows") {
  Rng rng(42);
  Medium m{1, 2.4e9, 10e6, 10.0, 300.0};  // K = 1e30 linear
  for (int i = 0; i < 32; ++i) {
    REQUIRE(close_abs(std::abs(small_scale_sample(m, 3.0, rng)), 1.0, 1e-9));
  }
}

TEST_CASE("small-scale sample with K = 0 is the real NLOS amplitude") {
  Rng rng(43);
  Medium m{1, 2.4e9, 10e6, 10.0, -300.0};  // K ~ 0
  double sum = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const cxd s = small_scale_sample(m, 3.0, rng);
    REQUIRE(std::abs(s.imag()) < 1e-10);
    sum += s.real();
  }
  const double mean = sum / draws;  // Exponential(1) amplitude
  REQUIRE(mean > 0.97);
  REQUIRE(mean < 1.03);
}

TEST_CASE("medium 2 has the deterministic LOS phase 2 pi d / lambda") {
  Rng rng(44);
  SystemConfig cfg;
  Medium m = cfg.media[1];
  m.rician_factor_db = 300.0;  // isolate the LOS term
  const cxd s = small_scale_sample(m, m.wavelength_m(), rng);
  REQUIRE(close_abs(s.real(), 1.0, 1e-9));
  REQUIRE(close_abs(s.imag(), 0.0, 1e-9));
}

TEST_CASE("channel draw shapes and determinism") {
  SystemConfig cfg = test_support::small_config(1, 1);
  Rng rng_a(7);
  Rng rng_b(7);
  const ChannelSet a = draw_channel_set(cfg, rng_a);
  const ChannelSet b = draw_channel_set(cfg, rng_b);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(a.dev[i].device_to_ris.size() == 1);
    REQUIRE(a.dev[i].ris_to_ap.rows() == 1);
    REQUIRE(a.dev[i].ris_to_ap.cols() == 1);
    REQUIRE(std::isfinite(std::abs(a.dev[i].device_to_ris(0))));
    REQUIRE(a.dev[i].device_to_ris == b.dev[i].device_to_ris);
    REQUIRE(a.dev[i].ris_to_ap == b.dev[i].ris_to_ap);
    REQUIRE(a.dev[i].ris_to_device == b.dev[i].ris_to_device);
    REQUIRE(a.dev[i].ap_to_ris == b.dev[i].ap_to_ris);
    REQUIRE(a.dev[i].loop == b.dev[i].loop);
  }
}

TEST_CASE("LI-plus-noise ratio is applied exactly") {
  SystemConfig cfg;
  Rng rng(11);
  const ChannelSet ch = draw_channel_set(cfg, rng);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(close_rel(ch.dev[i].downlink_noise_w / ch.dev[i].uplink_noise_w,
                      cfg.li_noise_ratio, 1e-12));
  }
}

TEST_CASE("channel second moment matches pathloss times fading power") {
  // Monte Carlo moment oracle: E|h|^2 = linear large-scale gain times the
  // analytic Rician second moment a^2 + 2 a b E[cos theta] + 2 b^2.
  SystemConfig cfg = test_support::small_config(1, 1);
  const Medium& m = cfg.media[0];
  const double k = db_to_linear(m.rician_factor_db);
  const double a = std::sqrt(k / (k + 1.0));
  const double b = std::sqrt(1.0 / (k + 1.0));
  const double ss_power = a * a + 2.0 * a * b * std::exp(-0.5) + 2.0 * b * b;
  const double gain = db_to_linear(large_scale_gain_db(
      distance(cfg.geometry.d1, cfg.geometry.ris), m, cfg));

  Rng rng(17);
  double acc = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const ChannelSet ch = draw_channel_set(cfg, rng);
    acc += std::norm(ch.dev[0].device_to_ris(0));
  }
  REQUIRE(close_rel(acc / draws, gain * ss_power, 0.03));
}

TEST_CASE("estimation error with rho_e = 0 changes nothing") {
  SystemConfig cfg;
  Rng rng(5);
  const ChannelSet ch = draw_channel_set(cfg, rng);
  const ChannelSet out = apply_estimation_error(ch, 0.0, cfg);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(out.dev[i].uplink_noise_w == ch.dev[i].uplink_noise_w);
    REQUIRE(out.dev[i].downlink_noise_w == ch.dev[i].downlink_noise_w);
  }
}

TEST_CASE("noise inflation scales with rho_e squared") {
  SystemConfig cfg;
  Rng rng(6);
  const ChannelSet ch = draw_channel_set(cfg, rng);
  const ChannelSet x1 = apply_estimation_error(ch, 0.05, cfg);
  const ChannelSet x2 = apply_estimation_error(ch, 0.10, cfg);
  for (int i = 0; i < 2; ++i) {
    const double up1 = x1.dev[i].uplink_noise_w / ch.dev[i].uplink_noise_w - 1.0;
    const double up2 = x2.dev[i].uplink_noise_w / ch.dev[i].uplink_noise_w - 1.0;
    REQUIRE(close_rel(up2, 4.0 * up1, 1e-9));
    const double dn1 =
        x1.dev[i].downlink_noise_w / ch.dev[i].downlink_noise_w - 1.0;
    const double dn2 =
        x2.dev[i].downlink_noise_w / ch.dev[i].downlink_noise_w - 1.0;
    REQUIRE(close_rel(dn2, 4.0 * dn1, 1e-9));
  }
}

TEST_CASE("negative rho_e is rejected") {
  SystemConfig cfg;
  Rng rng(8);
  const ChannelSet ch = draw_channel_set(cfg, rng);
  REQUIRE_THROWS_AS(apply_estimation_error(ch, -0.1, cfg), std::domain_error);
}
