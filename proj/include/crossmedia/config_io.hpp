#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "crossmedia/config.hpp"
#include "crossmedia/experiment.hpp"

namespace crossmedia {

namespace detail {

using nlohmann::json;

/// Reads one object level, rejecting unknown keys so typos fail loudly
/// with the offending path instead of silently using a default.
class JsonReader {
 public:
  JsonReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object())
      throw ConfigError("config field '" + path_ + "': expected an object");
  }

  bool has(const std::string& key) {
    mark(key);
    return obj_.contains(key);
  }

  template <class T>
  void read(const std::string& key, T& value) {
    mark(key);
    if (!obj_.contains(key)) return;
    try {
      value = obj_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config field '" + path_ + key + "': " + e.what());
    }
  }

  const json& child(const std::string& key) {
    mark(key);
    return obj_.at(key);
  }

  std::string child_path(const std::string& key) const { return path_ + key + "."; }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      bool used = false;
      for (const std::string& k : used_) used = used || k == key;
      if (!used)
        throw ConfigError("config field '" + path_ + key + "': unknown key");
    }
  }

 private:
  void mark(const std::string& key) { used_.push_back(key); }

  const json& obj_;
  std::string path_;
  std::vector<std::string> used_;
};

inline Vec2 read_vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError("config field '" + path + "': expected [x, y]");
  return Vec2{j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json vec2_json(const Vec2& v) { return json::array({v.x, v.y}); }

inline void read_medium(const json& j, const std::string& path, Medium& m) {
  JsonReader r(j, path);
  r.read("carrier_freq_hz", m.carrier_freq_hz);
  r.read("bandwidth_hz", m.bandwidth_hz);
  r.read("total_antenna_gain_db", m.total_antenna_gain_db);
  r.read("rician_factor_db", m.rician_factor_db);
  r.finish();
}

inline void read_system(const json& j, SystemConfig& cfg) {
  JsonReader r(j, "system.");
  if (r.has("media")) {
    const json& media = r.child("media");
    if (!media.is_array() || media.size() != 2)
      throw ConfigError("config field 'system.media': expected exactly 2 entries");
    for (int i = 0; i < 2; ++i)
      read_medium(media.at(i), "system.media[" + std::to_string(i) + "].",
                  cfg.media[i]);
  }
  if (r.has("geometry")) {
    JsonReader g(r.child("geometry"), r.child_path("geometry"));
    const auto rd = [&](const char* key, Vec2& v) {
      if (g.has(key)) v = read_vec2(g.child(key), "system.geometry." + std::string(key));
    };
    rd("d1", cfg.geometry.d1);
    rd("d2", cfg.geometry.d2);
    rd("ap1", cfg.geometry.ap1);
    rd("ap2", cfg.geometry.ap2);
    rd("ris", cfg.geometry.ris);
    g.finish();
  }
  r.read("num_ap_antennas", cfg.num_ap_antennas);
  r.read("num_ris_elements", cfg.num_ris_elements);
  r.read("reference_distance_m", cfg.reference_distance_m);
  r.read("pathloss_exponent", cfg.pathloss_exponent);
  r.read("rho_si", cfg.rho_si);
  r.read("li_noise_ratio", cfg.li_noise_ratio);
  r.read("noise_psd_dbm_hz", cfg.noise_psd_dbm_hz);
  r.read("power_dbm", cfg.power_dbm);
  r.read("ap_power_dbm", cfg.ap_power_dbm);
  r.read("rho_e", cfg.rho_e);
  if (r.has("circuit_mw")) {
    JsonReader c(r.child("circuit_mw"), r.child_path("circuit_mw"));
    c.read("d1", cfg.circuit_mw_d1);
    c.read("d2", cfg.circuit_mw_d2);
    c.read("ap1", cfg.circuit_mw_ap1);
    c.read("ap2", cfg.circuit_mw_ap2);
    c.read("ris_element", cfg.circuit_mw_ris_element);
    c.finish();
  }
  if (r.has("solver")) {
    JsonReader s(r.child("solver"), r.child_path("solver"));
    s.read("k_max", cfg.solver.k_max);
    s.read("t_max", cfg.solver.t_max);
    s.read("ero_rel", cfg.solver.ero_rel);
    s.read("inner_iters", cfg.solver.inner_iters);
    s.read("smoothing_stages", cfg.solver.smoothing_stages);
    s.read("smoothing_lambda0", cfg.solver.smoothing_lambda0);
    s.read("smoothing_growth", cfg.solver.smoothing_growth);
    s.read("step0", cfg.solver.step0);
    s.read("seed", cfg.solver.seed);
    s.finish();
  }
  r.finish();
}

inline void read_experiment(const json& j, Experiment& exp) {
  JsonReader r(j, "experiment.");
  r.read("name", exp.name);
  if (r.has("axis")) exp.axis = axis_from_name(r.child("axis").get<std::string>());
  r.read("values", exp.values);
  r.read("trials", exp.trials);
  if (r.has("schemes")) {
    exp.schemes.clear();
    for (const json& s : r.child("schemes"))
      exp.schemes.push_back(scheme_from_name(s.get<std::string>()));
  }
  r.read("out_dir", exp.out_dir);
  r.finish();
}

}  // namespace detail

struct LoadedConfig {
  SystemConfig system;
  Experiment experiment;
};

/// Parses a JSON config string. Every field is optional; missing fields take
/// the built-in defaults. An empty string means "all defaults".
inline LoadedConfig parse_config(const std::string& text) {
  LoadedConfig out;
  std::string trimmed = text;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  if (!trimmed.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(trimmed);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
    detail::JsonReader r(j, "");
    if (r.has("system")) detail::read_system(r.child("system"), out.system);
    if (r.has("experiment"))
      detail::read_experiment(r.child("experiment"), out.experiment);
    r.finish();
  }
  out.system.validate();
  if (out.experiment.values.empty())
    out.experiment.values = {axis_value(out.system, out.experiment.axis)};
  out.experiment.validate();
  return out;
}

inline LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string save_config(const SystemConfig& cfg, const Experiment& exp) {
  using nlohmann::json;
  json media = json::array();
  for (const Medium& m : cfg.media) {
    media.push_back({{"carrier_freq_hz", m.carrier_freq_hz},
                     {"bandwidth_hz", m.bandwidth_hz},
                     {"total_antenna_gain_db", m.total_antenna_gain_db},
                     {"rician_factor_db", m.rician_factor_db}});
  }
  json schemes = json::array();
  for (Scheme s : exp.schemes) schemes.push_back(std::string(scheme_name(s)));
  json j = {
      {"system",
       {{"media", media},
        {"geometry",
         {{"d1", detail::vec2_json(cfg.geometry.d1)},
          {"d2", detail::vec2_json(cfg.geometry.d2)},
          {"ap1", detail::vec2_json(cfg.geometry.ap1)},
          {"ap2", detail::vec2_json(cfg.geometry.ap2)},
          {"ris", detail::vec2_json(cfg.geometry.ris)}}},
        {"num_ap_antennas", cfg.num_ap_antennas},
        {"num_ris_elements", cfg.num_ris_elements},
        {"reference_distance_m", cfg.reference_distance_m},
        {"pathloss_exponent", cfg.pathloss_exponent},
        {"rho_si", cfg.rho_si},
        {"li_noise_ratio", cfg.li_noise_ratio},
        {"noise_psd_dbm_hz", cfg.noise_psd_dbm_hz},
        {"power_dbm", cfg.power_dbm},
        {"ap_power_dbm", cfg.ap_power_dbm},
        {"rho_e", cfg.rho_e},
        {"circuit_mw",
         {{"d1", cfg.circuit_mw_d1},
          {"d2", cfg.circuit_mw_d2},
          {"ap1", cfg.circuit_mw_ap1},
          {"ap2", cfg.circuit_mw_ap2},
          {"ris_element", cfg.circuit_mw_ris_element}}},
        {"solver",
         {{"k_max", cfg.solver.k_max},
          {"t_max", cfg.solver.t_max},
          {"ero_rel", cfg.solver.ero_rel},
          {"inner_iters", cfg.solver.inner_iters},
          {"smoothing_stages", cfg.solver.smoothing_stages},
          {"smoothing_lambda0", cfg.solver.smoothing_lambda0},
          {"smoothing_growth", cfg.solver.smoothing_growth},
          {"step0", cfg.solver.step0},
          {"seed", cfg.solver.seed}}}}},
      {"experiment",
       {{"name", exp.name},
        {"axis", std::string(axis_name(exp.axis))},
        {"values", exp.values},
        {"trials", exp.trials},
        {"schemes", schemes},
        {"out_dir", exp.out_dir}}},
  };
  return j.dump(2) + "\n";
}

}  // namespace crossmedia
