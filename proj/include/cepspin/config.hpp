#pragma once

#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cepspin/constants.hpp"
#include "cepspin/errors.hpp"
#include "cepspin/integrator.hpp"
#include "cepspin/pulse.hpp"
#include "cepspin/scan.hpp"
#include "cepspin/spin_system.hpp"

namespace cepspin {

// Run configuration in experimentalist units (kHz cyclic, degrees,
// microseconds, microtesla). Conversion to the strict-SI core types happens
// only in the make_* functions below. Unknown keys are rejected; validation
// errors name the offending key.
struct RunConfig {
  struct Pulse {
    double nu1_khz = 50.0;
    double nu2_khz = 150.0;
    double phi1_deg = 0.0;
    double phi2_deg = 0.0;
    double b1_ut = 0.1;
    double b2_ut = 0.1;
    double fwhm_us = 130.0;
  } pulse;

  struct System {
    std::optional<double> omega_khz;  // Zeeman splitting; exclusive with b0_ut
    std::optional<double> b0_ut;
    double gamma_per_s = 0.0;
  } system;

  struct Grid {
    double omega_min_khz = 100.0;
    double omega_max_khz = 200.0;
    int points = 201;
    std::vector<double> phases_deg = {0.0};
  } grid;

  std::string model = "perturbative";

  struct Integrator {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::optional<double> max_step_us;  // absent: only the carrier cap applies
    double t_cut_multiple = 4.0;
    int samples = 2048;
  } integrator;

  struct Transmission {
    double scale = 1.0;
  } transmission;

  struct Constants {
    double hbar = constants::hbar;
    double mu_bohr = constants::bohr_magneton;
    double lande_g = constants::lande_g;
  } constants_;
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& section,
                       std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known)
      throw ConfigError(section.empty() ? it.key() : section + "." + it.key(),
                        "unknown key");
  }
}

inline double get_number(const json& j, const std::string& section, const char* key,
                         double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number())
    throw ConfigError(section + "." + key, "expected a number");
  return v.get<double>();
}

inline int get_int(const json& j, const std::string& section, const char* key,
                   int fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer())
    throw ConfigError(section + "." + key, "expected an integer");
  return v.get<int>();
}

inline void require(bool cond, const std::string& key, const std::string& msg) {
  if (!cond) throw ConfigError(key, msg);
}

}  // namespace detail

inline RunConfig load_config_json(const nlohmann::json& j) {
  using detail::check_keys;
  using detail::get_int;
  using detail::get_number;
  using detail::require;

  if (!j.is_object()) throw ConfigError("", "config document must be a JSON object");
  check_keys(j, "", {"pulse", "system", "grid", "model", "integrator", "transmission",
                     "constants"});
  RunConfig c;

  if (j.contains("pulse")) {
    const auto& p = j.at("pulse");
    if (!p.is_object()) throw ConfigError("pulse", "expected an object");
    check_keys(p, "pulse",
               {"nu1_khz", "nu2_khz", "phi1_deg", "phi2_deg", "b1_ut", "b2_ut", "fwhm_us"});
    c.pulse.nu1_khz = get_number(p, "pulse", "nu1_khz", c.pulse.nu1_khz);
    c.pulse.nu2_khz = get_number(p, "pulse", "nu2_khz", c.pulse.nu2_khz);
    c.pulse.phi1_deg = get_number(p, "pulse", "phi1_deg", c.pulse.phi1_deg);
    c.pulse.phi2_deg = get_number(p, "pulse", "phi2_deg", c.pulse.phi2_deg);
    c.pulse.b1_ut = get_number(p, "pulse", "b1_ut", c.pulse.b1_ut);
    c.pulse.b2_ut = get_number(p, "pulse", "b2_ut", c.pulse.b2_ut);
    c.pulse.fwhm_us = get_number(p, "pulse", "fwhm_us", c.pulse.fwhm_us);
  }
  require(c.pulse.fwhm_us > 0.0, "pulse.fwhm_us", "must be positive");
  require(c.pulse.nu1_khz > 0.0, "pulse.nu1_khz", "must be positive");
  require(c.pulse.nu2_khz > 0.0, "pulse.nu2_khz", "must be positive");
  require(c.pulse.b1_ut >= 0.0, "pulse.b1_ut", "must be >= 0");
  require(c.pulse.b2_ut >= 0.0, "pulse.b2_ut", "must be >= 0");

  if (j.contains("system")) {
    const auto& s = j.at("system");
    if (!s.is_object()) throw ConfigError("system", "expected an object");
    check_keys(s, "system", {"omega_khz", "b0_ut", "gamma_per_s"});
    if (s.contains("omega_khz"))
      c.system.omega_khz = get_number(s, "system", "omega_khz", 0.0);
    if (s.contains("b0_ut")) c.system.b0_ut = get_number(s, "system", "b0_ut", 0.0);
    c.system.gamma_per_s = get_number(s, "system", "gamma_per_s", 0.0);
  }
  require(!(c.system.omega_khz && c.system.b0_ut), "system.omega_khz",
          "omega_khz and b0_ut are mutually exclusive");
  if (c.system.omega_khz) require(*c.system.omega_khz >= 0.0, "system.omega_khz", "must be >= 0");
  if (c.system.b0_ut) require(*c.system.b0_ut >= 0.0, "system.b0_ut", "must be >= 0");
  require(c.system.gamma_per_s >= 0.0, "system.gamma_per_s", "must be >= 0");

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (!g.is_object()) throw ConfigError("grid", "expected an object");
    check_keys(g, "grid", {"omega_min_khz", "omega_max_khz", "points", "phases_deg"});
    c.grid.omega_min_khz = get_number(g, "grid", "omega_min_khz", c.grid.omega_min_khz);
    c.grid.omega_max_khz = get_number(g, "grid", "omega_max_khz", c.grid.omega_max_khz);
    c.grid.points = get_int(g, "grid", "points", c.grid.points);
    if (g.contains("phases_deg")) {
      const auto& ph = g.at("phases_deg");
      if (!ph.is_array() || ph.empty())
        throw ConfigError("grid.phases_deg", "expected a non-empty array of numbers");
      c.grid.phases_deg.clear();
      for (const auto& v : ph) {
        if (!v.is_number()) throw ConfigError("grid.phases_deg", "expected numbers");
        c.grid.phases_deg.push_back(v.get<double>());
      }
    }
  }
  require(c.grid.omega_min_khz < c.grid.omega_max_khz, "grid.omega_min_khz",
          "must be < omega_max_khz");
  require(c.grid.points >= 2, "grid.points", "must be >= 2");

  if (j.contains("model")) {
    const auto& m = j.at("model");
    if (!m.is_string()) throw ConfigError("model", "expected a string");
    c.model = m.get<std::string>();
    try {
      model_from_string(c.model);
    } catch (const std::domain_error& e) {
      throw ConfigError("model", e.what());
    }
  }

  if (j.contains("integrator")) {
    const auto& i = j.at("integrator");
    if (!i.is_object()) throw ConfigError("integrator", "expected an object");
    check_keys(i, "integrator",
               {"rel_tol", "abs_tol", "max_step_us", "t_cut_multiple", "samples"});
    c.integrator.rel_tol = get_number(i, "integrator", "rel_tol", c.integrator.rel_tol);
    c.integrator.abs_tol = get_number(i, "integrator", "abs_tol", c.integrator.abs_tol);
    if (i.contains("max_step_us"))
      c.integrator.max_step_us = get_number(i, "integrator", "max_step_us", 0.0);
    c.integrator.t_cut_multiple =
        get_number(i, "integrator", "t_cut_multiple", c.integrator.t_cut_multiple);
    c.integrator.samples = get_int(i, "integrator", "samples", c.integrator.samples);
  }
  require(c.integrator.rel_tol > 0.0, "integrator.rel_tol", "must be positive");
  require(c.integrator.abs_tol > 0.0, "integrator.abs_tol", "must be positive");
  if (c.integrator.max_step_us)
    require(*c.integrator.max_step_us > 0.0, "integrator.max_step_us", "must be positive");
  require(c.integrator.t_cut_multiple > 0.0, "integrator.t_cut_multiple", "must be positive");
  require(c.integrator.samples >= 2, "integrator.samples", "must be >= 2");

  if (j.contains("transmission")) {
    const auto& t = j.at("transmission");
    if (!t.is_object()) throw ConfigError("transmission", "expected an object");
    check_keys(t, "transmission", {"scale"});
    c.transmission.scale = get_number(t, "transmission", "scale", c.transmission.scale);
  }
  require(c.transmission.scale > 0.0, "transmission.scale", "must be positive");

  if (j.contains("constants")) {
    const auto& k = j.at("constants");
    if (!k.is_object()) throw ConfigError("constants", "expected an object");
    check_keys(k, "constants", {"hbar", "mu_bohr", "lande_g"});
    c.constants_.hbar = get_number(k, "constants", "hbar", c.constants_.hbar);
    c.constants_.mu_bohr = get_number(k, "constants", "mu_bohr", c.constants_.mu_bohr);
    c.constants_.lande_g = get_number(k, "constants", "lande_g", c.constants_.lande_g);
  }
  require(c.constants_.hbar > 0.0, "constants.hbar", "must be positive");
  require(c.constants_.mu_bohr > 0.0, "constants.mu_bohr", "must be positive");
  require(c.constants_.lande_g != 0.0, "constants.lande_g", "must be nonzero");

  return c;
}

inline RunConfig load_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("JSON parse error: ") + e.what());
  }
  return load_config_json(j);
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str());
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["pulse"] = {{"nu1_khz", c.pulse.nu1_khz},   {"nu2_khz", c.pulse.nu2_khz},
                {"phi1_deg", c.pulse.phi1_deg}, {"phi2_deg", c.pulse.phi2_deg},
                {"b1_ut", c.pulse.b1_ut},       {"b2_ut", c.pulse.b2_ut},
                {"fwhm_us", c.pulse.fwhm_us}};
  nlohmann::json sys;
  if (c.system.omega_khz) sys["omega_khz"] = *c.system.omega_khz;
  if (c.system.b0_ut) sys["b0_ut"] = *c.system.b0_ut;
  sys["gamma_per_s"] = c.system.gamma_per_s;
  j["system"] = sys;
  j["grid"] = {{"omega_min_khz", c.grid.omega_min_khz},
               {"omega_max_khz", c.grid.omega_max_khz},
               {"points", c.grid.points},
               {"phases_deg", c.grid.phases_deg}};
  j["model"] = c.model;
  nlohmann::json integ = {{"rel_tol", c.integrator.rel_tol},
                          {"abs_tol", c.integrator.abs_tol},
                          {"t_cut_multiple", c.integrator.t_cut_multiple},
                          {"samples", c.integrator.samples}};
  if (c.integrator.max_step_us) integ["max_step_us"] = *c.integrator.max_step_us;
  j["integrator"] = integ;
  j["transmission"] = {{"scale", c.transmission.scale}};
  j["constants"] = {{"hbar", c.constants_.hbar},
                    {"mu_bohr", c.constants_.mu_bohr},
                    {"lande_g", c.constants_.lande_g}};
  return j;
}

inline std::string save_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

// --- converters into core types (the only unit boundary) ---

inline PulseParams make_pulse(const RunConfig& c) {
  return PulseParams(units::khz_to_rad_s(c.pulse.nu1_khz),
                     units::khz_to_rad_s(c.pulse.nu2_khz),
                     units::deg_to_rad(c.pulse.phi1_deg),
                     units::deg_to_rad(c.pulse.phi2_deg),
                     units::ut_to_tesla(c.pulse.b1_ut),
                     units::ut_to_tesla(c.pulse.b2_ut),
                     units::us_to_s(c.pulse.fwhm_us));
}

inline SpinSystem make_system(const RunConfig& c) {
  SpinSystem s;
  s.g = c.constants_.lande_g;
  s.mu_bohr = c.constants_.mu_bohr;
  s.hbar = c.constants_.hbar;
  s.gamma = c.system.gamma_per_s;
  if (c.system.b0_ut) {
    s.b0 = units::ut_to_tesla(*c.system.b0_ut);
  } else {
    const double omega_khz = c.system.omega_khz.value_or(150.0);
    s.b0 = s.hbar * units::khz_to_rad_s(omega_khz) / (std::abs(s.g) * s.mu_bohr);
  }
  s.validate();
  return s;
}

inline ScanGrid make_grid(const RunConfig& c) {
  ScanGrid g;
  g.omega_min = units::khz_to_rad_s(c.grid.omega_min_khz);
  g.omega_max = units::khz_to_rad_s(c.grid.omega_max_khz);
  g.points = c.grid.points;
  g.phases.clear();
  for (double d : c.grid.phases_deg) g.phases.push_back(units::deg_to_rad(d));
  g.model = model_from_string(c.model);
  g.validate();
  return g;
}

inline IntegratorConfig make_integrator(const RunConfig& c) {
  IntegratorConfig ic;
  ic.rel_tol = c.integrator.rel_tol;
  ic.abs_tol = c.integrator.abs_tol;
  ic.max_step = c.integrator.max_step_us
                    ? units::us_to_s(*c.integrator.max_step_us)
                    : std::numeric_limits<double>::infinity();
  ic.t_cut_multiple = c.integrator.t_cut_multiple;
  ic.samples = c.integrator.samples;
  ic.validate();
  return ic;
}

inline TransmissionModel make_transmission(const RunConfig& c) {
  TransmissionModel tm{c.transmission.scale};
  tm.validate();
  return tm;
}

}  // namespace cepspin
