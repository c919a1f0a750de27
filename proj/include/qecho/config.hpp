// Declarative experiment configs: one JSON document, keys in lower_snake_case,
// unknown keys rejected. The femtosecond preset reads times in fs, omega in
// rad/fs, masses in amu, forces in eV/Angstrom and energies in eV; everything
// is converted to internal hbar = 1 units on resolve.
#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qecho/analysis.hpp"
#include "qecho/experiment.hpp"
#include "qecho/model.hpp"
#include "qecho/units.hpp"

namespace qecho {

using Json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string units = "dimensionless";

  // model (input units)
  double mass = 1.0;
  double omega = 1.0;
  double force = 0.0;
  double v_e0 = 0.0;
  double omega_e = 0.0;
  bool kinetic_enabled = true;

  // pulse
  double area = kPi / 2.0;
  double phase = 0.0;
  std::string shape = "delta";
  double fwhm = 0.0;

  double delay = 1.0;

  // grid
  int grid_n = 4096;
  std::optional<double> grid_extent;  // empty = auto

  // schedule
  std::optional<double> t_end;  // empty = auto
  std::optional<double> dt;     // empty = auto
  int record_stride = 1;

  // sweep
  std::string engine = "full";
  std::optional<std::vector<double>> tau_values;  // empty = auto window
  int sweep_points = 12;

  // resolved quantities, internal units
  ModelParams params;
  double phi_internal = 0.0;
  double theta_internal = 0.0;
  double tau_internal = 0.0;
  double fwhm_internal = 0.0;
  std::optional<double> t_end_internal;
  std::optional<double> dt_internal;
  std::vector<double> tau_values_internal;
  UnitSystem unit_system;
};

namespace detail {

inline void require_known_keys(const Json& obj, const std::string& where,
                               const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& item : obj.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw ConfigError("config: unknown key '" + where + item.key() + "'");
    }
  }
}

inline double require_number(const Json& obj, const std::string& key, double fallback,
                             const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) {
    throw ConfigError("config: '" + where + key + "' must be a number");
  }
  return obj.at(key).get<double>();
}

}  // namespace detail

inline RunConfig parse_config(const Json& j) {
  RunConfig c;
  detail::require_known_keys(
      j, "", {"units", "model", "pulse", "delay", "grid", "schedule", "sweep"});

  if (j.contains("units")) {
    if (!j.at("units").is_string()) throw ConfigError("config: 'units' must be a string");
    c.units = j.at("units").get<std::string>();
    if (c.units != "dimensionless" && c.units != "femtosecond") {
      throw ConfigError("config: units must be 'dimensionless' or 'femtosecond'");
    }
  }

  if (j.contains("model")) {
    const Json& m = j.at("model");
    detail::require_known_keys(
        m, "model.", {"mass", "omega", "force", "v_e0", "omega_e", "kinetic_enabled"});
    c.mass = detail::require_number(m, "mass", c.mass, "model.");
    c.omega = detail::require_number(m, "omega", c.omega, "model.");
    c.force = detail::require_number(m, "force", c.force, "model.");
    c.v_e0 = detail::require_number(m, "v_e0", c.v_e0, "model.");
    c.omega_e = detail::require_number(m, "omega_e", c.omega_e, "model.");
    if (m.contains("kinetic_enabled")) {
      if (!m.at("kinetic_enabled").is_boolean()) {
        throw ConfigError("config: 'model.kinetic_enabled' must be a boolean");
      }
      c.kinetic_enabled = m.at("kinetic_enabled").get<bool>();
    }
  }

  if (j.contains("pulse")) {
    const Json& p = j.at("pulse");
    detail::require_known_keys(p, "pulse.", {"area", "phase", "shape", "fwhm"});
    c.area = detail::require_number(p, "area", c.area, "pulse.");
    c.phase = detail::require_number(p, "phase", c.phase, "pulse.");
    c.fwhm = detail::require_number(p, "fwhm", c.fwhm, "pulse.");
    if (p.contains("shape")) {
      if (!p.at("shape").is_string()) throw ConfigError("config: 'pulse.shape' must be a string");
      c.shape = p.at("shape").get<std::string>();
      if (c.shape != "delta" && c.shape != "gaussian") {
        throw ConfigError("config: pulse.shape must be 'delta' or 'gaussian'");
      }
    }
  }

  if (j.contains("delay")) {
    if (!j.at("delay").is_number()) throw ConfigError("config: 'delay' must be a number");
    c.delay = j.at("delay").get<double>();
  }

  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    detail::require_known_keys(g, "grid.", {"n", "extent"});
    if (g.contains("n")) {
      if (!g.at("n").is_number_integer()) throw ConfigError("config: 'grid.n' must be an integer");
      c.grid_n = g.at("n").get<int>();
    }
    if (g.contains("extent") && !(g.at("extent").is_string() && g.at("extent") == "auto")) {
      if (!g.at("extent").is_number()) {
        throw ConfigError("config: 'grid.extent' must be a number or \"auto\"");
      }
      c.grid_extent = g.at("extent").get<double>();
    }
  }

  if (j.contains("schedule")) {
    const Json& s = j.at("schedule");
    detail::require_known_keys(s, "schedule.", {"t_end", "dt", "record_stride"});
    if (s.contains("t_end") && !(s.at("t_end").is_string() && s.at("t_end") == "auto")) {
      if (!s.at("t_end").is_number()) {
        throw ConfigError("config: 'schedule.t_end' must be a number or \"auto\"");
      }
      c.t_end = s.at("t_end").get<double>();
    }
    if (s.contains("dt") && !(s.at("dt").is_string() && s.at("dt") == "auto")) {
      if (!s.at("dt").is_number()) {
        throw ConfigError("config: 'schedule.dt' must be a number or \"auto\"");
      }
      c.dt = s.at("dt").get<double>();
    }
    if (s.contains("record_stride")) {
      if (!s.at("record_stride").is_number_integer()) {
        throw ConfigError("config: 'schedule.record_stride' must be an integer");
      }
      c.record_stride = s.at("record_stride").get<int>();
    }
  }

  if (j.contains("sweep")) {
    const Json& s = j.at("sweep");
    detail::require_known_keys(s, "sweep.", {"engine", "tau_values", "points"});
    if (s.contains("engine")) {
      if (!s.at("engine").is_string()) throw ConfigError("config: 'sweep.engine' must be a string");
      c.engine = s.at("engine").get<std::string>();
      if (c.engine != "full" && c.engine != "impulsive") {
        throw ConfigError("config: sweep.engine must be 'full' or 'impulsive'");
      }
    }
    if (s.contains("tau_values") &&
        !(s.at("tau_values").is_string() && s.at("tau_values") == "auto")) {
      if (!s.at("tau_values").is_array()) {
        throw ConfigError("config: 'sweep.tau_values' must be an array or \"auto\"");
      }
      std::vector<double> taus;
      for (const auto& v : s.at("tau_values")) {
        if (!v.is_number()) throw ConfigError("config: sweep.tau_values entries must be numbers");
        taus.push_back(v.get<double>());
      }
      c.tau_values = taus;
    }
    if (s.contains("points")) {
      if (!s.at("points").is_number_integer()) {
        throw ConfigError("config: 'sweep.points' must be an integer");
      }
      c.sweep_points = s.at("points").get<int>();
    }
  }

  return c;
}

// Converts input-unit fields to internal hbar = 1 numbers and validates the
// resulting model. All downstream code consumes the *_internal fields.
inline RunConfig resolve_config(RunConfig c) {
  const bool fs = (c.units == "femtosecond");
  c.unit_system = fs ? UnitSystem::femtosecond() : UnitSystem::dimensionless();
  const UnitSystem& u = c.unit_system;

  c.params.mass = fs ? u.amu_to_internal(c.mass) : c.mass;
  c.params.omega = fs ? u.omega_radfs_to_internal(c.omega) : c.omega;
  c.params.force = fs ? u.force_evA_to_internal(c.force) : c.force;
  c.params.v_e0 = fs ? u.ev_to_internal(c.v_e0) : c.v_e0;
  c.params.omega_e = fs ? u.omega_radfs_to_internal(c.omega_e) : c.omega_e;
  c.params.kinetic_enabled = c.kinetic_enabled;

  c.phi_internal = c.area;    // radians in all presets
  c.theta_internal = c.phase;
  c.tau_internal = fs ? u.fs_to_internal(c.delay) : c.delay;
  c.fwhm_internal = fs ? u.fs_to_internal(c.fwhm) : c.fwhm;
  if (c.t_end) c.t_end_internal = fs ? u.fs_to_internal(*c.t_end) : *c.t_end;
  if (c.dt) c.dt_internal = fs ? u.fs_to_internal(*c.dt) : *c.dt;
  if (c.tau_values) {
    for (double t : *c.tau_values) {
      c.tau_values_internal.push_back(fs ? u.fs_to_internal(t) : t);
    }
  }

  try {
    c.params.validate();
    if (!(c.tau_internal > 0.0)) throw std::invalid_argument("delay must be > 0");
    if (c.area < 0.0 || c.area > kTwoPi) {
      throw std::invalid_argument("pulse.area must lie in [0, 2*pi]");
    }
    if (c.shape == "gaussian" && !(c.fwhm_internal > 0.0)) {
      throw std::invalid_argument("gaussian pulse needs fwhm > 0");
    }
    if (c.grid_n < 64 || (c.grid_n & (c.grid_n - 1)) != 0) {
      throw std::invalid_argument("grid.n must be a power of two >= 64");
    }
    if (c.record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
    if (c.sweep_points < 2) throw std::invalid_argument("sweep.points must be >= 2");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

inline RunConfig load_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  return resolve_config(parse_config(j));
}

// Fully materialized config echo (input units plus the resolved internal
// numbers), embedded in every report so runs are reproducible from it.
inline Json config_echo(const RunConfig& c) {
  Json j;
  j["units"] = c.units;
  j["model"] = {{"mass", c.mass},       {"omega", c.omega},
                {"force", c.force},     {"v_e0", c.v_e0},
                {"omega_e", c.omega_e}, {"kinetic_enabled", c.kinetic_enabled}};
  j["pulse"] = {
      {"area", c.area}, {"phase", c.phase}, {"shape", c.shape}, {"fwhm", c.fwhm}};
  j["delay"] = c.delay;
  j["grid"] = Json::object();
  j["grid"]["n"] = c.grid_n;
  if (c.grid_extent) {
    j["grid"]["extent"] = *c.grid_extent;
  } else {
    j["grid"]["extent"] = "auto";
  }
  j["schedule"] = Json::object();
  if (c.t_end) {
    j["schedule"]["t_end"] = *c.t_end;
  } else {
    j["schedule"]["t_end"] = "auto";
  }
  if (c.dt) {
    j["schedule"]["dt"] = *c.dt;
  } else {
    j["schedule"]["dt"] = "auto";
  }
  j["schedule"]["record_stride"] = c.record_stride;
  j["sweep"] = Json::object();
  j["sweep"]["engine"] = c.engine;
  if (c.tau_values) {
    j["sweep"]["tau_values"] = *c.tau_values;
  } else {
    j["sweep"]["tau_values"] = "auto";
  }
  j["sweep"]["points"] = c.sweep_points;
  j["internal"] = {{"mass", c.params.mass},
                   {"omega", c.params.omega},
                   {"force", c.params.force},
                   {"v_e0", c.params.v_e0},
                   {"omega_e", c.params.omega_e},
                   {"phi", c.phi_internal},
                   {"theta", c.theta_internal},
                   {"tau", c.tau_internal}};
  return j;
}

}  // namespace qecho
