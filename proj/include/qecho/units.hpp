// Unit system: internal computations are dimensionless with hbar = 1.
// A preset is fixed by a time scale and a mass scale; length and energy
// follow from hbar = 1.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace qecho {

inline constexpr double kHbarSI = 1.054571817e-34;       // J s
inline constexpr double kAmuSI = 1.66053906660e-27;      // kg
inline constexpr double kElectronVoltSI = 1.602176634e-19;  // J
inline constexpr double kFemtosecondSI = 1.0e-15;        // s
inline constexpr double kAngstromSI = 1.0e-10;           // m

struct UnitSystem {
  double time_unit = 1.0;    // seconds per internal time unit
  double mass_unit = 1.0;    // kilograms per internal mass unit
  double length_unit = 1.0;  // meters per internal length unit
  double energy_unit = 1.0;  // joules per internal energy unit

  // Internal numbers are taken at face value; hbar = 1 by convention.
  static UnitSystem dimensionless() { return UnitSystem{}; }

  // 1 internal time unit = 10 fs, 1 internal mass unit = 1 amu. The ~20 fs
  // validity window of the short-time model is then tau ~ 2 internal units.
  static UnitSystem femtosecond() {
    return from_time_mass(10.0 * kFemtosecondSI, kAmuSI);
  }

  static UnitSystem from_time_mass(double time_unit_s, double mass_unit_kg) {
    if (!(time_unit_s > 0.0) || !(mass_unit_kg > 0.0)) {
      throw std::invalid_argument("UnitSystem: scales must be positive");
    }
    UnitSystem u;
    u.time_unit = time_unit_s;
    u.mass_unit = mass_unit_kg;
    u.energy_unit = kHbarSI / time_unit_s;
    u.length_unit = std::sqrt(kHbarSI * time_unit_s / mass_unit_kg);
    return u;
  }

  double time_to_internal(double seconds) const { return seconds / time_unit; }
  double time_to_physical(double internal) const { return internal * time_unit; }
  double mass_to_internal(double kg) const { return kg / mass_unit; }
  double mass_to_physical(double internal) const { return internal * mass_unit; }
  double length_to_internal(double m) const { return m / length_unit; }
  double length_to_physical(double internal) const { return internal * length_unit; }
  double energy_to_internal(double joule) const { return joule / energy_unit; }
  double energy_to_physical(double internal) const { return internal * energy_unit; }

  // Convenience for the femtosecond preset's input conventions.
  double fs_to_internal(double fs) const { return time_to_internal(fs * kFemtosecondSI); }
  double omega_radfs_to_internal(double rad_per_fs) const {
    return rad_per_fs / kFemtosecondSI * time_unit;
  }
  double amu_to_internal(double amu) const { return mass_to_internal(amu * kAmuSI); }
  double ev_to_internal(double ev) const { return energy_to_internal(ev * kElectronVoltSI); }
  double force_evA_to_internal(double ev_per_angstrom) const {
    const double si = ev_per_angstrom * kElectronVoltSI / kAngstromSI;  // J/m
    return si / (energy_unit / length_unit);
  }
};

}  // namespace qecho
