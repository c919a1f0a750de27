// Physical model: potential surfaces, pulse events, schedules, and the
// instantaneous-pulse electronic rotation.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qecho/state.hpp"

namespace qecho {

// Sign convention: force > 0 means d<p>/dt = +force on the excited surface
// (the excited potential is v_e0 - force*x + curvature).
struct ModelParams {
  double mass = 1.0;
  double omega = 1.0;      // ground-surface angular frequency
  double force = 0.0;      // excited-surface force at x = 0
  double v_e0 = 0.0;       // vertical offset V_E(0)
  double omega_e = 0.0;    // optional excited-surface curvature (0 = linear)
  bool kinetic_enabled = true;

  void validate() const {
    if (!(mass > 0.0)) throw std::invalid_argument("ModelParams: mass must be > 0");
    if (!(omega > 0.0)) throw std::invalid_argument("ModelParams: omega must be > 0");
    if (omega_e < 0.0) throw std::invalid_argument("ModelParams: omega_e must be >= 0");
    if (!std::isfinite(force)) throw std::invalid_argument("ModelParams: force must be finite");
  }

  double sigma_x() const { return std::sqrt(1.0 / (2.0 * mass * omega)); }
  double sigma_p() const { return std::sqrt(mass * omega / 2.0); }
};

inline double potential_ground(const ModelParams& params, double x) {
  return 0.5 * params.mass * params.omega * params.omega * x * x;
}

inline double potential_excited(const ModelParams& params, double x) {
  return params.v_e0 - params.force * x +
         0.5 * params.mass * params.omega_e * params.omega_e * x * x;
}

// Echo temporal width for Gaussian packets: |P| ~ exp(-(F dt)^2 / (8 sigma_p^2)).
inline double echo_sigma_t(const ModelParams& params, double tau) {
  if (std::abs(params.force) > 0.0) return 2.0 * params.sigma_p() / std::abs(params.force);
  return tau / 8.0;
}

enum class PulseShape { delta, gaussian };

struct PulseEvent {
  double t_center = 0.0;
  double area = 0.0;   // phi, radians
  double phase = 0.0;  // theta, radians
  PulseShape shape = PulseShape::delta;
  double fwhm = 0.0;   // gaussian envelope only

  void validate() const {
    if (area < 0.0 || area > kTwoPi) {
      throw std::invalid_argument("PulseEvent: area must lie in [0, 2*pi]");
    }
    if (shape == PulseShape::gaussian && !(fwhm > 0.0)) {
      throw std::invalid_argument("PulseEvent: gaussian pulse needs fwhm > 0");
    }
  }
};

// Pointwise electronic rotation (Condon): at every node
//   g' = cos(phi/2) g + i e^{+i theta} sin(phi/2) e
//   e' = i e^{-i theta} sin(phi/2) g + cos(phi/2) e
inline VibronicState apply_impulse(const VibronicState& state, double area,
                                   double phase = 0.0) {
  if (state.rep != Rep::position) {
    throw std::invalid_argument("apply_impulse: state must be in position representation");
  }
  if (area < 0.0 || area > kTwoPi) {
    throw std::invalid_argument("apply_impulse: area must lie in [0, 2*pi]");
  }
  const double c = std::cos(0.5 * area);
  const double s = std::sin(0.5 * area);
  const Complex ge = Complex{0.0, 1.0} * std::polar(s, phase);
  const Complex eg = Complex{0.0, 1.0} * std::polar(s, -phase);
  VibronicState out = state;
  for (int j = 0; j < state.grid->n; ++j) {
    const Complex g = state.amp_g[j];
    const Complex e = state.amp_e[j];
    out.amp_g[j] = c * g + ge * e;
    out.amp_e[j] = eg * g + c * e;
  }
  return out;
}

struct Schedule {
  std::vector<PulseEvent> pulses;
  double t_start = 0.0;
  double t_end = 0.0;
  double dt = 0.0;
  int record_stride = 1;
};

// Fastest dynamical frequency the stepper must resolve. The kinetic scale is
// taken from the momenta the run actually populates (p_occupied), not from
// the grid's Nyquist momentum; occupied momenta are what the splitting error
// depends on, and the resolution guard keeps them far below Nyquist.
inline double max_dynamical_frequency(const ModelParams& params, double p_occupied) {
  double w = std::max(params.omega, params.omega_e);
  if (params.kinetic_enabled) {
    w = std::max(w, p_occupied * p_occupied / (2.0 * params.mass));
  }
  return w;
}

inline double stability_dt_bound(const ModelParams& params, double p_occupied) {
  return kTwoPi / (20.0 * max_dynamical_frequency(params, p_occupied));
}

// Largest momentum a two-pulse schedule can populate (plus Gaussian tails).
inline double occupied_momentum_bound(const ModelParams& params, const Schedule& schedule) {
  double first_pulse = schedule.t_end;
  for (const auto& p : schedule.pulses) first_pulse = std::min(first_pulse, p.t_center);
  const double drive = std::abs(params.force) * std::max(0.0, schedule.t_end - first_pulse);
  return drive + 8.0 * params.sigma_p();
}

inline void validate_schedule(const Schedule& schedule, const ModelParams& params) {
  if (!(schedule.dt > 0.0)) throw std::invalid_argument("Schedule: dt must be > 0");
  if (!(schedule.t_end > schedule.t_start)) {
    throw std::invalid_argument("Schedule: t_end must exceed t_start");
  }
  if (schedule.record_stride < 1) {
    throw std::invalid_argument("Schedule: record_stride must be >= 1");
  }
  double prev = schedule.t_start - 1.0;
  for (const auto& p : schedule.pulses) {
    p.validate();
    if (p.t_center < schedule.t_start || p.t_center > schedule.t_end) {
      throw std::invalid_argument("Schedule: pulse outside [t_start, t_end]");
    }
    if (p.t_center <= prev) {
      throw std::invalid_argument("Schedule: pulses must be strictly ordered in time");
    }
    prev = p.t_center;
  }
  const double bound = stability_dt_bound(params, occupied_momentum_bound(params, schedule));
  if (schedule.dt > bound * (1.0 + 1e-12)) {
    throw std::invalid_argument("Schedule: dt violates the stability bound");
  }
}

}  // namespace qecho
