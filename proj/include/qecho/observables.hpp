// Polarization (cross-surface coherence) and echo detection on time series.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qecho/analytic.hpp"
#include "qecho/model.hpp"
#include "qecho/propagator.hpp"
#include "qecho/state.hpp"

namespace qecho {

// P = sum conj(amp_e) amp_g * weight; representation independent (Parseval).
// Transition dipole set to 1 (Condon).
inline Complex polarization(const VibronicState& state) {
  return cross_coherence(state);
}

struct EchoMeasurement {
  double tau = 0.0;
  double t_peak = 0.0;
  double intensity = 0.0;          // windowed |P|^2 peak
  double intensity_at_echo = 0.0;  // |P|^2 at the sample nearest t0 + tau
  double background = 0.0;         // median |P|^2 off the peak
  bool no_echo = false;
};

inline constexpr double kNoEchoAbsoluteFloor = 1e-30;

// Peak of |P|^2 over [t0 + tau/2, t0 + 3 tau/2]. Background is the median
// |P|^2 over the window excluding +-3 sigma_t around the peak; the no-echo
// flag fires below 4x background (or below an absolute floor for identically
// dark runs).
inline EchoMeasurement detect_echo(const TimeSeries& series, double t0, double tau,
                                   double sigma_t) {
  if (!(tau > 0.0)) throw std::invalid_argument("detect_echo: tau must be > 0");
  const double w_lo = t0 + 0.5 * tau;
  const double w_hi = t0 + 1.5 * tau;
  if (series.times.empty() || series.times.front() > w_lo + 1e-12 ||
      series.times.back() < w_hi - 1e-12) {
    throw std::invalid_argument("detect_echo: series does not cover the echo window");
  }
  EchoMeasurement m;
  m.tau = tau;
  bool found = false;
  double d_echo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.times[i];
    if (t < w_lo - 1e-12 || t > w_hi + 1e-12) continue;
    const double v = std::norm(series.polarization[i]);
    if (!found || v > m.intensity) {
      m.intensity = v;
      m.t_peak = t;
      found = true;
    }
    const double de = std::abs(t - (t0 + tau));
    if (de < d_echo) {
      d_echo = de;
      m.intensity_at_echo = v;
    }
  }
  std::vector<double> off_peak;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.times[i];
    if (t < w_lo - 1e-12 || t > w_hi + 1e-12) continue;
    if (std::abs(t - m.t_peak) <= 3.0 * sigma_t) continue;
    off_peak.push_back(std::norm(series.polarization[i]));
  }
  if (!off_peak.empty()) {
    std::nth_element(off_peak.begin(), off_peak.begin() + off_peak.size() / 2,
                     off_peak.end());
    m.background = off_peak[off_peak.size() / 2];
  }
  m.no_echo = (m.intensity < 4.0 * m.background) || (m.intensity < kNoEchoAbsoluteFloor);
  return m;
}

inline EchoMeasurement detect_echo(const TimeSeries& series, double t0, double tau,
                                   const ModelParams& params) {
  return detect_echo(series, t0, tau, echo_sigma_t(params, tau));
}

}  // namespace qecho
