// Two-pulse echo experiment assembly: auto-sized grids and schedules with the
// pulses at t0 - tau and t0 = 0 and the rephasing time on the step lattice,
// plus the phase-cycled polarization that isolates the echo pathway.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qecho/analytic.hpp"
#include "qecho/model.hpp"
#include "qecho/propagator.hpp"

namespace qecho {

struct EchoExperiment {
  ModelParams params;
  double phi = 0.0;
  double theta = 0.0;
  double tau = 0.0;
  GridPtr grid;
  Schedule schedule;
};

// Extent covers 12 sigma_x plus the maximal classical excursion with a 50%
// margin, and is never smaller than what resolves the momentum lattice to
// dp <= sigma_p / 8. In the impulsive limit the packets never move in x, so
// only the resolution floor applies. On the full model the drive term is the
// always-excited branch; the de-excited branch is bounded by its harmonic
// turning point rather than a free coast.
inline double auto_grid_extent(const ModelParams& params, double tau, double t_end) {
  const double resolution_floor =
      std::max(18.0 * params.sigma_x(), 16.0 * kPi / params.sigma_p());
  if (!params.kinetic_enabled) return resolution_floor;
  const double T = t_end + tau;  // t_start = -tau
  const double m = params.mass;
  const double f = std::abs(params.force);
  const double coast = std::min((f * tau / m) * T,
                                f * tau * tau / (2.0 * m) + f * tau / (m * params.omega));
  const double excursion = f * T * T / (2.0 * m) + coast;
  return std::max(2.0 * 1.5 * (6.0 * params.sigma_x() + excursion), resolution_floor);
}

inline GridPtr auto_echo_grid(const ModelParams& params, double tau, double t_end,
                              int n = 4096) {
  const double extent = auto_grid_extent(params, tau, t_end);
  auto grid = make_grid(n, extent);
  const double p_need = std::abs(params.force) * (t_end + tau) + 8.0 * params.sigma_p();
  if (grid->p_max() < 1.15 * p_need) {
    throw std::invalid_argument(
        "auto_echo_grid: momentum lattice too coarse for this schedule; increase n");
  }
  return grid;
}

// dt: half the stability bound, fine enough to sample the echo shape, and an
// exact divisor of tau so both pulses and t0 + tau land on step boundaries.
inline double auto_echo_dt(const ModelParams& params, double tau, double t_end) {
  const double p_occ = std::abs(params.force) * (t_end + tau) + 8.0 * params.sigma_p();
  double dt = 0.5 * stability_dt_bound(params, p_occ);
  dt = std::min(dt, tau / 50.0);
  if (std::abs(params.force) > 0.0) {
    dt = std::min(dt, echo_sigma_t(params, tau) / 6.0);
  }
  const int per_tau = static_cast<int>(std::ceil(tau / dt - 1e-12));
  return tau / per_tau;
}

inline EchoExperiment make_echo_experiment(const ModelParams& params, double phi,
                                           double theta, double tau, int n = 4096,
                                           double t_end = 0.0, double dt = 0.0,
                                           int record_stride = 1) {
  params.validate();
  if (!(tau > 0.0)) throw std::invalid_argument("make_echo_experiment: tau must be > 0");
  EchoExperiment ex;
  ex.params = params;
  ex.phi = phi;
  ex.theta = theta;
  ex.tau = tau;
  if (t_end <= 0.0) t_end = 1.8 * tau;
  if (dt <= 0.0) dt = auto_echo_dt(params, tau, t_end);
  ex.grid = auto_echo_grid(params, tau, t_end, n);
  ex.schedule.t_start = -tau;
  ex.schedule.t_end = t_end;
  ex.schedule.dt = dt;
  ex.schedule.record_stride = record_stride;
  ex.schedule.pulses = {PulseEvent{-tau, phi, theta, PulseShape::delta, 0.0},
                        PulseEvent{0.0, phi, theta, PulseShape::delta, 0.0}};
  return ex;
}

enum class Engine { impulsive, full };

// Polarization of the echo pathway only: the second pulse is cycled over four
// phases theta + j*pi/2 and the runs combined with weights (-1)^j / 4, which
// keeps exactly the e^{i(2 theta_2 - theta_1)} coherence (the rephasing term)
// and cancels the free-induction pathways.
inline TimeSeries echo_pathway_series(const EchoExperiment& ex, Engine engine) {
  TimeSeries cycled;
  for (int j = 0; j < 4; ++j) {
    const double theta2 = ex.theta + j * 0.5 * kPi;
    const double w = (j % 2 == 0) ? 0.25 : -0.25;
    if (engine == Engine::full) {
      Schedule sched = ex.schedule;
      sched.pulses[1].phase = theta2;
      TimeSeries run = run_schedule(ex.params, sched, ex.grid);
      if (j == 0) {
        cycled = run;
        for (auto& p : cycled.polarization) p *= w;
      } else {
        if (run.size() != cycled.size()) {
          throw std::runtime_error("echo_pathway_series: cycle runs disagree in shape");
        }
        for (std::size_t i = 0; i < run.size(); ++i) {
          cycled.polarization[i] += w * run.polarization[i];
        }
      }
    } else {
      if (j == 0) {
        const int n_steps = static_cast<int>(
            std::ceil((ex.schedule.t_end - ex.schedule.t_start) / ex.schedule.dt - 1e-9));
        const int k2 = static_cast<int>(std::lround(ex.tau / ex.schedule.dt));
        cycled.times.clear();
        for (int k = k2; k <= n_steps; ++k) {
          cycled.times.push_back(ex.schedule.t_start + k * ex.schedule.dt);
        }
        cycled.polarization.assign(cycled.times.size(), Complex{0.0, 0.0});
      }
      // t0 = 0, so the recorded times are already measured from the second pulse
      const auto series = impulsive_polarization_series(ex.phi, ex.tau, ex.params, ex.grid,
                                                        cycled.times, ex.theta, theta2);
      for (std::size_t i = 0; i < series.size(); ++i) cycled.polarization[i] += w * series[i];
    }
  }
  return cycled;
}

}  // namespace qecho
