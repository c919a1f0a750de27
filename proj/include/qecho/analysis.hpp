// Delay sweeps, decay-law fitting, exponent model selection, and the bundled
// self-validation checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qecho/experiment.hpp"
#include "qecho/observables.hpp"

namespace qecho {

struct SweepRow {
  double tau = 0.0;
  double intensity = 0.0;  // echo-pathway |P|^2 at t0 + tau
  double t_peak = 0.0;
  bool no_echo = false;
  bool regime_flag = false;        // Omega * tau > 1: outside the short-time regime
  bool separation_warning = false; // F * tau < 6 sigma_p: packets overlap in momentum
};

struct SweepResult {
  std::vector<SweepRow> rows;
  ModelParams params;
  double phi = 0.0;
  Engine engine = Engine::full;
};

// Window where the predicted decay stays in [lo, hi]; points are uniform in
// tau. Below 0.2 the short-time regime is typically gone, above 0.95 the
// decay is lost in fit noise.
inline std::vector<double> auto_tau_window(const ModelParams& params, int points = 12,
                                           double lo = 0.2, double hi = 0.95) {
  if (points < 2) throw std::invalid_argument("auto_tau_window: need >= 2 points");
  const double c = predicted_echo_intensity(0.0, params).coefficient;
  if (!(c > 0.0)) {
    throw std::invalid_argument("auto_tau_window: no predicted decay (force == 0?)");
  }
  const double tau_hi = std::pow(std::log(1.0 / lo) / c, 0.25);
  const double tau_lo = std::pow(std::log(1.0 / hi) / c, 0.25);
  std::vector<double> taus(points);
  for (int i = 0; i < points; ++i) {
    taus[i] = tau_lo + (tau_hi - tau_lo) * i / (points - 1);
  }
  return taus;
}

inline SweepResult sweep_tau(const ModelParams& params, double phi,
                             const std::vector<double>& taus, Engine engine,
                             int grid_n = 4096, double theta = 0.0) {
  if (taus.empty()) throw std::invalid_argument("sweep_tau: empty tau list");
  for (std::size_t i = 1; i < taus.size(); ++i) {
    if (!(taus[i] > taus[i - 1])) {
      throw std::invalid_argument("sweep_tau: tau values must be strictly increasing");
    }
  }
  SweepResult result;
  result.params = params;
  result.phi = phi;
  result.engine = engine;
  for (double tau : taus) {
    const EchoExperiment ex = make_echo_experiment(params, phi, theta, tau, grid_n);
    const TimeSeries series = echo_pathway_series(ex, engine);
    const EchoMeasurement m = detect_echo(series, 0.0, tau, params);
    SweepRow row;
    row.tau = tau;
    row.intensity = m.intensity_at_echo;
    row.t_peak = m.t_peak;
    row.no_echo = m.no_echo;
    row.regime_flag = params.omega * tau > 1.0;
    row.separation_warning =
        std::abs(params.force) * tau < 6.0 * params.sigma_p();
    result.rows.push_back(row);
  }
  return result;
}

struct DecayFit {
  double i0 = 0.0;
  double c = 0.0;
  double q = 4.0;
  double rms_residual = 0.0;  // in ln intensity
  double c_fixed_q4 = 0.0;
  double i0_fixed_q4 = 0.0;
  double rms_fixed_q4 = 0.0;
  bool flagged_flat = false;
};

namespace detail {

struct LnFitData {
  std::vector<double> tau;
  std::vector<double> ln_i;
};

inline LnFitData usable_rows(const SweepResult& sweep) {
  LnFitData d;
  for (const auto& r : sweep.rows) {
    if (r.no_echo || r.regime_flag) continue;
    if (!(r.intensity > 0.0)) continue;
    d.tau.push_back(r.tau);
    d.ln_i.push_back(std::log(r.intensity));
  }
  return d;
}

// Exact linear least squares of ln I = ln I0 - c tau^q at fixed q.
// Returns rms residual; outputs (ln I0, c).
inline double lls_at_q(const LnFitData& d, double q, double* ln_i0, double* c) {
  const std::size_t n = d.tau.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::pow(d.tau[i], q);
    sx += x;
    sy += d.ln_i[i];
    sxx += x * x;
    sxy += x * d.ln_i[i];
  }
  const double den = n * sxx - sx * sx;
  double slope = 0.0, intercept = sy / n;
  if (std::abs(den) > 0.0) {
    slope = (n * sxy - sx * sy) / den;
    intercept = (sy - slope * sx) / n;
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = d.ln_i[i] - (intercept + slope * std::pow(d.tau[i], q));
    ss += r * r;
  }
  *ln_i0 = intercept;
  *c = -slope;
  return std::sqrt(ss / n);
}

}  // namespace detail

inline constexpr double kFitQMin = 0.5;
inline constexpr double kFitQMax = 8.0;

// ln-space least squares with the exponent found by a 50-point coarse scan
// followed by golden-section refinement (fixed iteration count, deterministic).
inline DecayFit fit_decay(const SweepResult& sweep) {
  const detail::LnFitData d = detail::usable_rows(sweep);
  if (d.tau.size() < 6) {
    throw std::invalid_argument("fit_decay: need at least 6 usable rows");
  }
  DecayFit fit;
  double ln_i0 = 0.0, c = 0.0;
  fit.rms_fixed_q4 = detail::lls_at_q(d, 4.0, &ln_i0, &c);
  fit.c_fixed_q4 = c;
  fit.i0_fixed_q4 = std::exp(ln_i0);

  const auto minmax = std::minmax_element(d.ln_i.begin(), d.ln_i.end());
  if (*minmax.second - *minmax.first < 1e-9) {
    fit.flagged_flat = true;
    fit.q = std::numeric_limits<double>::quiet_NaN();
    fit.c = 0.0;
    double flat_i0 = 0.0;
    for (double y : d.ln_i) flat_i0 += y;
    fit.i0 = std::exp(flat_i0 / d.ln_i.size());
    fit.rms_residual = 0.0;
    return fit;
  }

  const int kScan = 50;
  double best_q = kFitQMin, best_rms = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) {
    const double q = kFitQMin + (kFitQMax - kFitQMin) * i / (kScan - 1);
    const double rms = detail::lls_at_q(d, q, &ln_i0, &c);
    if (rms < best_rms) {
      best_rms = rms;
      best_q = q;
    }
  }
  const double scan_step = (kFitQMax - kFitQMin) / (kScan - 1);
  double a = std::max(kFitQMin, best_q - scan_step);
  double b = std::min(kFitQMax, best_q + scan_step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double c1 = b - inv_phi * (b - a);
    const double c2 = a + inv_phi * (b - a);
    double tmp_i0, tmp_c;
    if (detail::lls_at_q(d, c1, &tmp_i0, &tmp_c) <
        detail::lls_at_q(d, c2, &tmp_i0, &tmp_c)) {
      b = c2;
    } else {
      a = c1;
    }
  }
  fit.q = 0.5 * (a + b);
  fit.rms_residual = detail::lls_at_q(d, fit.q, &ln_i0, &c);
  fit.i0 = std::exp(ln_i0);
  fit.c = c;
  return fit;
}

struct ModelCandidate {
  double q = 0.0;
  double i0 = 0.0;
  double c = 0.0;
  double rms = 0.0;
};

struct ModelComparison {
  std::vector<ModelCandidate> candidates;  // q = 1, 2, 4
  double winner_q = 0.0;                   // 0 means indeterminate
  double margin = 0.0;                     // runner-up rms / winner rms
  bool indeterminate = false;
};

inline ModelComparison compare_models(const SweepResult& sweep) {
  const detail::LnFitData d = detail::usable_rows(sweep);
  if (d.tau.size() < 6) {
    throw std::invalid_argument("compare_models: need at least 6 usable rows");
  }
  ModelComparison out;
  const auto minmax = std::minmax_element(d.ln_i.begin(), d.ln_i.end());
  if (*minmax.second - *minmax.first < 1e-9) {
    out.indeterminate = true;
    return out;
  }
  for (double q : {1.0, 2.0, 4.0}) {
    ModelCandidate cand;
    cand.q = q;
    double ln_i0 = 0.0;
    cand.rms = detail::lls_at_q(d, q, &ln_i0, &cand.c);
    cand.i0 = std::exp(ln_i0);
    out.candidates.push_back(cand);
  }
  const auto* winner = &out.candidates[0];
  for (const auto& c : out.candidates) {
    if (c.rms < winner->rms) winner = &c;
  }
  double runner_up = std::numeric_limits<double>::infinity();
  for (const auto& c : out.candidates) {
    if (&c != winner) runner_up = std::min(runner_up, c.rms);
  }
  out.winner_q = winner->q;
  out.margin = winner->rms > 0.0 ? runner_up / winner->rms
                                 : std::numeric_limits<double>::infinity();
  return out;
}

struct ValidationItem {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double limit = 0.0;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  bool all_pass() const {
    for (const auto& i : items) {
      if (!i.pass) return false;
    }
    return true;
  }
};

namespace detail {

inline double max_pointwise_deviation(const VibronicState& a, const VibronicState& b) {
  double worst = 0.0;
  for (int j = 0; j < a.grid->n; ++j) {
    worst = std::max(worst, std::abs(a.amp_g[j] - b.amp_g[j]));
    worst = std::max(worst, std::abs(a.amp_e[j] - b.amp_e[j]));
  }
  return worst;
}

// Final state of the two-pulse run without recording overhead.
inline VibronicState propagate_two_pulse(const ModelParams& params, const Schedule& sched,
                                         const GridPtr& grid) {
  SplitStepper stepper(params, grid, sched.dt);
  VibronicState s = ground_gaussian(grid, params.mass, params.omega);
  const int n_steps =
      static_cast<int>(std::ceil((sched.t_end - sched.t_start) / sched.dt - 1e-9));
  for (int k = 0; k <= n_steps; ++k) {
    for (const auto& p : sched.pulses) {
      const int idx = static_cast<int>(std::lround((p.t_center - sched.t_start) / sched.dt));
      if (idx == k) s = apply_impulse(s, p.area, p.phase);
    }
    if (k == n_steps) break;
    stepper.step(s);
  }
  return s;
}

}  // namespace detail

// Bundled oracle-equivalence and convergence checks. Failures are report
// entries, not exceptions.
inline ValidationReport validate_pipeline(const ModelParams& base_params, double phi,
                                          int grid_n = 1024, double dt_override = 0.0,
                                          double extent_override = 0.0) {
  ValidationReport report;

  {  // impulsive-limit equivalence: kinetic-off stepping vs analytic model
    ModelParams params = base_params;
    params.kinetic_enabled = false;
    const double tau = 6.5 * params.sigma_p() / std::max(1.0, std::abs(params.force));
    EchoExperiment ex = make_echo_experiment(params, phi, 0.0, tau, grid_n, 1.5 * tau);
    if (dt_override > 0.0) {
      const int per = std::max(1, static_cast<int>(std::lround(tau / dt_override)));
      ex.schedule.dt = tau / per;
    }
    if (extent_override > 0.0) ex.grid = make_grid(grid_n, extent_override);
    ValidationItem item{"impulsive_equivalence", false, 0.0, 1e-8};
    try {
      const VibronicState numeric =
          detail::propagate_two_pulse(params, ex.schedule, ex.grid);
      const int n_steps = static_cast<int>(
          std::ceil((ex.schedule.t_end - ex.schedule.t_start) / ex.schedule.dt - 1e-9));
      const double t_final = ex.schedule.t_start + n_steps * ex.schedule.dt;
      const VibronicState analytic =
          cat_after_two_pulses(phi, tau, t_final, params, ex.grid);
      item.measured = detail::max_pointwise_deviation(numeric, analytic);
      item.pass = item.measured <= item.limit;
    } catch (const std::exception&) {
      item.measured = std::numeric_limits<double>::infinity();
    }
    report.items.push_back(item);
  }

  {  // coherent-state period return under the full propagator
    ModelParams params = base_params;
    params.kinetic_enabled = true;
    params.force = 0.0;
    const double period = kTwoPi / params.omega;
    const double dt = dt_override > 0.0 ? dt_override : period / 2000.0;
    const int steps = static_cast<int>(std::lround(period / dt));
    const double x0 = 2.0 * params.sigma_x() * std::sqrt(2.0);
    const double extent =
        extent_override > 0.0 ? extent_override : 2.0 * (12.0 * params.sigma_x() + 2.0 * x0);
    ValidationItem item{"coherent_state_period", false, 0.0, 1e-6};
    try {
      auto grid = make_grid(grid_n, extent);
      const VibronicState initial =
          ground_gaussian(grid, params.mass, params.omega, x0, 0.0);
      SplitStepper stepper(params, grid, period / steps);
      VibronicState s = initial;
      for (int k = 0; k < steps; ++k) stepper.step(s);
      const double fidelity = std::norm(overlap(initial, s));
      item.measured = 1.0 - fidelity;
      item.pass = item.measured <= item.limit;
    } catch (const std::exception&) {
      item.measured = std::numeric_limits<double>::infinity();
    }
    report.items.push_back(item);
  }

  {  // second-order convergence: halving dt vs a dt/4 reference, with the
     // step counts scaled so every run ends at exactly the same time
    ModelParams params = base_params;
    params.kinetic_enabled = true;
    const double tau = std::min(0.5 / params.omega,
                                6.5 * params.sigma_p() / std::max(1.0, std::abs(params.force)));
    ValidationItem item{"convergence_order", false, 0.0, 3.5};
    try {
      EchoExperiment ex = make_echo_experiment(params, phi, 0.0, tau, grid_n, 1.2 * tau);
      const double dt = dt_override > 0.0 ? dt_override : ex.schedule.dt;
      const int base_steps = static_cast<int>(
          std::ceil((ex.schedule.t_end - ex.schedule.t_start) / dt - 1e-9));
      const int base_k2 = static_cast<int>(std::lround(tau / dt));
      const auto final_state = [&](int refine) {
        SplitStepper stepper(params, ex.grid, dt / refine);
        VibronicState s = ground_gaussian(ex.grid, params.mass, params.omega);
        const int n_steps = base_steps * refine;
        const int k2 = base_k2 * refine;
        for (int k = 0; k <= n_steps; ++k) {
          if (k == 0 || k == k2) s = apply_impulse(s, phi, 0.0);
          if (k == n_steps) break;
          stepper.step(s);
        }
        return s;
      };
      const VibronicState ref = final_state(4);
      const double err_full = detail::max_pointwise_deviation(final_state(1), ref);
      const double err_half = detail::max_pointwise_deviation(final_state(2), ref);
      item.measured = err_half > 0.0 ? err_full / err_half : 0.0;
      item.pass = item.measured >= item.limit;
    } catch (const std::exception&) {
      item.measured = 0.0;
    }
    report.items.push_back(item);
  }

  {  // two-pulse cat-state component weights at t0
    ModelParams params = base_params;
    params.kinetic_enabled = false;
    const double want_hi = std::cos(0.5 * phi) * std::cos(0.5 * phi);
    const double want_lo = std::sin(0.5 * phi) * std::sin(0.5 * phi);
    const double tau = 8.0 * params.sigma_p() / std::max(0.5, std::abs(params.force));
    ValidationItem item{"cat_state_weights", false, 0.0, 1e-4};
    try {
      auto grid = auto_echo_grid(params, tau, 0.5 * tau, grid_n);
      const VibronicState cat = cat_after_two_pulses(phi, tau, 0.0, params, grid);
      const double w0 = momentum_peak_weight(cat, Surface::ground, 0.0, params);
      const double w1 =
          momentum_peak_weight(cat, Surface::ground, params.force * tau, params);
      item.measured =
          std::max(std::abs(w0 - want_hi), std::abs(w1 - want_lo));
      item.pass = item.measured <= item.limit;
    } catch (const std::exception&) {
      item.measured = std::numeric_limits<double>::infinity();
    }
    report.items.push_back(item);
  }

  {  // dt respects the stability bound for the configured echo run
    ModelParams params = base_params;
    const double tau = 6.5 * params.sigma_p() / std::max(1.0, std::abs(params.force));
    ValidationItem item{"dt_stability_bound", false, 0.0, 1.0};
    try {
      EchoExperiment ex = make_echo_experiment(params, phi, 0.0, tau, grid_n);
      double dt = dt_override > 0.0 ? dt_override : ex.schedule.dt;
      const double bound =
          stability_dt_bound(params, occupied_momentum_bound(params, ex.schedule));
      item.measured = dt / bound;
      item.pass = item.measured <= item.limit;
    } catch (const std::exception&) {
      item.measured = std::numeric_limits<double>::infinity();
    }
    report.items.push_back(item);
  }

  {  // wraparound guard on the configured grid
    ModelParams params = base_params;
    const double tau = 6.5 * params.sigma_p() / std::max(1.0, std::abs(params.force));
    ValidationItem item{"grid_wraparound_guard", false, 0.0, kWraparoundDensityLimit};
    try {
      EchoExperiment ex = make_echo_experiment(params, phi, 0.0, tau, grid_n);
      if (extent_override > 0.0) ex.grid = make_grid(grid_n, extent_override);
      ex.schedule.record_stride = 8;
      run_schedule(params, ex.schedule, ex.grid);
      item.measured = 0.0;
      item.pass = true;
    } catch (const std::exception&) {
      item.measured = std::numeric_limits<double>::infinity();
    }
    report.items.push_back(item);
  }

  return report;
}

}  // namespace qecho
