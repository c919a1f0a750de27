// Full numeric time evolution: symmetric split-operator spectral stepping
// with pulses applied as instantaneous rotations or finite-envelope couplings.
//
// One step applies exp(-i T dt/2) exp(-i V dt) exp(-i T dt/2); T acts
// diagonally in momentum space on both surfaces, V diagonally in position
// space per surface. kinetic_enabled = false selects the impulsive-limit
// model: the kinetic factors are skipped entirely and the ground potential is
// taken at its minimum (V_G -> 0), i.e. the short-time effective Hamiltonian.
#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qecho/analytic.hpp"
#include "qecho/model.hpp"
#include "qecho/state.hpp"

namespace qecho {

struct TimeSeries {
  std::vector<double> times;
  std::vector<Complex> polarization;
  std::vector<double> pop_g, pop_e;
  std::vector<double> x_g, p_g, x_e, p_e;
  std::vector<double> norm;

  std::size_t size() const { return times.size(); }
};

inline constexpr double kWraparoundDensityLimit = 1e-8;

class SplitStepper {
 public:
  SplitStepper(const ModelParams& params, const GridPtr& grid, double dt)
      : params_(params), grid_(grid), dt_(dt), fft_(static_cast<std::size_t>(grid->n)) {
    params_.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("SplitStepper: dt must be > 0");
    const int n = grid_->n;
    phase_v_g_.resize(n);
    phase_v_e_.resize(n);
    for (int j = 0; j < n; ++j) {
      const double x = grid_->x[j];
      const double vg = params_.kinetic_enabled ? potential_ground(params_, x) : 0.0;
      phase_v_g_[j] = std::polar(1.0, -vg * dt_);
      phase_v_e_[j] = std::polar(1.0, -potential_excited(params_, x) * dt_);
    }
    if (params_.kinetic_enabled) {
      phase_t_half_.resize(n);
      for (int k = 0; k < n; ++k) {
        const double p = grid_->p[k];
        phase_t_half_[k] = std::polar(1.0, -p * p / (2.0 * params_.mass) * 0.5 * dt_);
      }
    }
  }

  const ModelParams& params() const { return params_; }
  double dt() const { return dt_; }

  void step(VibronicState& s) const {
    if (s.rep != Rep::position) {
      throw std::invalid_argument("SplitStepper: state must be in position representation");
    }
    if (!s.grid->same_lattice(*grid_)) {
      throw std::invalid_argument("SplitStepper: state grid mismatch");
    }
    kinetic_half(s);
    for (int j = 0; j < grid_->n; ++j) {
      s.amp_g[j] *= phase_v_g_[j];
      s.amp_e[j] *= phase_v_e_[j];
    }
    kinetic_half(s);
  }

  // Potential half replaced by the pointwise 2x2 exponential of
  //   [[V_G(x), -rabi e^{+i theta}/2], [-conj(rabi) e^{-i theta}/2, V_E(x)-v_e0]]
  // (rotating frame at v_e0). Exact via the Pauli closed form.
  void step_coupled(VibronicState& s, Complex rabi, double theta) const {
    if (s.rep != Rep::position) {
      throw std::invalid_argument("SplitStepper: state must be in position representation");
    }
    kinetic_half(s);
    const Complex coupling = -0.5 * rabi * std::polar(1.0, theta);
    for (int j = 0; j < grid_->n; ++j) {
      const double x = grid_->x[j];
      const double vg = params_.kinetic_enabled ? potential_ground(params_, x) : 0.0;
      const double ve = potential_excited(params_, x) - params_.v_e0;
      // H = a*I + b.sigma with bz = (vg-ve)/2, bx - i by = coupling
      const double a = 0.5 * (vg + ve);
      const double bz = 0.5 * (vg - ve);
      const double bnorm = std::sqrt(bz * bz + std::norm(coupling));
      Complex u11, u12, u21, u22;
      if (bnorm * dt_ < 1e-300) {
        u11 = u22 = Complex{1.0, 0.0};
        u12 = u21 = Complex{0.0, 0.0};
      } else {
        const double cb = std::cos(bnorm * dt_);
        const double sb = std::sin(bnorm * dt_) / bnorm;
        u11 = Complex{cb, -sb * bz};
        u22 = Complex{cb, sb * bz};
        u12 = Complex{0.0, -sb} * coupling;
        u21 = Complex{0.0, -sb} * std::conj(coupling);
      }
      const Complex global = std::polar(1.0, -a * dt_);
      const Complex g = s.amp_g[j];
      const Complex e = s.amp_e[j];
      s.amp_g[j] = global * (u11 * g + u12 * e);
      s.amp_e[j] = global * (u21 * g + u22 * e);
    }
    kinetic_half(s);
  }

 private:
  void kinetic_half(VibronicState& s) const {
    if (!params_.kinetic_enabled) return;
    fft_.forward(s.amp_g);
    fft_.forward(s.amp_e);
    for (int k = 0; k < grid_->n; ++k) {
      s.amp_g[k] *= phase_t_half_[k];
      s.amp_e[k] *= phase_t_half_[k];
    }
    fft_.inverse(s.amp_g);
    fft_.inverse(s.amp_e);
  }

  ModelParams params_;
  GridPtr grid_;
  double dt_;
  Fft fft_;
  ComplexVec phase_v_g_, phase_v_e_, phase_t_half_;
};

inline VibronicState split_step(const VibronicState& state, double dt,
                                const ModelParams& params) {
  SplitStepper stepper(params, state.grid, dt);
  VibronicState out = state;
  stepper.step(out);
  return out;
}

inline VibronicState finite_pulse_step(const VibronicState& state, double dt,
                                       Complex rabi, double theta,
                                       const ModelParams& params) {
  SplitStepper stepper(params, state.grid, dt);
  VibronicState out = state;
  stepper.step_coupled(out, rabi, theta);
  return out;
}

namespace detail {

inline void check_wraparound(const VibronicState& pos_state, const VibronicState& mom_state,
                             double t) {
  const auto density_at = [](const VibronicState& s, int j) {
    return (std::norm(s.amp_g[j]) + std::norm(s.amp_e[j])) * s.weight();
  };
  const int n = pos_state.grid->n;
  double worst = 0.0;
  for (int j : {0, 1, n - 2, n - 1}) {
    worst = std::max(worst, density_at(pos_state, j));
  }
  // momentum lattice edge is |p| = p_max, FFT index n/2
  for (int k : {n / 2 - 1, n / 2, n / 2 + 1}) {
    worst = std::max(worst, density_at(mom_state, k));
  }
  if (worst > kWraparoundDensityLimit) {
    throw std::runtime_error(
        "run_schedule: grid wraparound detected at t = " + std::to_string(t) +
        " (edge density " + std::to_string(worst) +
        " > 1e-8); enlarge the grid extent or point count");
  }
}

struct PulseStep {
  int step_index;
  PulseEvent event;
};

inline double gaussian_envelope_rabi(const PulseEvent& p, double t) {
  // integral of rabi(t) over the envelope equals the pulse area
  const double s = p.fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double amp = p.area / (s * std::sqrt(2.0 * kPi));
  const double d = (t - p.t_center) / s;
  return amp * std::exp(-0.5 * d * d);
}

}  // namespace detail

// Steps the ground-state initial packet through [t_start, t_end]. Delta pulses
// are snapped to the nearest step boundary and applied there (between the
// kinetic half-steps of the adjacent steps); gaussian pulses replace the
// potential factor of every step whose interval lies inside +-4.5 fwhm of the
// pulse center, with the envelope sampled at the step midpoint. Observables
// are recorded every record_stride steps, at every pulse boundary (post-pulse
// state), and at the final step. Aborts on grid wraparound.
inline TimeSeries run_schedule(const ModelParams& params, const Schedule& schedule,
                               const GridPtr& grid) {
  validate_schedule(schedule, params);
  const double dt = schedule.dt;
  const int n_steps = static_cast<int>(std::ceil((schedule.t_end - schedule.t_start) / dt - 1e-9));
  std::vector<detail::PulseStep> delta_pulses;
  std::vector<PulseEvent> finite_pulses;
  for (const auto& p : schedule.pulses) {
    if (p.shape == PulseShape::delta) {
      const int idx = static_cast<int>(std::lround((p.t_center - schedule.t_start) / dt));
      delta_pulses.push_back({idx, p});
    } else {
      finite_pulses.push_back(p);
    }
  }
  // expected rephasing step t0 + tau = 2*t_last - t_prev, always recorded
  int echo_step = -1;
  if (delta_pulses.size() >= 2) {
    const auto& a = delta_pulses[delta_pulses.size() - 2];
    const auto& b = delta_pulses.back();
    echo_step = 2 * b.step_index - a.step_index;
  }

  SplitStepper stepper(params, grid, dt);
  VibronicState state = ground_gaussian(grid, params.mass, params.omega);

  TimeSeries out;
  const Fft fft(static_cast<std::size_t>(grid->n));
  const auto record = [&](double t) {
    VibronicState mom = state;
    detail::to_momentum_inplace(*grid, fft, mom.amp_g);
    detail::to_momentum_inplace(*grid, fft, mom.amp_e);
    mom.rep = Rep::momentum;
    detail::check_wraparound(state, mom, t);
    out.times.push_back(t);
    out.polarization.push_back(cross_coherence(state));
    double pg = 0.0, pe = 0.0;
    for (int j = 0; j < grid->n; ++j) {
      pg += std::norm(state.amp_g[j]);
      pe += std::norm(state.amp_e[j]);
    }
    pg *= grid->dx;
    pe *= grid->dx;
    out.pop_g.push_back(pg);
    out.pop_e.push_back(pe);
    out.norm.push_back(std::sqrt(pg + pe));
    out.x_g.push_back(detail::first_moment(grid->x, state.amp_g, grid->dx, pg));
    out.x_e.push_back(detail::first_moment(grid->x, state.amp_e, grid->dx, pe));
    out.p_g.push_back(detail::first_moment(grid->p, mom.amp_g, grid->dp, pg));
    out.p_e.push_back(detail::first_moment(grid->p, mom.amp_e, grid->dp, pe));
  };

  for (int k = 0; k <= n_steps; ++k) {
    const double t = schedule.t_start + k * dt;
    bool pulsed = false;
    for (const auto& dp : delta_pulses) {
      if (dp.step_index == k) {
        state = apply_impulse(state, dp.event.area, dp.event.phase);
        pulsed = true;
      }
    }
    if (pulsed || k % schedule.record_stride == 0 || k == echo_step || k == n_steps) {
      record(t);
    }
    if (k == n_steps) break;
    const double t_mid = t + 0.5 * dt;
    const PulseEvent* active = nullptr;
    for (const auto& fp : finite_pulses) {
      if (std::abs(t_mid - fp.t_center) <= 4.5 * fp.fwhm) active = &fp;
    }
    if (active != nullptr) {
      stepper.step_coupled(state, detail::gaussian_envelope_rabi(*active, t_mid),
                           active->phase);
    } else {
      stepper.step(state);
    }
  }
  return out;
}

// Cat-state interference control: the state just before the second pulse is
// split into its ground and excited components, each branch gets the pulse and
// is propagated separately, and the branch polarizations are summed with a
// randomized relative phase averaged over n_phases draws. A coherent second
// pulse keeps the cross-branch terms; the phase average kills them, so an
// echo that survives this procedure would not be an interference signature.
inline TimeSeries run_incoherent_control(const ModelParams& params,
                                         const Schedule& schedule, const GridPtr& grid,
                                         int n_phases = 64, unsigned seed = 43u) {
  validate_schedule(schedule, params);
  if (schedule.pulses.size() != 2 || schedule.pulses[0].shape != PulseShape::delta ||
      schedule.pulses[1].shape != PulseShape::delta) {
    throw std::invalid_argument("run_incoherent_control: needs exactly two delta pulses");
  }
  const double dt = schedule.dt;
  const int n_steps = static_cast<int>(std::ceil((schedule.t_end - schedule.t_start) / dt - 1e-9));
  const int k1 = static_cast<int>(std::lround((schedule.pulses[0].t_center - schedule.t_start) / dt));
  const int k2 = static_cast<int>(std::lround((schedule.pulses[1].t_center - schedule.t_start) / dt));

  SplitStepper stepper(params, grid, dt);
  VibronicState state = ground_gaussian(grid, params.mass, params.omega);
  state = apply_impulse(state, schedule.pulses[0].area, schedule.pulses[0].phase);
  for (int k = k1; k < k2; ++k) stepper.step(state);

  VibronicState branch_g = state;  // part arriving on |G>
  std::fill(branch_g.amp_e.begin(), branch_g.amp_e.end(), Complex{0.0, 0.0});
  VibronicState branch_e = state;  // part arriving on |E>
  std::fill(branch_e.amp_g.begin(), branch_e.amp_g.end(), Complex{0.0, 0.0});
  branch_g = apply_impulse(branch_g, schedule.pulses[1].area, schedule.pulses[1].phase);
  branch_e = apply_impulse(branch_e, schedule.pulses[1].area, schedule.pulses[1].phase);

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
  Complex phase_sum{0.0, 0.0};
  for (int i = 0; i < n_phases; ++i) phase_sum += std::polar(1.0, uniform(rng));
  const Complex mean_phase = phase_sum / static_cast<double>(n_phases);

  TimeSeries out;
  for (int k = k2; k <= n_steps; ++k) {
    const double t = schedule.t_start + k * dt;
    // P(chi) = P_aa + P_bb + e^{i chi} <e_a|g_b> + e^{-i chi} <e_b|g_a>
    Complex paa{0.0, 0.0}, pbb{0.0, 0.0}, pab{0.0, 0.0}, pba{0.0, 0.0};
    for (int j = 0; j < grid->n; ++j) {
      paa += std::conj(branch_g.amp_e[j]) * branch_g.amp_g[j];
      pbb += std::conj(branch_e.amp_e[j]) * branch_e.amp_g[j];
      pab += std::conj(branch_g.amp_e[j]) * branch_e.amp_g[j];
      pba += std::conj(branch_e.amp_e[j]) * branch_g.amp_g[j];
    }
    const Complex p_avg =
        (paa + pbb + mean_phase * pab + std::conj(mean_phase) * pba) * grid->dx;
    out.times.push_back(t);
    out.polarization.push_back(p_avg);
    out.pop_g.push_back(0.0);
    out.pop_e.push_back(0.0);
    out.x_g.push_back(0.0);
    out.p_g.push_back(0.0);
    out.x_e.push_back(0.0);
    out.p_e.push_back(0.0);
    out.norm.push_back(1.0);
    if (k == n_steps) break;
    stepper.step(branch_g);
    stepper.step(branch_e);
  }
  return out;
}

}  // namespace qecho
