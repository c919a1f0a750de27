// Polarization and echo detection.
#include <cmath>

#include "doctest.h"
#include "qecho/experiment.hpp"
#include "qecho/observables.hpp"
#include "test_support.hpp"

using namespace qecho;

namespace {
ModelParams model(double force, bool kinetic = false) {
  ModelParams p;
  p.mass = 1.0;
  p.omega = 1.0;
  p.force = force;
  p.kinetic_enabled = kinetic;
  return p;
}
}  // namespace

TEST_CASE("polarization: one impulse gives sin(phi)/2 on identical packets") {
  auto g = make_grid(512, 30.0);
  for (double phi : {0.4, kPi / 3.0, kPi / 2.0}) {
    const VibronicState s = apply_impulse(ground_gaussian(g, 1.0, 1.0), phi);
    CHECK(std::abs(polarization(s)) ==
          doctest::Approx(0.5 * std::sin(phi)).epsilon(1e-12));
  }
  const VibronicState dark = ground_gaussian(g, 1.0, 1.0);
  CHECK(std::abs(polarization(dark)) == 0.0);
}

TEST_CASE("polarization: separated packets are dark; Cauchy-Schwarz bound") {
  auto g = make_grid(2048, 80.0);
  const ModelParams p = model(1.0);
  VibronicState s = apply_impulse(ground_gaussian(g, 1.0, 1.0), kPi / 2.0);
  // push the excited packet 10 sigma_p away
  s = shift_evolve(s, 10.0 * p.sigma_p() / p.force, p);
  const double weights = 0.5;  // sin(pi/4) cos(pi/4)
  CHECK(std::abs(polarization(s)) < 1e-5 * weights);

  const Expectations e = expectations(s);
  CHECK(std::abs(polarization(s)) <= std::sqrt(e.pop_g * e.pop_e) + 1e-15);
}

TEST_CASE("polarization: identical in both representations") {
  auto g = make_grid(256, 25.6);
  const VibronicState s = testing::random_state(g, 51u);
  const Complex a = polarization(s);
  const Complex b = polarization(change_representation(s, Rep::momentum));
  CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("detect_echo: dark run raises the no-echo flag") {
  const ModelParams p = model(3.0);
  const EchoExperiment ex = make_echo_experiment(p, 0.0, 0.0, 1.0, 512);
  const TimeSeries run = run_schedule(p, ex.schedule, ex.grid);
  const EchoMeasurement m = detect_echo(run, 0.0, 1.0, p);
  CHECK(m.no_echo);
}

TEST_CASE("detect_echo: impulsive two-pulse echo value and timing") {
  const ModelParams p = model(3.0);
  const double tau = 6.0 * p.sigma_p() / p.force;
  const EchoExperiment ex = make_echo_experiment(p, kPi / 2.0, 0.0, tau, 2048);
  const TimeSeries run = run_schedule(p, ex.schedule, ex.grid);
  const EchoMeasurement m = detect_echo(run, 0.0, tau, p);
  CHECK(std::abs(m.t_peak - tau) <= 2.0 * ex.schedule.dt);
  CHECK(m.intensity == doctest::Approx(0.0625).epsilon(0.08));
  CHECK(std::abs(m.intensity - 0.0625) < 0.005);
  CHECK_FALSE(m.no_echo);

  // with the kinetic term on, decay has begun
  ModelParams pk = p;
  pk.kinetic_enabled = true;
  const EchoExperiment exk = make_echo_experiment(pk, kPi / 2.0, 0.0, tau, 2048);
  const TimeSeries runk = run_schedule(pk, exk.schedule, exk.grid);
  const EchoMeasurement mk = detect_echo(runk, 0.0, tau, pk);
  CHECK(mk.intensity_at_echo < m.intensity_at_echo);
}

TEST_CASE("detect_echo: window coverage is required") {
  const ModelParams p = model(3.0);
  const double tau = 2.0;
  EchoExperiment ex = make_echo_experiment(p, kPi / 2.0, 0.0, tau, 1024, 1.2 * tau);
  const TimeSeries run = run_schedule(p, ex.schedule, ex.grid);
  CHECK_THROWS_AS(detect_echo(run, 0.0, tau, p), std::invalid_argument);
}

TEST_CASE("detect_echo: stride refinement moves the answer very little") {
  const ModelParams p = model(3.0);
  const double tau = 2.0;
  EchoExperiment fine = make_echo_experiment(p, kPi / 2.0, 0.0, tau, 2048);
  EchoExperiment coarse = fine;
  coarse.schedule.record_stride = 4;
  const EchoMeasurement mf =
      detect_echo(run_schedule(p, fine.schedule, fine.grid), 0.0, tau, p);
  const EchoMeasurement mc =
      detect_echo(run_schedule(p, coarse.schedule, coarse.grid), 0.0, tau, p);
  CHECK(std::abs(mf.t_peak - mc.t_peak) <= 2.0 * fine.schedule.dt);
  CHECK(std::abs(mf.intensity - mc.intensity) <= 0.01 * mf.intensity);
}

TEST_CASE("echo intensity is invariant under a global pulse phase") {
  const ModelParams p = model(3.0);
  const double tau = 2.0;
  const EchoExperiment ex0 = make_echo_experiment(p, kPi / 2.0, 0.0, tau, 2048);
  const EchoExperiment ex1 = make_echo_experiment(p, kPi / 2.0, 1.1, tau, 2048);
  const EchoMeasurement m0 =
      detect_echo(run_schedule(p, ex0.schedule, ex0.grid), 0.0, tau, p);
  const EchoMeasurement m1 =
      detect_echo(run_schedule(p, ex1.schedule, ex1.grid), 0.0, tau, p);
  CHECK(std::abs(m0.intensity - m1.intensity) < 1e-10);
}

TEST_CASE("Cauchy-Schwarz holds at every recorded time of a full run") {
  ModelParams p = model(2.0, true);
  const EchoExperiment ex = make_echo_experiment(p, kPi / 3.0, 0.0, 0.8, 1024);
  const TimeSeries run = run_schedule(p, ex.schedule, ex.grid);
  for (std::size_t i = 0; i < run.size(); ++i) {
    CHECK(std::abs(run.polarization[i]) <=
          std::sqrt(run.pop_g[i] * run.pop_e[i]) + 1e-12);
  }
}
