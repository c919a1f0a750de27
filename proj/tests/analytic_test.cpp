// Impulsive-limit model: shift evolution, cat construction, echo amplitude,
// quartic decay prediction.
#include <cmath>
#include <cstring>

#include "doctest.h"
#include "qecho/analytic.hpp"
#include "test_support.hpp"

using namespace qecho;

namespace {
ModelParams linear_model(double force, double v_e0 = 0.0) {
  ModelParams p;
  p.mass = 1.0;
  p.omega = 1.0;
  p.force = force;
  p.v_e0 = v_e0;
  p.kinetic_enabled = false;
  return p;
}
}  // namespace

TEST_CASE("shift_evolve: dt = 0 is the identity; ground amplitudes untouched") {
  auto g = make_grid(512, 30.0);
  const ModelParams p = linear_model(0.2, 1.3);
  VibronicState s = apply_impulse(ground_gaussian(g, 1.0, 1.0), kPi / 3.0);
  const VibronicState out0 = shift_evolve(s, 0.0, p);
  for (int j = 0; j < g->n; ++j) {
    CHECK(out0.amp_g[j] == s.amp_g[j]);
    CHECK(out0.amp_e[j] == s.amp_e[j]);
  }
  const VibronicState out = shift_evolve(s, 5.0, p);
  // ground component bitwise unchanged
  CHECK(std::memcmp(out.amp_g.data(), s.amp_g.data(), sizeof(Complex) * g->n) == 0);
  CHECK_THROWS_AS(shift_evolve(s, -1.0, p), std::invalid_argument);
}

TEST_CASE("shift_evolve: excited packet momentum moves by F dt") {
  auto g = make_grid(1024, 40.0);
  const ModelParams p = linear_model(0.2);
  VibronicState s = apply_impulse(ground_gaussian(g, 1.0, 1.0), kPi);  // pure excited
  const VibronicState out = shift_evolve(s, 5.0, p);
  const Expectations e = expectations(out);
  CHECK(std::abs(e.p_e - 1.0) < g->dp / 10.0);
}

TEST_CASE("shift_evolve: unitary, additive composition, momentum-rep round trip") {
  auto g = make_grid(256, 25.6);
  const ModelParams p = linear_model(0.7, 0.4);
  const VibronicState s = testing::random_state(g, 31u);
  CHECK(std::abs(norm_squared(shift_evolve(s, 2.0, p)) - 1.0) < 1e-12);

  const VibronicState split = shift_evolve(shift_evolve(s, 0.8, p), 1.2, p);
  const VibronicState direct = shift_evolve(s, 2.0, p);
  double worst = 0.0;
  for (int j = 0; j < g->n; ++j) {
    worst = std::max(worst, std::abs(split.amp_e[j] - direct.amp_e[j]));
  }
  CHECK(worst < 1e-12);

  // same operation through the momentum representation
  const VibronicState mom = shift_evolve(change_representation(s, Rep::momentum), 2.0, p);
  const VibronicState back = change_representation(mom, Rep::position);
  worst = 0.0;
  for (int j = 0; j < g->n; ++j) {
    worst = std::max(worst, std::abs(back.amp_e[j] - direct.amp_e[j]));
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("cat_after_two_pulses: degenerate areas") {
  const ModelParams p = linear_model(3.0);
  auto g = make_grid(2048, 60.0);

  // phi = 0: nothing happens
  const VibronicState plain = cat_after_two_pulses(0.0, 2.0, 1.0, p, g);
  const VibronicState ref = ground_gaussian(g, 1.0, 1.0);
  double worst = 0.0;
  for (int j = 0; j < g->n; ++j) {
    worst = std::max(worst, std::abs(plain.amp_g[j] - ref.amp_g[j]));
    worst = std::max(worst, std::abs(plain.amp_e[j]));
  }
  CHECK(worst < 1e-12);

  // phi = pi: no excited amplitude survives, ground fully shifted to F tau
  const VibronicState flipped = cat_after_two_pulses(kPi, 2.0, 0.0, p, g);
  double excited_mass = 0.0;
  for (int j = 0; j < g->n; ++j) excited_mass += std::norm(flipped.amp_e[j]);
  CHECK(excited_mass * g->dx < 1e-20);
  const Expectations e = expectations(flipped);
  CHECK(std::abs(e.p_g - p.force * 2.0) < g->dp / 10.0);
}

TEST_CASE("cat_after_two_pulses: component weights and four peak centers") {
  const ModelParams p = linear_model(3.0);
  const double tau = 2.0;  // F tau = 6 ~ 8.5 sigma_p
  auto g = make_grid(4096, 80.0);

  const VibronicState cat0 = cat_after_two_pulses(kPi / 3.0, tau, 0.0, p, g);
  const double w_hi = momentum_peak_weight(cat0, Surface::ground, 0.0, p);
  const double w_lo = momentum_peak_weight(cat0, Surface::ground, p.force * tau, p);
  CHECK(w_hi == doctest::Approx(0.75).epsilon(2e-5));
  CHECK(w_lo == doctest::Approx(0.25).epsilon(6e-5));
  // population ratio between the two peaks: cos^2 : sin^2 of the weights
  CHECK(w_hi / w_lo == doctest::Approx(3.0).epsilon(1e-4));

  for (double phi : {kPi / 3.0, 1.1}) {
    for (double t : {1.0, 2.0}) {
      const VibronicState cat = cat_after_two_pulses(phi, tau, t, p, g);
      const double drift = p.force * t;
      CHECK(std::abs(momentum_peak_center(cat, Surface::ground, 0.0, p)) < g->dp / 10.0);
      CHECK(std::abs(momentum_peak_center(cat, Surface::ground, p.force * tau, p) -
                     p.force * tau) < g->dp / 10.0);
      CHECK(std::abs(momentum_peak_center(cat, Surface::excited, drift, p) - drift) <
            g->dp / 10.0);
      CHECK(std::abs(momentum_peak_center(cat, Surface::excited, p.force * tau + drift, p) -
                     (p.force * tau + drift)) < g->dp / 10.0);
    }
  }
}

TEST_CASE("echo_amplitude_impulsive: frozen oracle values") {
  // oracle: matched-term magnitude sin^3(phi/2) cos(phi/2); cross terms are
  // bounded by exp(-(F tau)^2 / (8 sigma_p^2)) = e^-9 here
  const ModelParams p = linear_model(3.0);
  auto g = make_grid(4096, 80.0);

  CHECK(std::abs(echo_amplitude_impulsive(0.0, 2.0, p, g)) < 1e-14);
  CHECK(std::abs(echo_amplitude_impulsive(kPi / 2.0, 2.0, p, g)) ==
        doctest::Approx(0.25).epsilon(4e-3));
  CHECK(std::abs(echo_amplitude_impulsive(kPi / 3.0, 2.0, p, g)) ==
        doctest::Approx(0.10825317547305483).epsilon(1e-2));
}

TEST_CASE("echo_amplitude_impulsive: tau independent once packets separate") {
  const ModelParams p = linear_model(6.0);
  auto g = make_grid(4096, 120.0);
  // F tau >= 8 sigma_p
  const double tau0 = 8.0 * p.sigma_p() / p.force;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double tau = tau0; tau <= 2.0 * tau0 + 1e-12; tau += 0.25 * tau0) {
    const double mag = std::abs(echo_amplitude_impulsive(kPi / 2.0, tau, p, g));
    lo = std::min(lo, mag);
    hi = std::max(hi, mag);
  }
  CHECK((hi - lo) / lo < 1e-6);
}

TEST_CASE("echo amplitude scales as sin^3(phi/2) cos(phi/2)") {
  const ModelParams p = linear_model(4.0);
  auto g = make_grid(4096, 100.0);
  const double tau = 8.0 * p.sigma_p() / p.force;
  const auto s3c = [](double phi) {
    return std::pow(std::sin(0.5 * phi), 3) * std::cos(0.5 * phi);
  };
  const double m1 = std::abs(echo_amplitude_impulsive(kPi / 2.0, tau, p, g));
  const double m2 = std::abs(echo_amplitude_impulsive(kPi / 3.0, tau, p, g));
  CHECK(m1 / m2 == doctest::Approx(s3c(kPi / 2.0) / s3c(kPi / 3.0)).epsilon(1e-3));
}

TEST_CASE("predicted_echo_intensity: closed form") {
  ModelParams p = linear_model(1.0);
  CHECK(predicted_echo_intensity(0.0, p).intensity_ratio == doctest::Approx(1.0));
  CHECK(predicted_echo_intensity(1.0, p).intensity_ratio ==
        doctest::Approx(0.6065306597126334).epsilon(1e-12));
  CHECK(predicted_echo_intensity(1.0, p).coefficient == doctest::Approx(0.5));

  // half-intensity delay (2 ln 2)^(1/4)
  const double tau_half = std::pow(2.0 * std::log(2.0), 0.25);
  CHECK(predicted_echo_intensity(tau_half, p).intensity_ratio ==
        doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(predicted_echo_intensity(-0.1, p), std::invalid_argument);

  // monotone nonincreasing in tau and |F|
  double prev = 2.0;
  for (double tau = 0.0; tau <= 2.0; tau += 0.1) {
    const double v = predicted_echo_intensity(tau, p).intensity_ratio;
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  ModelParams stronger = p;
  stronger.force = 2.0;
  CHECK(predicted_echo_intensity(1.0, stronger).intensity_ratio <
        predicted_echo_intensity(1.0, p).intensity_ratio);
}

TEST_CASE("impulsive_polarization_series matches pointwise cat evaluation") {
  const ModelParams p = linear_model(3.0, 0.8);
  auto g = make_grid(2048, 60.0);
  const double tau = 1.8;
  const std::vector<double> times{0.0, 0.9, 1.8, 2.4};
  const auto series = impulsive_polarization_series(kPi / 2.0, tau, p, g, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const VibronicState cat = cat_after_two_pulses(kPi / 2.0, tau, times[i], p, g);
    CHECK(std::abs(series[i] - cross_coherence(cat)) < 1e-12);
  }
}
