// Two-surface vibronic state: complex amplitudes on |G> and |E> over one grid,
// in position or momentum representation, plus the elementary state algebra.
//
// Representation change is the unitary DFT pair
//   psi~(p_k) = dx/sqrt(2 pi) * exp(-i p_k x_min) * sum_j psi(x_j) exp(-2 pi i j k / n)
// and its inverse; Parseval holds exactly because dx*dp*n = 2*pi.
#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qecho/fft.hpp"
#include "qecho/grid.hpp"

namespace qecho {

using Complex = std::complex<double>;
using ComplexVec = std::vector<Complex>;

enum class Rep { position, momentum };

struct VibronicState {
  GridPtr grid;
  ComplexVec amp_g;
  ComplexVec amp_e;
  Rep rep = Rep::position;

  // Integration weight of the current representation.
  double weight() const { return rep == Rep::position ? grid->dx : grid->dp; }
};

inline VibronicState make_empty_state(GridPtr grid, Rep rep = Rep::position) {
  VibronicState s;
  s.grid = std::move(grid);
  s.amp_g.assign(s.grid->n, Complex{0.0, 0.0});
  s.amp_e.assign(s.grid->n, Complex{0.0, 0.0});
  s.rep = rep;
  return s;
}

inline double norm_squared(const VibronicState& s) {
  double acc = 0.0;
  for (int j = 0; j < s.grid->n; ++j) {
    acc += std::norm(s.amp_g[j]) + std::norm(s.amp_e[j]);
  }
  return acc * s.weight();
}

// Harmonic ground-state Gaussian on |G>, amp_e = 0, position representation:
//   psi(x) = (m*Omega/pi)^(1/4) exp(-m*Omega (x-x0)^2 / 2 + i p0 x).
inline VibronicState ground_gaussian(GridPtr grid, double mass, double omega,
                                     double x0 = 0.0, double p0 = 0.0) {
  if (!(mass > 0.0) || !(omega > 0.0)) {
    throw std::invalid_argument("ground_gaussian: require m > 0 and Omega > 0");
  }
  const double sigma_x = std::sqrt(1.0 / (2.0 * mass * omega));
  if (grid->dx > sigma_x / 4.0 || grid->extent() < 12.0 * sigma_x) {
    throw std::invalid_argument(
        "ground_gaussian: grid under-resolves the packet (need dx <= sigma_x/4 "
        "and extent >= 12 sigma_x)");
  }
  VibronicState s = make_empty_state(std::move(grid));
  const double a = mass * omega;
  const double amp0 = std::pow(a / kPi, 0.25);
  for (int j = 0; j < s.grid->n; ++j) {
    const double d = s.grid->x[j] - x0;
    s.amp_g[j] = std::polar(amp0 * std::exp(-0.5 * a * d * d), p0 * s.grid->x[j]);
  }
  return s;
}

namespace detail {

inline void to_momentum_inplace(const Grid& g, const Fft& fft, ComplexVec& a) {
  fft.forward(a);
  const double scale = g.dx / std::sqrt(kTwoPi);
  for (int k = 0; k < g.n; ++k) {
    a[k] *= scale * std::polar(1.0, -g.p[k] * g.x_min);
  }
}

inline void to_position_inplace(const Grid& g, const Fft& fft, ComplexVec& a) {
  for (int k = 0; k < g.n; ++k) {
    a[k] *= std::polar(1.0, g.p[k] * g.x_min);
  }
  fft.inverse(a);
  const double scale = std::sqrt(kTwoPi) / g.dx;
  for (int j = 0; j < g.n; ++j) a[j] *= scale;
}

}  // namespace detail

inline VibronicState change_representation(const VibronicState& s, Rep target) {
  if (s.rep == target) return s;
  VibronicState out = s;
  const Fft fft(static_cast<std::size_t>(s.grid->n));
  if (target == Rep::momentum) {
    detail::to_momentum_inplace(*s.grid, fft, out.amp_g);
    detail::to_momentum_inplace(*s.grid, fft, out.amp_e);
  } else {
    detail::to_position_inplace(*s.grid, fft, out.amp_g);
    detail::to_position_inplace(*s.grid, fft, out.amp_e);
  }
  out.rep = target;
  return out;
}

// <a|b> = sum over surfaces and nodes of conj(a)*b * (dx or dp).
inline Complex overlap(const VibronicState& a, const VibronicState& b) {
  if (!a.grid->same_lattice(*b.grid)) {
    throw std::invalid_argument("overlap: states live on different grids");
  }
  if (a.rep != b.rep) {
    throw std::invalid_argument("overlap: representation mismatch");
  }
  Complex acc{0.0, 0.0};
  for (int j = 0; j < a.grid->n; ++j) {
    acc += std::conj(a.amp_g[j]) * b.amp_g[j] + std::conj(a.amp_e[j]) * b.amp_e[j];
  }
  return acc * a.weight();
}

// Per-surface populations and population-normalized <x>, <p>. Means of an
// (almost) empty surface are reported as NaN, never as a silent 0.
struct Expectations {
  double pop_g = 0.0;
  double pop_e = 0.0;
  double x_g = 0.0;
  double p_g = 0.0;
  double x_e = 0.0;
  double p_e = 0.0;
};

inline constexpr double kEmptySurfacePopulation = 1e-12;

namespace detail {

inline double first_moment(const std::vector<double>& axis, const ComplexVec& a,
                           double weight, double pop) {
  if (pop < kEmptySurfacePopulation) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += axis[j] * std::norm(a[j]);
  return acc * weight / pop;
}

}  // namespace detail

inline Expectations expectations(const VibronicState& s) {
  const VibronicState pos = change_representation(s, Rep::position);
  const VibronicState mom = change_representation(s, Rep::momentum);
  Expectations e;
  for (int j = 0; j < s.grid->n; ++j) {
    e.pop_g += std::norm(pos.amp_g[j]);
    e.pop_e += std::norm(pos.amp_e[j]);
  }
  e.pop_g *= s.grid->dx;
  e.pop_e *= s.grid->dx;
  e.x_g = detail::first_moment(s.grid->x, pos.amp_g, s.grid->dx, e.pop_g);
  e.x_e = detail::first_moment(s.grid->x, pos.amp_e, s.grid->dx, e.pop_e);
  e.p_g = detail::first_moment(s.grid->p, mom.amp_g, s.grid->dp, e.pop_g);
  e.p_e = detail::first_moment(s.grid->p, mom.amp_e, s.grid->dp, e.pop_e);
  return e;
}

}  // namespace qecho
