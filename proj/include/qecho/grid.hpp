// Uniform 1-D position lattice and its conjugate momentum lattice.
#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace qecho {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Momentum values are stored in standard discrete-transform ordering:
// p[k] = k*dp for k < n/2, (k-n)*dp for k >= n/2. dx*dp*n == 2*pi (hbar = 1).
struct Grid {
  int n = 0;
  double x_min = 0.0;
  double dx = 0.0;
  double dp = 0.0;
  std::vector<double> x;
  std::vector<double> p;

  double extent() const { return dx * n; }
  double p_max() const { return kPi / dx; }

  bool same_lattice(const Grid& other) const {
    return n == other.n && x_min == other.x_min && dx == other.dx;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(int n, double x_extent) {
  if (n < 64 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("make_grid: n must be a power of two >= 64");
  }
  if (!(x_extent > 0.0)) {
    throw std::invalid_argument("make_grid: x_extent must be positive");
  }
  auto g = std::make_shared<Grid>();
  g->n = n;
  g->dx = x_extent / n;
  g->x_min = -0.5 * x_extent;
  g->dp = kTwoPi / (n * g->dx);
  g->x.resize(n);
  g->p.resize(n);
  for (int j = 0; j < n; ++j) g->x[j] = g->x_min + j * g->dx;
  for (int k = 0; k < n; ++k) {
    const int kk = (k < n / 2) ? k : k - n;
    g->p[k] = kk * g->dp;
  }
  return g;
}

}  // namespace qecho
