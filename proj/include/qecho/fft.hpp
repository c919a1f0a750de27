// Iterative radix-2 FFT with precomputed twiddle and bit-reversal tables.
// Grid sizes are powers of two by invariant, so radix-2 is all we need.
#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qecho {

class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    if (n_ < 2 || (n_ & (n_ - 1)) != 0) {
      throw std::invalid_argument("Fft: size must be a power of two >= 2");
    }
    std::size_t lg = 0;
    while ((std::size_t{1} << lg) < n_) ++lg;
    rev_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < lg; ++b) r |= ((i >> b) & 1u) << (lg - 1 - b);
      rev_[i] = r;
    }
    tw_.resize(n_ / 2);
    const double step = -2.0 * kPi / static_cast<double>(n_);
    for (std::size_t k = 0; k < n_ / 2; ++k) {
      tw_[k] = std::polar(1.0, step * static_cast<double>(k));
    }
  }

  std::size_t size() const { return n_; }

  // DFT with kernel exp(-2*pi*i*j*k/n), no scaling.
  void forward(std::complex<double>* a) const { transform(a, false); }

  // Inverse kernel exp(+2*pi*i*j*k/n), scaled by 1/n.
  void inverse(std::complex<double>* a) const {
    transform(a, true);
    const double s = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) a[i] *= s;
  }

  void forward(std::vector<std::complex<double>>& a) const { forward(a.data()); }
  void inverse(std::vector<std::complex<double>>& a) const { inverse(a.data()); }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  void transform(std::complex<double>* a, bool inv) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len >> 1;
      const std::size_t stride = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          std::complex<double> w = tw_[j * stride];
          if (inv) w = std::conj(w);
          const std::complex<double> u = a[start + j];
          const std::complex<double> v = a[start + j + half] * w;
          a[start + j] = u + v;
          a[start + j + half] = u - v;
        }
      }
    }
  }

  std::size_t n_;
  std::vector<std::size_t> rev_;
  std::vector<std::complex<double>> tw_;
};

}  // namespace qecho
