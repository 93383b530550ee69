#include "clipforge/dct.hpp"

#include <cmath>
#include <stdexcept>

namespace clipforge {

Dct::Dct(int n) : n_(n), basis_(static_cast<size_t>(n) * n) {
  if (n < 2) throw std::invalid_argument("Dct: size must be >= 2");
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < n; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int x = 0; x < n; ++x)
      basis_[static_cast<size_t>(k) * n + x] = scale * std::cos(pi * (2 * x + 1) * k / (2.0 * n));
  }
}

void Dct::forward(const double* in, double* out, int stride) const {
  for (int k = 0; k < n_; ++k) {
    const double* b = &basis_[static_cast<size_t>(k) * n_];
    double acc = 0.0;
    for (int x = 0; x < n_; ++x) acc += b[x] * in[x * stride];
    out[k * stride] = acc;
  }
}

void Dct::inverse(const double* in, double* out, int stride) const {
  for (int x = 0; x < n_; ++x) {
    double acc = 0.0;
    for (int k = 0; k < n_; ++k) acc += basis_[static_cast<size_t>(k) * n_ + x] * in[k * stride];
    out[x * stride] = acc;
  }
}

void Dct::forward2d(const double* in, double* out) const {
  std::vector<double> tmp(static_cast<size_t>(n_) * n_);
  for (int r = 0; r < n_; ++r) forward(in + r * n_, tmp.data() + r * n_, 1);
  for (int c = 0; c < n_; ++c) forward(tmp.data() + c, out + c, n_);
}

void Dct::inverse2d(const double* in, double* out) const {
  std::vector<double> tmp(static_cast<size_t>(n_) * n_);
  for (int c = 0; c < n_; ++c) inverse(in + c, tmp.data() + c, n_);
  for (int r = 0; r < n_; ++r) inverse(tmp.data() + r * n_, out + r * n_, 1);
}

const Dct& dct8() {
  static const Dct d(8);
  return d;
}

const Dct& dct3() {
  static const Dct d(3);
  return d;
}

const Dct& dct32() {
  static const Dct d(32);
  return d;
}

}  // namespace clipforge
