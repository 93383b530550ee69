#ifndef CLIPFORGE_DCT_HPP
#define CLIPFORGE_DCT_HPP

#include <vector>

namespace clipforge {

// Orthonormal DCT-II (forward) / DCT-III (inverse) with precomputed basis
// tables. Separable helpers cover the block sizes used across the library
// (8x8 coding blocks, 32x32 complexity tiles, 3-tap temporal axis).
class Dct {
 public:
  explicit Dct(int n);

  int size() const { return n_; }

  void forward(const double* in, double* out, int stride = 1) const;
  void inverse(const double* in, double* out, int stride = 1) const;

  // Row-major n x n block.
  void forward2d(const double* in, double* out) const;
  void inverse2d(const double* in, double* out) const;

 private:
  int n_;
  std::vector<double> basis_;  // basis_[k * n_ + x]
};

const Dct& dct8();
const Dct& dct3();
const Dct& dct32();

}  // namespace clipforge

#endif  // CLIPFORGE_DCT_HPP
