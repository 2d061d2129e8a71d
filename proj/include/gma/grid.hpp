#pragma once

#include <vector>

namespace gma {

// Uniform sample grid on the flat torus C^n / (Z + iZ)^n, n <= 3. Real
// coordinates are ordered x1, y1, x2, y2, ..., each axis with period 1.
// Axis sizes are powers of two >= 8 and equal within a complex pair.
class TorusGrid {
 public:
  static constexpr long long kDefaultMaxPoints = 1LL << 24;

  TorusGrid() = default;
  TorusGrid(int n, std::vector<int> pair_sizes, long long max_points = kDefaultMaxPoints);

  bool valid() const { return n_ > 0; }
  int complex_dim() const { return n_; }
  int axes() const { return 2 * n_; }
  int size(int axis) const { return sizes_[axis]; }
  const std::vector<int>& sizes() const { return sizes_; }
  std::vector<int> pair_sizes() const;
  long long stride(int axis) const { return strides_[axis]; }
  long long total() const { return total_; }

  // Signed integer frequency of FFT bin `index` on `axis`, in [-N/2, N/2).
  int freq(int axis, int index) const {
    int N = sizes_[axis];
    return index <= N / 2 - 1 ? index : index - N;
  }
  // Frequency used by first-derivative symbols: the Nyquist bin is zeroed
  // so that differentiation commutes with complex conjugation exactly.
  int deriv_freq(int axis, int index) const {
    int N = sizes_[axis];
    return index == N / 2 ? 0 : freq(axis, index);
  }

  // Coordinate of a linear index along `axis`.
  int coord(long long index, int axis) const {
    return static_cast<int>((index / strides_[axis]) % sizes_[axis]);
  }

  bool operator==(const TorusGrid& o) const { return n_ == o.n_ && sizes_ == o.sizes_; }

 private:
  int n_ = 0;
  std::vector<int> sizes_;        // per real axis
  std::vector<long long> strides_;  // row-major, last axis fastest
  long long total_ = 0;
};

}  // namespace gma
