#include "gma/grid.hpp"

#include <stdexcept>

namespace gma {

namespace {
bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }
}  // namespace

TorusGrid::TorusGrid(int n, std::vector<int> pair_sizes, long long max_points) {
  if (n < 1 || n > 3) throw std::invalid_argument("TorusGrid: complex dimension must be 1..3");
  if (static_cast<int>(pair_sizes.size()) != n)
    throw std::invalid_argument("TorusGrid: need one size per complex coordinate");
  n_ = n;
  sizes_.resize(2 * n);
  total_ = 1;
  for (int j = 0; j < n; ++j) {
    int s = pair_sizes[j];
    if (!power_of_two(s) || s < 8)
      throw std::invalid_argument("TorusGrid: sizes must be powers of two >= 8");
    sizes_[2 * j] = s;
    sizes_[2 * j + 1] = s;
    total_ *= static_cast<long long>(s) * s;
  }
  if (total_ > max_points)
    throw std::invalid_argument("TorusGrid: grid exceeds the configured memory budget");
  strides_.assign(2 * n, 1);
  for (int a = 2 * n - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * sizes_[a + 1];
}

std::vector<int> TorusGrid::pair_sizes() const {
  std::vector<int> out(n_);
  for (int j = 0; j < n_; ++j) out[j] = sizes_[2 * j];
  return out;
}

}  // namespace gma
