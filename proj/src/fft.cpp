#include "gma/fft.hpp"

#include <unsupported/Eigen/FFT>
#include <stdexcept>
#include <vector>

namespace gma {

namespace {

// One pass of contiguous length-N transforms along `axis`. Lines are
// gathered into a scratch buffer so the 1-D kernel always sees unit stride.
void axis_pass(const TorusGrid& grid, Eigen::ArrayXcd& data, int axis, bool inverse) {
  const int N = grid.size(axis);
  const long long inner = grid.stride(axis);
  const long long outer = grid.total() / (static_cast<long long>(N) * inner);
  const long long lines = outer * inner;

#pragma omp parallel
  {
    thread_local Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in(N), out(N);
#pragma omp for schedule(static)
    for (long long line = 0; line < lines; ++line) {
      const long long o = line / inner;
      const long long i = line % inner;
      const long long base = o * (static_cast<long long>(N) * inner) + i;
      for (int j = 0; j < N; ++j) in[j] = data[base + j * inner];
      if (inverse)
        fft.inv(out.data(), in.data(), N);
      else
        fft.fwd(out.data(), in.data(), N);
      for (int j = 0; j < N; ++j) data[base + j * inner] = out[j];
    }
  }
}

}  // namespace

void fft_forward(const TorusGrid& grid, Eigen::ArrayXcd& data) {
  if (data.size() != grid.total()) throw std::invalid_argument("fft_forward: size mismatch");
  for (int a = 0; a < grid.axes(); ++a) axis_pass(grid, data, a, false);
}

void fft_inverse(const TorusGrid& grid, Eigen::ArrayXcd& data) {
  if (data.size() != grid.total()) throw std::invalid_argument("fft_inverse: size mismatch");
  for (int a = 0; a < grid.axes(); ++a) axis_pass(grid, data, a, true);
}

Eigen::ArrayXcd fft_forward_copy(const TorusGrid& grid, const Eigen::ArrayXd& real_data) {
  Eigen::ArrayXcd spec = real_data.cast<std::complex<double>>();
  fft_forward(grid, spec);
  return spec;
}

}  // namespace gma
