#pragma once

#include <Eigen/Dense>
#include <complex>

#include "gma/grid.hpp"

namespace gma {

// Multi-dimensional complex DFT over every real axis of the grid, computed
// as strided 1-D passes. Forward is unnormalized; inverse carries the full
// 1/total() factor, so inverse(forward(x)) == x up to roundoff.
void fft_forward(const TorusGrid& grid, Eigen::ArrayXcd& data);
void fft_inverse(const TorusGrid& grid, Eigen::ArrayXcd& data);

Eigen::ArrayXcd fft_forward_copy(const TorusGrid& grid, const Eigen::ArrayXd& real_data);

}  // namespace gma
