#pragma once

#include <numbers>
#include <random>
#include <string>

#include "gma/problem_io.hpp"

namespace gma::testing {

inline std::string fixture(const std::string& name) {
  return std::string(GMA_FIXTURE_DIR) + "/" + name;
}

inline GmaProblem load_fixture_problem(const std::string& name, const LoadOverrides& ov = {}) {
  return assemble_problem(load_problem(fixture(name), ov));
}

inline Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, int m, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXcd M(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) M(r, c) = Complex(u(rng), u(rng));
  return ((M + M.adjoint()) / 2.0).eval();
}

inline PPForm random_positive_form(std::mt19937_64& rng, int n, int p, double margin) {
  int m = static_cast<int>(binomial(n, p));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXcd G(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) G(r, c) = Complex(u(rng), u(rng));
  return PPForm::from_matrix(n, p, (G * G.adjoint() + margin * Eigen::MatrixXcd::Identity(m, m)).eval());
}

// cos(2 pi k.x + phase) sampled on the grid
inline ScalarField cosine_field(const TorusGrid& g, const std::vector<int>& k, double amp,
                                double phase0 = 0.0) {
  Eigen::ArrayXd values(g.total());
  for (long long idx = 0; idx < g.total(); ++idx) {
    double phase = phase0;
    for (int a = 0; a < g.axes(); ++a)
      phase += 2.0 * std::numbers::pi * k[a] * static_cast<double>(g.coord(idx, a)) / g.size(a);
    values[idx] = amp * std::cos(phase);
  }
  return ScalarField(g, values);
}

inline ScalarField random_band_limited(std::mt19937_64& rng, const TorusGrid& g, int modes,
                                       double amplitude) {
  std::uniform_int_distribution<int> ki(-2, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::ArrayXd values = Eigen::ArrayXd::Zero(g.total());
  for (int m = 0; m < modes; ++m) {
    std::vector<int> k(g.axes());
    for (int a = 0; a < g.axes(); ++a) k[a] = ki(rng);
    double amp = amplitude * (2.0 * u(rng) - 1.0);
    double ph = 2.0 * std::numbers::pi * u(rng);
    values += cosine_field(g, k, amp, ph).values;
  }
  return ScalarField(g, values);
}

}  // namespace gma::testing
