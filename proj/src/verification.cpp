#include "gma/verification.hpp"

#include <chrono>
#include <random>

#include "gma/chern.hpp"
#include "gma/field.hpp"
#include "gma/slag.hpp"

namespace gma::verify {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, int m, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXcd M(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) M(r, c) = Complex(u(rng), u(rng));
  return ((M + M.adjoint()) / 2.0).eval();
}

// Gram-generated PSD coefficients plus a strict margin; positive in the
// Lambda^p sense for every degree used here (p = 1, n-1, n).
PPForm random_strictly_positive(std::mt19937_64& rng, int n, int p, double margin) {
  int m = static_cast<int>(binomial(n, p));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXcd G(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) G(r, c) = Complex(u(rng), u(rng));
  Eigen::MatrixXcd H = G * G.adjoint() + margin * Eigen::MatrixXcd::Identity(m, m);
  return PPForm::from_matrix(n, p, H);
}

PPForm random_kahler(std::mt19937_64& rng, int n, double margin) {
  return random_strictly_positive(rng, n, 1, margin);
}

ScalarField random_band_limited(std::mt19937_64& rng, const TorusGrid& g, int modes,
                                double amplitude) {
  std::uniform_int_distribution<int> ki(-2, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::ArrayXd values = Eigen::ArrayXd::Zero(g.total());
  for (int m = 0; m < modes; ++m) {
    std::vector<int> k(g.axes());
    for (int a = 0; a < g.axes(); ++a) k[a] = ki(rng);
    double amp = amplitude * (2.0 * u(rng) - 1.0);
    double phase0 = 2.0 * std::numbers::pi * u(rng);
    for (long long idx = 0; idx < g.total(); ++idx) {
      double phase = phase0;
      for (int a = 0; a < g.axes(); ++a)
        phase += 2.0 * std::numbers::pi * k[a] * static_cast<double>(g.coord(idx, a)) / g.size(a);
      values[idx] += amp * std::cos(phase);
    }
  }
  return ScalarField(g, values);
}

}  // namespace

SuiteResult slag_grouping_suite(int samples, std::uint64_t seed) {
  auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> utan(0.05, 5.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    PPForm theta = PPForm::from_matrix(3, 1, random_hermitian(rng, 3, 1.0));
    PPForm omega = random_kahler(rng, 3, 0.3);
    worst = std::max(worst, grouping_defect(theta, omega, utan(rng)));
  }
  return {"slag_grouping_identity", worst <= 1e-12, worst, samples, elapsed(t0),
          "relative pointwise defect of the regrouped phase cubic"};
}

SuiteResult chern_equivalence_suite(int samples_per_dim, std::uint64_t seed) {
  auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  long long total = 0;
  for (int n = 2; n <= 3; ++n) {
    TorusGrid grid(n, std::vector<int>(n, 8));
    ChernData data;
    data.omega = FormField::constant(
        grid, PPForm::from_matrix(
                  n, 1,
                  (Eigen::MatrixXcd::Identity(n, n) + 0.2 * random_hermitian(rng, n, 1.0)).eval()));
    data.theta0 = FormField::constant(grid, PPForm::from_matrix(n, 1, random_hermitian(rng, n, 0.8)));
    // eta enters both expansions identically; any smooth top field works
    ScalarField bump = random_band_limited(rng, grid, 2, 0.3);
    data.eta = scaled(ScalarField(grid, 1.0 + bump.values),
                      FormField::constant(grid, PPForm::volume_form(n)));
    std::vector<FormField> alphas = build_alphas(data);
    for (int s = 0; s < samples_per_dim; ++s) {
      ScalarField phi = random_band_limited(rng, grid, 3, 0.5);
      worst = std::max(worst, equivalence_check(data, alphas, phi));
      ++total;
    }
  }
  return {"chern_recursion_equivalence", worst <= 1e-10, worst, total, elapsed(t0),
          "sup |direct residual - recursion residual| over random phi, n = 2 and 3"};
}

SuiteResult wedge_positivity_suite(int samples, std::uint64_t seed) {
  auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  bool pass = true;
  for (int s = 0; s < samples; ++s) {
    // alternate between the admissible degree pairs on n = 2 and n = 3
    int n = (s % 2 == 0) ? 2 : 3;
    int p = 1;
    int q = (n == 3 && s % 4 == 1) ? 2 : 1;
    PPForm a = random_strictly_positive(rng, n, p, 0.2);
    PPForm b = random_strictly_positive(rng, n, q, 0.2);
    PPForm w = wedge(a, b);
    double lo = min_gram_eigenvalue(w);
    worst = std::min(worst, lo);
    if (!is_positive(w, true, 1e-10 * std::max(w.max_abs(), 1.0))) pass = false;
  }
  return {"wedge_positivity_closure", pass, worst, samples, elapsed(t0),
          "smallest Gram eigenvalue of products of strictly positive pairs"};
}

SuiteResult convexity_suite(int samples, std::uint64_t seed) {
  auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  const double ts[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  double worst = std::numeric_limits<double>::infinity();
  std::uniform_int_distribution<int> pick_n(2, 3);
  for (int s = 0; s < samples; ++s) {
    int n = pick_n(rng);
    std::uniform_int_distribution<int> pick_k(1, n - 1);
    int k = pick_k(rng);
    PPForm alpha = random_strictly_positive(rng, n, k, 0.05);
    PPForm w1 = random_kahler(rng, n, 0.3);
    PPForm w2 = random_kahler(rng, n, 0.3);
    auto ratio = [&](const PPForm& w) {
      return top_ratio(wedge(alpha, wedge_power(w, n - k)), wedge_power(w, n));
    };
    double r1 = ratio(w1), r2 = ratio(w2);
    for (double t : ts) {
      PPForm wt = t * w1 + (1.0 - t) * w2;
      double margin = t * r1 + (1.0 - t) * r2 - ratio(wt);
      worst = std::min(worst, margin);
    }
  }
  return {"convexity_lemma", worst >= -1e-12, worst, samples, elapsed(t0),
          "t r(w1) + (1-t) r(w2) - r(t w1 + (1-t) w2), worst over samples"};
}

SuiteResult lambda1_suite(int samples, std::uint64_t seed) {
  auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(0.0, 2.0), uh(0.1, 5.0), ul(0.1, 4.0),
      ufrac(0.0, 0.95);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    int n = (s % 2 == 0) ? 2 : 3;
    Eigen::VectorXd tail_values(n - 1);
    for (int i = 0; i < n - 1; ++i) tail_values[i] = ul(rng);
    EigenvalueSpectrum tail(tail_values);
    double tail_prod = 1.0;
    for (int i = 0; i < n - 1; ++i) tail_prod *= tail[i];
    Eigen::VectorXd a(n);
    a[0] = ufrac(rng) * tail_prod;  // keeps the denominator positive
    for (int i = 1; i < n; ++i) a[i] = ua(rng);
    double h = uh(rng);
    double l1 = solve_lambda1(a, h, tail);
    double lhs = l1 * tail_prod;
    double rhs = a[0] * l1 + h;
    for (int i = 1; i < n; ++i) rhs += a[i] * tail[i - 1];
    worst = std::max(worst, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
  }
  return {"lambda1_backsubstitution", worst <= 1e-12, worst, samples, elapsed(t0),
          "relative defect of lambda_1...lambda_n = sum A(k,k) lambda_k + h"};
}

SuiteResult ellipticity_closed_form_suite() {
  auto t0 = Clock::now();
  Eigen::VectorXd flat(2);
  flat << 1.0, 1.0;
  double v1 = ellipticity_bound(EigenvalueSpectrum(flat), {1.0, 2});
  Eigen::VectorXd twos(2);
  twos << 2.0, 2.0;
  double v2 = ellipticity_bound(EigenvalueSpectrum(twos), {1.0, 1});
  double worst = std::max(std::abs(v1 - 0.0), std::abs(v2 - 0.5));
  return {"ellipticity_closed_form", worst <= 1e-15, worst, 2, elapsed(t0),
          "slack at lambda=(1,1), delta=1, k0=2 and lambda=(2,2), delta=1, k0=1"};
}

SuiteResult example_tangent_suite() {
  auto t0 = Clock::now();
  // proportional classes, all four intersection numbers equal
  auto tan_k = [](int k, double eps) {
    return example_tangent({k, eps, 1.0, 1.0, 1.0, 1.0});
  };
  bool pass = true;
  double worst = 0.0;
  for (int k = 2; k <= 50; ++k)
    if (!(tan_k(k, 1e-3) > 0.0)) pass = false;
  double slope_ref = tan_k(400, 1e-3) / 400.0;
  for (int k = 50; k <= 400; k += 25) {
    double dev = std::abs(tan_k(k, 1e-3) / k - slope_ref) / slope_ref;
    worst = std::max(worst, dev);
  }
  if (worst > 0.05) pass = false;
  return {"example_tangent_growth", pass, worst, 49 + 15, elapsed(t0),
          "positivity for k in 2..50 at eps = 1e-3 and linear growth of tan/k"};
}

std::vector<SuiteResult> run_selftest(bool fast) {
  int big = fast ? 200 : 1000;
  int phi = fast ? 10 : 100;
  int conv = fast ? 1000 : 10000;
  std::vector<SuiteResult> out;
  out.push_back(slag_grouping_suite(big, 0x5eed5001));
  out.push_back(chern_equivalence_suite(phi, 0x5eed5002));
  out.push_back(wedge_positivity_suite(big, 0x5eed5003));
  out.push_back(convexity_suite(conv, 0x5eed5004));
  out.push_back(lambda1_suite(conv, 0x5eed5005));
  out.push_back(ellipticity_closed_form_suite());
  out.push_back(example_tangent_suite());
  return out;
}

}  // namespace gma::verify
