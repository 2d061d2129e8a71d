#include <doctest.h>

#include <random>

#include "gma/form.hpp"
#include "gma/verification.hpp"
#include "test_helpers.hpp"

using namespace gma;
using gma::testing::random_hermitian;
using gma::testing::random_positive_form;

namespace {

PPForm basis_11(int n, int j, int k, Complex v = 1.0) {
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  M(j, k) = v;
  M(k, j) = std::conj(v);
  if (j == k) M(j, j) = v.real();
  return PPForm::from_matrix(n, 1, M);
}

}  // namespace

TEST_CASE("multi-index tables") {
  const auto& t32 = index_tuples(3, 2);
  REQUIRE(t32.size() == 3);
  CHECK(t32[0] == MultiIndex{0, 1});
  CHECK(t32[1] == MultiIndex{0, 2});
  CHECK(t32[2] == MultiIndex{1, 2});
  CHECK(tuple_rank(3, {0, 2}) == 1);

  CHECK(merge_sign({0}, {1}) == 1);
  CHECK(merge_sign({1}, {0}) == -1);
  CHECK(merge_sign({0}, {0}) == 0);
  MultiIndex merged;
  CHECK(merge_sign({2}, {0, 1}, &merged) == 1);  // two inversions
  CHECK(merged == MultiIndex{0, 1, 2});
  CHECK(binomial(5, 2) == 10);
}

TEST_CASE("wedge normalization: omega^n = n! vol for the Euclidean form") {
  for (int n = 1; n <= 3; ++n) {
    PPForm omega = PPForm::euclidean_kahler(n);
    PPForm top = wedge_power(omega, n);
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    CHECK(top_ratio(top, PPForm::volume_form(n)) == doctest::Approx(fact).epsilon(1e-15));
  }
}

TEST_CASE("wedge: bilinearity, commutativity, associativity, zero") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    int n = 3;
    PPForm a = PPForm::from_matrix(n, 1, random_hermitian(rng, 3));
    PPForm b = PPForm::from_matrix(n, 1, random_hermitian(rng, 3));
    PPForm c = PPForm::from_matrix(n, 1, random_hermitian(rng, 3));

    PPForm z = wedge(a, PPForm::zero(n, 1));
    CHECK(z.max_abs() == 0.0);

    PPForm ab = wedge(a, b);
    PPForm ba = wedge(b, a);
    CHECK((ab.coeffs() - ba.coeffs()).cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + ab.max_abs()));

    PPForm left = wedge(ab, c);
    PPForm right = wedge(a, wedge(b, c));
    CHECK((left.coeffs() - right.coeffs()).cwiseAbs().maxCoeff() <=
          1e-13 * (1.0 + left.max_abs()));

    PPForm lin = wedge(a + b, c) - wedge(a, c) - wedge(b, c);
    CHECK(lin.max_abs() <= 1e-13 * (1.0 + left.max_abs()));
  }
}

TEST_CASE("wedge rejects degree overflow") {
  PPForm a = PPForm::euclidean_kahler(2);
  PPForm b = wedge(a, a);
  CHECK_THROWS_AS(wedge(b, a), std::invalid_argument);
}

TEST_CASE("Hermiticity is exact under wedge, sum, and scaling") {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    PPForm a = PPForm::from_matrix(3, 1, random_hermitian(rng, 3));
    PPForm b = random_positive_form(rng, 3, 1, 0.1);
    PPForm w = wedge(a, b);
    CHECK((w.coeffs() - w.coeffs().adjoint()).cwiseAbs().maxCoeff() == 0.0);
    PPForm s = 2.5 * (a + b);
    CHECK((s.coeffs() - s.coeffs().adjoint()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("non-Hermitian coefficients are rejected, not repaired") {
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2, 2);
  M(0, 1) = Complex(1.0, 0.0);
  M(1, 0) = Complex(0.5, 0.0);  // deviation far above 1e-12 relative
  CHECK_THROWS_AS(PPForm::from_matrix(2, 1, M), std::invalid_argument);
}

TEST_CASE("is_positive: powers of a Kähler form, rank-one forms, explicit counterexample") {
  // chi^p strictly positive
  PPForm chi = PPForm::euclidean_kahler(3);
  for (int p = 1; p <= 3; ++p) CHECK(is_positive(wedge_power(chi, p), true, 1e-10));

  // (i)^p (-1)^{p(p-1)/2} Phi ∧ conj(Phi) for a single (p,0)-form: rank one,
  // positive but not strictly for p < n
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int n = 3, p = 2;
  int m = static_cast<int>(binomial(n, p));
  Eigen::VectorXcd phi(m);
  for (int i = 0; i < m; ++i) phi[i] = Complex(u(rng), u(rng));
  PPForm rank1 = PPForm::from_matrix(n, p, (phi * phi.adjoint()).eval());
  CHECK(is_positive(rank1, false));
  CHECK_FALSE(is_positive(rank1, true, 1e-10));

  // chi^2 - 3 (i dz1 dz1bar) ∧ (i dz2 dz2bar) on C^3 has a negative
  // Lambda^2 eigenvalue
  PPForm e11 = basis_11(3, 0, 0);
  PPForm e22 = basis_11(3, 1, 1);
  PPForm a = wedge(chi, chi) - 3.0 * wedge(e11, e22);
  CHECK_FALSE(is_positive(a, false));
  CHECK(min_gram_eigenvalue(a) == doctest::Approx(-1.0).epsilon(1e-12));

  CHECK(is_positive(PPForm::zero(3, 2), false));
  CHECK_FALSE(is_positive(PPForm::zero(3, 2), true, 1e-10));
  CHECK_THROWS_AS(is_positive(chi, true, 0.0), std::invalid_argument);
}

TEST_CASE("positivity closure of wedge on strictly positive pairs") {
  auto r = verify::wedge_positivity_suite(200, 991);
  CHECK(r.pass);
}

TEST_CASE("top_ratio") {
  PPForm omega = PPForm::euclidean_kahler(2);
  PPForm top = wedge(omega, omega);
  CHECK(top_ratio(top, top) == 1.0);
  CHECK(top_ratio(top, PPForm::volume_form(2)) == doctest::Approx(2.0).epsilon(1e-15));

  PPForm chi_n = wedge_power(PPForm::euclidean_kahler(3), 3);
  PPForm eta = 5.0 * chi_n;
  CHECK(top_ratio(eta, chi_n) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK_THROWS_AS(top_ratio(top, PPForm::zero(2, 2)), std::invalid_argument);
}

TEST_CASE("relative_eigenvalues: examples, determinant identity, congruence invariance") {
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(2, 2);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  h(0, 0) = 3.0;
  h(1, 1) = 1.0;
  EigenvalueSpectrum s = relative_eigenvalues(g, h);
  CHECK(s[0] == doctest::Approx(3.0));
  CHECK(s[1] == doctest::Approx(1.0));

  Eigen::MatrixXcd g2 = 2.0 * Eigen::MatrixXcd::Identity(3, 3);
  EigenvalueSpectrum s2 = relative_eigenvalues(g2, Eigen::MatrixXcd::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(s2[i] == doctest::Approx(0.5));

  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 40; ++rep) {
    Eigen::MatrixXcd G = random_hermitian(rng, 3);
    G = (G * G.adjoint() + 0.2 * Eigen::MatrixXcd::Identity(3, 3)).eval();
    Eigen::MatrixXcd H = random_hermitian(rng, 3);
    EigenvalueSpectrum lam = relative_eigenvalues(G, H);
    double prod = lam[0] * lam[1] * lam[2];
    double expect = (H.determinant() / G.determinant()).real();
    CHECK(prod == doctest::Approx(expect).epsilon(1e-10));

    Eigen::MatrixXcd S = random_hermitian(rng, 3) +
                         Complex(0, 1) * random_hermitian(rng, 3) +
                         3.0 * Eigen::MatrixXcd::Identity(3, 3);
    EigenvalueSpectrum lam2 = relative_eigenvalues((S.adjoint() * G * S).eval(),
                                                   (S.adjoint() * H * S).eval());
    for (int i = 0; i < 3; ++i)
      CHECK(lam2[i] == doctest::Approx(lam[i]).epsilon(1e-10));
  }

  CHECK_THROWS_AS(relative_eigenvalues((-1.0 * Eigen::MatrixXcd::Identity(2, 2)).eval(), h),
                  std::invalid_argument);
}

TEST_CASE("contraction_matrix: defining relation and special cases") {
  std::mt19937_64 rng(19);
  for (int n = 2; n <= 3; ++n) {
    PPForm chi = PPForm::euclidean_kahler(n);
    PPForm chi_n = wedge_power(chi, n);

    // defining relation against random (1,1) test forms
    for (int rep = 0; rep < 25; ++rep) {
      PPForm alpha = PPForm::from_matrix(n, n - 1,
                                         random_hermitian(rng, static_cast<int>(binomial(n, n - 1))));
      Eigen::MatrixXcd A = contraction_matrix(alpha, chi);
      PPForm beta = PPForm::from_matrix(n, 1, random_hermitian(rng, n));
      double lhs = wedge(alpha, beta).top_value();
      double rhs = (A.array() * beta.coeffs().array()).sum().real() * chi_n.top_value();
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      CHECK((A - A.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
    }

    // chi^{n-1} contracts to Id/n; the cone-normalized n chi^{n-1} to Id
    Eigen::MatrixXcd A1 = contraction_matrix(wedge_power(chi, n - 1), chi);
    CHECK((A1 - Eigen::MatrixXcd::Identity(n, n) / n).cwiseAbs().maxCoeff() <= 1e-14);
    Eigen::MatrixXcd An = contraction_matrix(static_cast<double>(n) * wedge_power(chi, n - 1), chi);
    CHECK((An - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(An.trace().real() == doctest::Approx(n));
    CHECK(top_ratio(wedge(static_cast<double>(n) * wedge_power(chi, n - 1), chi), chi_n) ==
          doctest::Approx(n));

    // linearity
    PPForm a = PPForm::from_matrix(n, n - 1, random_hermitian(rng, n));
    PPForm b = PPForm::from_matrix(n, n - 1, random_hermitian(rng, n));
    Eigen::MatrixXcd lin =
        contraction_matrix(a + b, chi) - contraction_matrix(a, chi) - contraction_matrix(b, chi);
    CHECK(lin.cwiseAbs().maxCoeff() <= 1e-14);

    // zero form
    CHECK(contraction_matrix(PPForm::zero(n, n - 1), chi).cwiseAbs().maxCoeff() == 0.0);
  }

  // rank-one: Phi = dz^2 ∧ ... ∧ dz^n picks out the (1,1bar) entry
  int n = 3;
  int m = static_cast<int>(binomial(n, n - 1));
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(m, m);
  int last = tuple_rank(n, {1, 2});
  M(last, last) = 1.0;
  PPForm rank1 = PPForm::from_matrix(n, n - 1, M);
  Eigen::MatrixXcd A = contraction_matrix(rank1, PPForm::euclidean_kahler(n));
  double fact = 6.0;  // chi^3 = 3! vol
  CHECK(A(0, 0).real() == doctest::Approx(1.0 / fact).epsilon(1e-14));
  Eigen::MatrixXcd offdiag = A;
  offdiag(0, 0) = 0.0;
  CHECK(offdiag.cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("cone_operator") {
  int n = 2;
  PPForm omega = PPForm::euclidean_kahler(n);
  std::vector<PPForm> none(n);
  PPForm c0 = cone_operator(omega, none, 1.0);
  CHECK((c0.coeffs() - 2.0 * omega.coeffs()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(is_positive(c0, true, 1e-10));

  std::vector<PPForm> alphas(n);
  alphas[0] = 3.0 * omega;
  PPForm at0 = cone_operator(omega, alphas, 0.0);
  CHECK((at0.coeffs() - 2.0 * omega.coeffs()).cwiseAbs().maxCoeff() <= 1e-15);

  PPForm at1 = cone_operator(omega, alphas, 1.0);
  CHECK((at1.coeffs() + omega.coeffs()).cwiseAbs().maxCoeff() <= 1e-15);  // 2w - 3w = -w
  CHECK_FALSE(is_positive(at1, false));
}

TEST_CASE("ellipticity_bound: closed forms, monotonicity, rejection") {
  Eigen::VectorXd ones(2);
  ones << 1.0, 1.0;
  CHECK(ellipticity_bound(EigenvalueSpectrum(ones), {1.0, 2}) == doctest::Approx(0.0).epsilon(1e-15));

  Eigen::VectorXd twos(2);
  twos << 2.0, 2.0;
  CHECK(std::abs(ellipticity_bound(EigenvalueSpectrum(twos), {1.0, 1}) - 0.5) <= 1e-15);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  for (int rep = 0; rep < 200; ++rep) {
    int n = rep % 2 == 0 ? 2 : 3;
    Eigen::VectorXd lam(n);
    for (int i = 0; i < n; ++i) lam[i] = u(rng);
    EllipticityParams par{0.7, 1 + rep % n};
    double base = ellipticity_bound(EigenvalueSpectrum(lam), par);
    Eigen::VectorXd bumped = lam;
    bumped[rep % n] *= 1.5;  // increasing any eigenvalue increases the slack
    CHECK(ellipticity_bound(EigenvalueSpectrum(bumped), par) >= base - 1e-14);
  }

  Eigen::VectorXd bad(2);
  bad << 1.0, -0.5;
  CHECK_THROWS_AS(ellipticity_bound(EigenvalueSpectrum(bad), {1.0, 1}), std::invalid_argument);
}

TEST_CASE("solve_lambda1: worked examples and rejection") {
  {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd tail(1);
    tail << 1.0;
    CHECK(solve_lambda1(a, 1.0, EigenvalueSpectrum(tail)) == doctest::Approx(1.0));
  }
  {
    Eigen::VectorXd a(2);
    a << 1.0, 0.0;
    Eigen::VectorXd tail(1);
    tail << 3.0;
    double l1 = solve_lambda1(a, 2.0, EigenvalueSpectrum(tail));
    CHECK(l1 == doctest::Approx(1.0));
    CHECK(l1 * 3.0 == doctest::Approx(1.0 * l1 + 2.0));  // back-substitution
  }
  {
    Eigen::VectorXd a(3);
    a << 1.0, 1.0, 1.0;
    Eigen::VectorXd tail(2);
    tail << 2.0, 2.0;
    double l1 = solve_lambda1(a, 1.0, EigenvalueSpectrum(tail));
    CHECK(l1 == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(l1 * 4.0 == doctest::Approx(l1 + 2.0 + 2.0 + 1.0).epsilon(1e-14));
  }
  {
    Eigen::VectorXd a(2);
    a << 5.0, 0.0;  // denominator 3 - 5 < 0
    Eigen::VectorXd tail(1);
    tail << 3.0;
    CHECK_THROWS_AS(solve_lambda1(a, 1.0, EigenvalueSpectrum(tail)), ConeViolationError);
  }
}

TEST_CASE("lambda1 back-substitution property") {
  auto r = verify::lambda1_suite(2000, 771);
  CHECK(r.pass);
}

TEST_CASE("Hadamard inequality step") {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 200; ++rep) {
    int n = rep % 2 == 0 ? 2 : 3;
    PPForm omega = random_positive_form(rng, n, 1, 0.2);
    PPForm pow = wedge_power(omega, n - 1);
    MultiIndex rest;
    for (int i = 1; i < n; ++i) rest.push_back(i);
    double minor = pow.coeff(rest, rest).real();  // (n-1)! times the principal minor
    double fact = n == 2 ? 1.0 : 2.0;
    double diag_prod = 1.0;
    for (int i = 1; i < n; ++i) diag_prod *= omega.coeff(i, i).real();
    CHECK(diag_prod >= minor / fact - 1e-12 * std::max(1.0, std::abs(diag_prod)));
  }
}

TEST_CASE("AM-GM step") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int rep = 0; rep < 500; ++rep) {
    int n = rep % 2 == 0 ? 2 : 3;
    double sum = 0.0, prod = 1.0;
    for (int k = 2; k <= n; ++k) {
      double w = u(rng), lam = u(rng);
      sum += w / lam;
      prod *= w / lam;
    }
    CHECK(sum >= (n - 1) * std::pow(prod, 1.0 / (n - 1)) - 1e-12);
  }
}

TEST_CASE("convexity of alpha ∧ omega^{n-k} / omega^n over Kähler forms") {
  auto r = verify::convexity_suite(2000, 3331);
  CHECK(r.pass);
  CHECK(r.worst >= -1e-12);
}

TEST_CASE("EigenvalueSpectrum sorts descending and rejects non-finite input") {
  Eigen::VectorXd v(3);
  v << 1.0, 3.0, 2.0;
  EigenvalueSpectrum s(v);
  CHECK(s[0] == 3.0);
  CHECK(s[2] == 1.0);
  Eigen::VectorXd bad(1);
  bad << std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS([&] { EigenvalueSpectrum t(bad); }(), std::invalid_argument);
}
