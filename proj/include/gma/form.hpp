#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "gma/multi_index.hpp"

namespace gma {

using Complex = std::complex<double>;

// Thrown when a pointwise cone / positivity precondition fails.
struct ConeViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A constant real (p,p)-form on C^n in the Hermitian coefficient
// representation: writing s_p = i^p (-1)^{p(p-1)/2},
//
//   alpha = sum_{|I|=|J|=p} coeff(I,J) * s_p * dz^I ∧ dz̄^J,
//
// indexed by increasing multi-indices in lexicographic order. With this
// normalization the form is real iff the coefficient matrix is Hermitian,
// the Euclidean Kähler form has coefficient matrix Id, omega^n = n! * vol
// for the Euclidean omega, and positivity in the sense of a non-negative
// Hermitian form on Lambda^p T^{(1,0)} is exactly PSD of the coefficients.
// Hermiticity is structural: only the upper triangle is ever computed, the
// rest is mirrored by conjugation, so wedge/add/scale preserve it exactly.
class PPForm {
 public:
  PPForm() = default;

  static PPForm zero(int dim, int degree);
  // Validates Hermiticity (relative tolerance 1e-12; violations are
  // rejected, not repaired) and mirrors the upper triangle.
  static PPForm from_matrix(int dim, int degree, const Eigen::MatrixXcd& coeffs);
  static PPForm euclidean_kahler(int dim);    // (1,1), coefficients Id
  static PPForm volume_form(int dim);         // (n,n), coefficient 1
  static PPForm scalar_form(int dim, double value);  // (0,0)

  bool valid() const { return dim_ > 0; }
  int dim() const { return dim_; }
  int degree() const { return degree_; }
  // number of basis multi-indices, C(dim, degree)
  int basis_size() const { return static_cast<int>(coeffs_.rows()); }

  const Eigen::MatrixXcd& coeffs() const { return coeffs_; }
  Complex coeff(int row, int col) const { return coeffs_(row, col); }
  Complex coeff(const MultiIndex& I, const MultiIndex& J) const;
  void set_coeff(int row, int col, Complex v);  // mirrors conjugate entry

  // top coefficient relative to vol = prod_j (i dz^j ∧ dz̄^j); degree n only
  double top_value() const;
  double max_abs() const;

  PPForm& operator+=(const PPForm& o);
  PPForm& operator-=(const PPForm& o);
  PPForm& operator*=(double s);

 private:
  int dim_ = 0;
  int degree_ = 0;
  Eigen::MatrixXcd coeffs_;
};

PPForm operator+(PPForm a, const PPForm& b);
PPForm operator-(PPForm a, const PPForm& b);
PPForm operator*(double s, PPForm a);
PPForm operator*(PPForm a, double s);

// Exterior product in the Hermitian coefficient representation. Bilinear,
// commutative for (p,p) x (q,q), associative; rejects degree overflow.
PPForm wedge(const PPForm& a, const PPForm& b);
PPForm wedge_power(const PPForm& a, int k);

// PSD test of the induced Hermitian form on Lambda^p. Non-strict: all
// eigenvalues >= -tol; strict: all eigenvalues >= tol. The two-argument
// overload uses the default tol = 1e-10 * max|entry|; an explicit tol <= 0
// with strict is rejected.
bool is_positive(const PPForm& a, bool strict = false);
bool is_positive(const PPForm& a, bool strict, double tol);

// Smallest eigenvalue of the Lambda^p coefficient Gram matrix.
double min_gram_eigenvalue(const PPForm& a);

// The unique real r with a = r * ref, both of top degree.
double top_ratio(const PPForm& a, const PPForm& ref);

// Eigenvalues sorted descending, lambda_1 >= ... >= lambda_n.
struct EigenvalueSpectrum {
  Eigen::VectorXd values;

  EigenvalueSpectrum() = default;
  explicit EigenvalueSpectrum(Eigen::VectorXd v);
  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
};

// delta, k0 witnessing alpha_{k0} > delta * omega^{k0}.
struct EllipticityParams {
  double delta = 0.0;
  int k0 = 0;
};

// Spectrum of the generalized Hermitian problem h v = lambda g v, g > 0.
EigenvalueSpectrum relative_eigenvalues(const Eigen::MatrixXcd& g, const Eigen::MatrixXcd& h);

// Contraction matrix A of an (n-1,n-1)-form against a strictly positive chi:
//   wedge(alpha, beta) = (sum_{k,l} A(k,l) beta(k,l)) * chi^n
// for every (1,1)-form beta. A is PSD iff alpha is positive.
Eigen::MatrixXcd contraction_matrix(const PPForm& alpha, const PPForm& chi);

// n*omega^{n-1} - t * sum_{k=1}^{n-1} (n-k) alpha_k ∧ omega^{n-k-1}.
// alphas[k-1] is alpha_k (degree k); invalid entries count as zero; a k = n
// entry contributes nothing.
PPForm cone_operator(const PPForm& omega, std::span<const PPForm> alphas, double t);

// Slack of the uniform-ellipticity inequality,
//   1 - delta * (k0! (n-k0)! / n!) * sum_{|I|=k0} 1 / prod_{i in I} lambda_i,
// for the relative eigenvalues of omega_phi against omega. Requires all
// lambda_i > 0.
double ellipticity_bound(const EigenvalueSpectrum& spectrum, const EllipticityParams& params);

// Largest relative eigenvalue from the diagonalized residual
// lambda_1 ... lambda_n = sum_k A(k,k) lambda_k + h:
//   lambda_1 = (h + sum_{k>=2} A(k,k) lambda_k) / (lambda_2...lambda_n - A(1,1)).
// a_diag holds the real diagonal of A (size n), tail the eigenvalues
// lambda_2..lambda_n. Throws ConeViolationError when the denominator is
// not positive.
double solve_lambda1(const Eigen::VectorXd& a_diag, double h, const EigenvalueSpectrum& tail);

}  // namespace gma
