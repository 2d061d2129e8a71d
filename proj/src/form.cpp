#include "gma/form.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace gma {

namespace {

void check_same_space(const PPForm& a, const PPForm& b) {
  if (!a.valid() || !b.valid()) throw std::invalid_argument("PPForm: uninitialized operand");
  if (a.dim() != b.dim()) throw std::invalid_argument("PPForm: dimension mismatch");
}

}  // namespace

PPForm PPForm::zero(int dim, int degree) {
  if (dim < 1 || degree < 0 || degree > dim)
    throw std::invalid_argument("PPForm: invalid (dim, degree)");
  PPForm f;
  f.dim_ = dim;
  f.degree_ = degree;
  int m = static_cast<int>(binomial(dim, degree));
  f.coeffs_ = Eigen::MatrixXcd::Zero(m, m);
  return f;
}

PPForm PPForm::from_matrix(int dim, int degree, const Eigen::MatrixXcd& coeffs) {
  PPForm f = zero(dim, degree);
  if (coeffs.rows() != f.coeffs_.rows() || coeffs.cols() != f.coeffs_.cols())
    throw std::invalid_argument("PPForm: coefficient matrix has wrong shape");
  double scale = coeffs.cwiseAbs().maxCoeff();
  double dev = (coeffs - coeffs.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-12 * std::max(scale, 1e-300) && scale > 0)
    throw std::invalid_argument("PPForm: coefficients fail Hermitian symmetry");
  // mirror the upper triangle so Hermiticity is exact from here on
  for (int i = 0; i < coeffs.rows(); ++i) {
    f.coeffs_(i, i) = Complex(coeffs(i, i).real(), 0.0);
    for (int j = i + 1; j < coeffs.cols(); ++j) {
      f.coeffs_(i, j) = coeffs(i, j);
      f.coeffs_(j, i) = std::conj(coeffs(i, j));
    }
  }
  return f;
}

PPForm PPForm::euclidean_kahler(int dim) {
  PPForm f = zero(dim, 1);
  f.coeffs_.setIdentity();
  return f;
}

PPForm PPForm::volume_form(int dim) {
  PPForm f = zero(dim, dim);
  f.coeffs_(0, 0) = 1.0;
  return f;
}

PPForm PPForm::scalar_form(int dim, double value) {
  PPForm f = zero(dim, 0);
  f.coeffs_(0, 0) = value;
  return f;
}

Complex PPForm::coeff(const MultiIndex& I, const MultiIndex& J) const {
  return coeffs_(tuple_rank(dim_, I), tuple_rank(dim_, J));
}

void PPForm::set_coeff(int row, int col, Complex v) {
  if (row == col) {
    coeffs_(row, col) = Complex(v.real(), 0.0);
  } else {
    coeffs_(row, col) = v;
    coeffs_(col, row) = std::conj(v);
  }
}

double PPForm::top_value() const {
  if (degree_ != dim_) throw std::invalid_argument("PPForm: top_value needs degree n");
  return coeffs_(0, 0).real();
}

double PPForm::max_abs() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0; }

PPForm& PPForm::operator+=(const PPForm& o) {
  check_same_space(*this, o);
  if (degree_ != o.degree_) throw std::invalid_argument("PPForm: degree mismatch in sum");
  coeffs_ += o.coeffs_;
  return *this;
}

PPForm& PPForm::operator-=(const PPForm& o) {
  check_same_space(*this, o);
  if (degree_ != o.degree_) throw std::invalid_argument("PPForm: degree mismatch in sum");
  coeffs_ -= o.coeffs_;
  return *this;
}

PPForm& PPForm::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

PPForm operator+(PPForm a, const PPForm& b) { return a += b; }
PPForm operator-(PPForm a, const PPForm& b) { return a -= b; }
PPForm operator*(double s, PPForm a) { return a *= s; }
PPForm operator*(PPForm a, double s) { return a *= s; }

PPForm wedge(const PPForm& a, const PPForm& b) {
  check_same_space(a, b);
  int n = a.dim();
  if (a.degree() + b.degree() > n)
    throw std::invalid_argument("wedge: degree overflow");
  PPForm out = PPForm::zero(n, a.degree() + b.degree());
  const auto& table = wedge_table(n, a.degree(), b.degree());
  const auto& ca = a.coeffs();
  const auto& cb = b.coeffs();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(out.basis_size(), out.basis_size());
  for (const WedgeTerm& t : table)
    acc(t.out_row, t.out_col) += t.sign * ca(t.a_row, t.a_col) * cb(t.b_row, t.b_col);
  for (int i = 0; i < acc.rows(); ++i) {
    out.set_coeff(i, i, acc(i, i).real());
    for (int j = i + 1; j < acc.cols(); ++j) out.set_coeff(i, j, acc(i, j));
  }
  return out;
}

PPForm wedge_power(const PPForm& a, int k) {
  if (k < 0 || a.degree() * k > a.dim())
    throw std::invalid_argument("wedge_power: degree overflow");
  if (k == 0) return PPForm::scalar_form(a.dim(), 1.0);
  PPForm out = a;
  for (int i = 1; i < k; ++i) out = wedge(out, a);
  return out;
}

bool is_positive(const PPForm& a, bool strict) {
  if (!a.valid()) throw std::invalid_argument("is_positive: uninitialized form");
  double scale = a.max_abs();
  if (scale == 0.0) return !strict;  // the zero form
  return is_positive(a, strict, 1e-10 * scale);
}

bool is_positive(const PPForm& a, bool strict, double tol) {
  if (!a.valid()) throw std::invalid_argument("is_positive: uninitialized form");
  if (strict && tol <= 0.0)
    throw std::invalid_argument("is_positive: strict test needs tol > 0");
  if (!strict && tol < 0.0) throw std::invalid_argument("is_positive: tol must be >= 0");
  double lo = min_gram_eigenvalue(a);
  return strict ? lo >= tol : lo >= -tol;
}

double min_gram_eigenvalue(const PPForm& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.coeffs(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double top_ratio(const PPForm& a, const PPForm& ref) {
  check_same_space(a, ref);
  if (a.degree() != a.dim() || ref.degree() != ref.dim())
    throw std::invalid_argument("top_ratio: both forms must have top degree");
  double r = ref.top_value();
  if (r == 0.0) throw std::invalid_argument("top_ratio: reference form vanishes");
  return a.top_value() / r;
}

EigenvalueSpectrum::EigenvalueSpectrum(Eigen::VectorXd v) : values(std::move(v)) {
  if (!values.allFinite()) throw std::invalid_argument("EigenvalueSpectrum: non-finite value");
  std::sort(values.data(), values.data() + values.size(), std::greater<double>());
}

EigenvalueSpectrum relative_eigenvalues(const Eigen::MatrixXcd& g, const Eigen::MatrixXcd& h) {
  if (g.rows() != g.cols() || h.rows() != h.cols() || g.rows() != h.rows())
    throw std::invalid_argument("relative_eigenvalues: shape mismatch");
  Eigen::LLT<Eigen::MatrixXcd> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("relative_eigenvalues: g is not positive-definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, g, Eigen::EigenvaluesOnly);
  return EigenvalueSpectrum(es.eigenvalues());
}

Eigen::MatrixXcd contraction_matrix(const PPForm& alpha, const PPForm& chi) {
  check_same_space(alpha, chi);
  int n = alpha.dim();
  if (alpha.degree() != n - 1 || chi.degree() != 1)
    throw std::invalid_argument("contraction_matrix: need (n-1,n-1) and (1,1) forms");
  if (!is_positive(chi, true, 1e-12 * std::max(chi.max_abs(), 1.0)))
    throw std::invalid_argument("contraction_matrix: chi must be strictly positive");
  double chin = wedge_power(chi, n).top_value();

  const auto& singles = index_tuples(n, 1);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  MultiIndex comp_k(n - 1), comp_l(n - 1);
  for (int k = 0; k < n; ++k) {
    comp_k.clear();
    for (int i = 0; i < n; ++i)
      if (i != k) comp_k.push_back(i);
    int sk = merge_sign(comp_k, singles[k]);
    for (int l = 0; l < n; ++l) {
      comp_l.clear();
      for (int i = 0; i < n; ++i)
        if (i != l) comp_l.push_back(i);
      int sl = merge_sign(comp_l, singles[l]);
      A(k, l) = static_cast<double>(sk * sl) * alpha.coeff(comp_k, comp_l) / chin;
    }
  }
  return A;
}

PPForm cone_operator(const PPForm& omega, std::span<const PPForm> alphas, double t) {
  if (omega.degree() != 1) throw std::invalid_argument("cone_operator: omega must be (1,1)");
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("cone_operator: t outside [0,1]");
  int n = omega.dim();
  PPForm out = static_cast<double>(n) * wedge_power(omega, n - 1);
  for (int k = 1; k <= static_cast<int>(alphas.size()) && k <= n - 1; ++k) {
    const PPForm& ak = alphas[k - 1];
    if (!ak.valid()) continue;
    if (ak.dim() != n || ak.degree() != k)
      throw std::invalid_argument("cone_operator: alpha_k has wrong degree");
    PPForm term = wedge(ak, wedge_power(omega, n - k - 1));
    out -= (t * static_cast<double>(n - k)) * term;
  }
  return out;
}

double ellipticity_bound(const EigenvalueSpectrum& spectrum, const EllipticityParams& params) {
  int n = spectrum.size();
  if (params.delta <= 0.0) throw std::invalid_argument("ellipticity_bound: delta must be > 0");
  if (params.k0 < 1 || params.k0 > n) throw std::invalid_argument("ellipticity_bound: k0 out of range");
  for (int i = 0; i < n; ++i)
    if (spectrum[i] <= 0.0) throw std::invalid_argument("ellipticity_bound: eigenvalues must be > 0");
  double sum = 0.0;
  for (const MultiIndex& I : index_tuples(n, params.k0)) {
    double prod = 1.0;
    for (int i : I) prod *= spectrum[i];
    sum += 1.0 / prod;
  }
  double factor = 1.0 / static_cast<double>(binomial(n, params.k0));
  return 1.0 - params.delta * factor * sum;
}

double solve_lambda1(const Eigen::VectorXd& a_diag, double h, const EigenvalueSpectrum& tail) {
  int n = static_cast<int>(a_diag.size());
  if (tail.size() != n - 1) throw std::invalid_argument("solve_lambda1: tail must have n-1 entries");
  if (h <= 0.0) throw std::invalid_argument("solve_lambda1: h must be > 0");
  double tail_prod = 1.0;
  double num = h;
  for (int k = 0; k < n - 1; ++k) {
    tail_prod *= tail[k];
    num += a_diag[k + 1] * tail[k];
  }
  double den = tail_prod - a_diag[0];
  if (den <= 0.0)
    throw ConeViolationError("solve_lambda1: lambda_2...lambda_n - A(1,1) is not positive");
  return num / den;
}

}  // namespace gma
