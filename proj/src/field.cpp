#include "gma/field.hpp"

#include <cmath>
#include <numbers>

#include "gma/fft.hpp"

namespace gma {

namespace {

constexpr double kPi = std::numbers::pi;

// d/dz^j and d/dz̄^j symbols at the integer frequency pair (kx, ky) of the
// j-th complex coordinate, for the convention d/dz = (d/dx - i d/dy)/2.
inline Complex sigma_symbol(int kx, int ky) { return {kPi * ky, kPi * kx}; }
inline Complex tau_symbol(int kx, int ky) { return {-kPi * ky, kPi * kx}; }

template <class F>
void for_each_point(const TorusGrid& g, F&& f) {
  const int A = g.axes();
  int c[6] = {0, 0, 0, 0, 0, 0};
  const long long total = g.total();
  for (long long idx = 0; idx < total; ++idx) {
    f(idx, c);
    for (int a = A - 1; a >= 0; --a) {
      if (++c[a] < g.size(a)) break;
      c[a] = 0;
    }
  }
}

void check_same_grid(const FormField& a, const FormField& b, const char* op) {
  if (!a.valid() || !b.valid() || !(a.grid() == b.grid()))
    throw std::invalid_argument(std::string(op) + ": grid mismatch");
}

// ---- small Hermitian eigenvalue kernels (closed form, n <= 3) ----

inline double min_eig_1(const Eigen::Matrix<Complex, 1, 1>& M) { return M(0, 0).real(); }

inline void eigs_2(const Eigen::Matrix<Complex, 2, 2>& M, double* out) {
  double a = M(0, 0).real(), b = M(1, 1).real();
  double mid = 0.5 * (a + b);
  double d = std::hypot(0.5 * (a - b), std::abs(M(0, 1)));
  out[0] = mid - d;
  out[1] = mid + d;
}

inline void eigs_3(const Eigen::Matrix<Complex, 3, 3>& M, double* out) {
  double q = (M(0, 0).real() + M(1, 1).real() + M(2, 2).real()) / 3.0;
  double p1 = std::norm(M(0, 1)) + std::norm(M(0, 2)) + std::norm(M(1, 2));
  double a = M(0, 0).real() - q, b = M(1, 1).real() - q, c = M(2, 2).real() - q;
  double p2 = a * a + b * b + c * c + 2.0 * p1;
  if (p2 <= 0.0) {
    out[0] = out[1] = out[2] = q;
    return;
  }
  double p = std::sqrt(p2 / 6.0);
  Eigen::Matrix<Complex, 3, 3> B = (M - q * Eigen::Matrix<Complex, 3, 3>::Identity()) / p;
  Complex det = B(0, 0) * (B(1, 1) * B(2, 2) - B(1, 2) * B(2, 1)) -
                B(0, 1) * (B(1, 0) * B(2, 2) - B(1, 2) * B(2, 0)) +
                B(0, 2) * (B(1, 0) * B(2, 1) - B(1, 1) * B(2, 0));
  double r = std::clamp(0.5 * det.real(), -1.0, 1.0);
  double phi = std::acos(r) / 3.0;
  double hi = q + 2.0 * p * std::cos(phi);
  double lo = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
  out[0] = lo;
  out[1] = 3.0 * q - hi - lo;
  out[2] = hi;
}

template <int N>
void hermitian_eigs(const Eigen::Matrix<Complex, N, N>& M, double* out) {
  if constexpr (N == 1)
    out[0] = min_eig_1(M);
  else if constexpr (N == 2)
    eigs_2(M, out);
  else
    eigs_3(M, out);
}

// Cholesky g = L L^*; returns false when g is not positive-definite.
template <int N>
bool cholesky(const Eigen::Matrix<Complex, N, N>& g, Eigen::Matrix<Complex, N, N>& L) {
  L.setZero();
  for (int j = 0; j < N; ++j) {
    double d = g(j, j).real();
    for (int k = 0; k < j; ++k) d -= std::norm(L(j, k));
    if (!(d > 0.0)) return false;
    L(j, j) = std::sqrt(d);
    for (int i = j + 1; i < N; ++i) {
      Complex s = g(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * std::conj(L(j, k));
      L(i, j) = s / L(j, j).real();
    }
  }
  return true;
}

// Relative spectrum of (h, g) via B = L^{-1} h L^{-*}, ascending.
template <int N>
bool relative_eigs(const Eigen::Matrix<Complex, N, N>& h, const Eigen::Matrix<Complex, N, N>& g,
                   double* out) {
  Eigen::Matrix<Complex, N, N> L;
  if (!cholesky<N>(g, L)) return false;
  Eigen::Matrix<Complex, N, N> Y = h;
  // Y <- L^{-1} h (forward substitution on each column)
  for (int c = 0; c < N; ++c)
    for (int r = 0; r < N; ++r) {
      Complex s = Y(r, c);
      for (int k = 0; k < r; ++k) s -= L(r, k) * Y(k, c);
      Y(r, c) = s / L(r, r).real();
    }
  // B <- Y L^{-*} computed as (L^{-1} Y^*)^*
  Eigen::Matrix<Complex, N, N> Z = Y.adjoint();
  for (int c = 0; c < N; ++c)
    for (int r = 0; r < N; ++r) {
      Complex s = Z(r, c);
      for (int k = 0; k < r; ++k) s -= L(r, k) * Z(k, c);
      Z(r, c) = s / L(r, r).real();
    }
  Eigen::Matrix<Complex, N, N> B = Z.adjoint();
  hermitian_eigs<N>(B, out);
  return true;
}

template <int N>
void load_matrix(const FormField& f, long long i, Eigen::Matrix<Complex, N, N>& M) {
  for (int r = 0; r < N; ++r) {
    M(r, r) = f.comp(r, r)[i].real();
    for (int c = r + 1; c < N; ++c) {
      Complex v = f.comp(r, c)[i];
      M(r, c) = v;
      M(c, r) = std::conj(v);
    }
  }
}

struct MinTracker {
  double value = std::numeric_limits<double>::infinity();
  long long point = -1;
  void consider(double v, long long i) {
    if (v < value || (v == value && (point < 0 || i < point))) {
      value = v;
      point = i;
    }
  }
  void merge(const MinTracker& o) { consider(o.value, o.point); }
};

template <class PerPoint>
FieldExtremum scan_points(long long total, PerPoint&& per_point) {
  MinTracker global;
#pragma omp parallel
  {
    MinTracker local;
#pragma omp for schedule(static)
    for (long long i = 0; i < total; ++i) local.consider(per_point(i), i);
#pragma omp critical
    global.merge(local);
  }
  return {global.value, global.point};
}

}  // namespace

ScalarField::ScalarField(const TorusGrid& g, Eigen::ArrayXd v) : grid(g), values(std::move(v)) {
  if (values.size() != g.total()) throw std::invalid_argument("ScalarField: size mismatch");
  if (!values.allFinite()) throw std::invalid_argument("ScalarField: non-finite values");
}

FormField FormField::zero(const TorusGrid& grid, int degree) {
  if (!grid.valid()) throw std::invalid_argument("FormField: invalid grid");
  if (degree < 0 || degree > grid.complex_dim())
    throw std::invalid_argument("FormField: degree out of range");
  FormField f;
  f.grid_ = grid;
  f.degree_ = degree;
  f.m_ = static_cast<int>(binomial(grid.complex_dim(), degree));
  f.comps_.assign(f.comp_count(), Eigen::ArrayXcd::Zero(grid.total()));
  return f;
}

FormField FormField::constant(const TorusGrid& grid, const PPForm& value) {
  if (value.dim() != grid.complex_dim())
    throw std::invalid_argument("FormField: form dimension does not match grid");
  FormField f = zero(grid, value.degree());
  for (int r = 0; r < f.m_; ++r)
    for (int c = r; c < f.m_; ++c) f.comp(r, c).setConstant(value.coeff(r, c));
  return f;
}

Eigen::ArrayXcd& FormField::comp(int row, int col) { return comps_[comp_index(row, col)]; }
const Eigen::ArrayXcd& FormField::comp(int row, int col) const {
  return comps_[comp_index(row, col)];
}

const Eigen::ArrayXcd& FormField::raw(int row, int col, bool& conjugated) const {
  if (row <= col) {
    conjugated = false;
    return comps_[comp_index(row, col)];
  }
  conjugated = true;
  return comps_[comp_index(col, row)];
}

PPForm FormField::sample(long long point) const {
  PPForm f = PPForm::zero(dim(), degree_);
  for (int r = 0; r < m_; ++r)
    for (int c = r; c < m_; ++c) f.set_coeff(r, c, comp(r, c)[point]);
  return f;
}

PPForm FormField::mean() const {
  PPForm f = PPForm::zero(dim(), degree_);
  for (int r = 0; r < m_; ++r)
    for (int c = r; c < m_; ++c) f.set_coeff(r, c, comp(r, c).mean());
  return f;
}

double FormField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comps_) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

void FormField::realify_diagonal() {
  for (int r = 0; r < m_; ++r) {
    auto& d = comp(r, r);
    d.imag().setZero();
  }
}

FormField& FormField::operator+=(const FormField& o) {
  check_same_grid(*this, o, "FormField sum");
  if (degree_ != o.degree_) throw std::invalid_argument("FormField sum: degree mismatch");
  for (size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
  return *this;
}

FormField& FormField::operator-=(const FormField& o) {
  check_same_grid(*this, o, "FormField sum");
  if (degree_ != o.degree_) throw std::invalid_argument("FormField sum: degree mismatch");
  for (size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_[i];
  return *this;
}

FormField& FormField::operator*=(double s) {
  for (auto& c : comps_) c *= s;
  return *this;
}

FormField operator+(FormField a, const FormField& b) { return a += b; }
FormField operator-(FormField a, const FormField& b) { return a -= b; }
FormField operator*(double s, FormField a) { return a *= s; }

FormField wedge(const FormField& a, const FormField& b) {
  check_same_grid(a, b, "wedge");
  int n = a.dim();
  if (a.degree() + b.degree() > n) throw std::invalid_argument("wedge: degree overflow");
  FormField out = FormField::zero(a.grid(), a.degree() + b.degree());
  const auto& table = wedge_table(n, a.degree(), b.degree());
  for (const WedgeTerm& t : table) {
    bool ca = false, cb = false;
    const Eigen::ArrayXcd& A = a.raw(t.a_row, t.a_col, ca);
    const Eigen::ArrayXcd& B = b.raw(t.b_row, t.b_col, cb);
    Eigen::ArrayXcd& O = out.comp(t.out_row, t.out_col);
    if (ca && cb)
      O += t.sign * (A.conjugate() * B.conjugate());
    else if (ca)
      O += t.sign * (A.conjugate() * B);
    else if (cb)
      O += t.sign * (A * B.conjugate());
    else
      O += t.sign * (A * B);
  }
  out.realify_diagonal();
  return out;
}

FormField wedge_power(const FormField& a, int k) {
  if (k < 0 || a.degree() * k > a.dim()) throw std::invalid_argument("wedge_power: degree overflow");
  if (k == 0) return FormField::constant(a.grid(), PPForm::scalar_form(a.dim(), 1.0));
  FormField out = a;
  for (int i = 1; i < k; ++i) out = wedge(out, a);
  return out;
}

FormField scaled(const ScalarField& s, const FormField& f) {
  if (!(s.grid == f.grid())) throw std::invalid_argument("scaled: grid mismatch");
  FormField out = f;
  for (int r = 0; r < f.basis_size(); ++r)
    for (int c = r; c < f.basis_size(); ++c) out.comp(r, c) *= s.values;
  return out;
}

Eigen::ArrayXd top_coefficient(const FormField& top) {
  if (top.degree() != top.dim())
    throw std::invalid_argument("top_coefficient: field must have top degree");
  return top.comp(0, 0).real();
}

ScalarField top_ratio_field(const FormField& a, const FormField& ref) {
  check_same_grid(a, ref, "top_ratio_field");
  Eigen::ArrayXd r = top_coefficient(ref);
  if ((r == 0.0).any()) throw std::invalid_argument("top_ratio_field: reference vanishes");
  return ScalarField(a.grid(), top_coefficient(a) / r);
}

FormField spectral_ddbar(const ScalarField& phi) {
  if (!phi.values.allFinite()) throw std::invalid_argument("spectral_ddbar: non-finite input");
  const TorusGrid& g = phi.grid;
  const int n = g.complex_dim();
  Eigen::ArrayXcd spec = fft_forward_copy(g, phi.values);

  FormField out = FormField::zero(g, 1);
  std::vector<Eigen::ArrayXcd> hat(out.comp_count(), Eigen::ArrayXcd(g.total()));
  Complex sig[3], tau[3];
  for_each_point(g, [&](long long idx, const int* c) {
    for (int j = 0; j < n; ++j) {
      int kx = g.deriv_freq(2 * j, c[2 * j]);
      int ky = g.deriv_freq(2 * j + 1, c[2 * j + 1]);
      sig[j] = sigma_symbol(kx, ky);
      tau[j] = tau_symbol(kx, ky);
    }
    Complex v = spec[idx];
    for (int r = 0; r < n; ++r)
      for (int c2 = r; c2 < n; ++c2) hat[out.comp_index(r, c2)][idx] = sig[r] * tau[c2] * v;
  });
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c) {
      Eigen::ArrayXcd& h = hat[out.comp_index(r, c)];
      fft_inverse(g, h);
      out.comp(r, c) = h;
    }
  out.realify_diagonal();
  return out;
}

double integrate(const FormField& top) { return top_coefficient(top).mean(); }

double integrate_against(const ScalarField& phi, const FormField& top) {
  if (!(phi.grid == top.grid())) throw std::invalid_argument("integrate_against: grid mismatch");
  return (phi.values * top_coefficient(top)).mean();
}

ScalarField zero_average_project(const ScalarField& phi, const FormField& omega) {
  // (1,1) metrics are raised to top degree; top-degree input is used as is
  FormField top;
  if (omega.degree() == 1)
    top = wedge_power(omega, omega.dim());
  else if (omega.degree() == omega.dim())
    top = omega;
  else
    throw std::invalid_argument("zero_average_project: omega must be (1,1) or top degree");
  double mass = integrate(top);
  if (mass == 0.0) throw std::invalid_argument("zero_average_project: omega^n has zero mass");
  double avg = integrate_against(phi, top) / mass;
  ScalarField out(phi.grid, phi.values - avg);
  out.zero_average = true;
  return out;
}

bool check_closed(const FormField& alpha, double tol, double* sup_out) {
  const TorusGrid& g = alpha.grid();
  const int n = g.complex_dim();
  const int p = alpha.degree();
  if (p == n) {
    if (sup_out) *sup_out = 0.0;
    return true;
  }
  const auto& rows = index_tuples(n, p);
  const int m = alpha.basis_size();

  // forward transforms of every (I, J) component, conjugate half included
  std::vector<Eigen::ArrayXcd> hat(m * m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      bool conj = false;
      const Eigen::ArrayXcd& src = alpha.raw(r, c, conj);
      Eigen::ArrayXcd tmp = conj ? src.conjugate().eval() : src;
      fft_forward(g, tmp);
      hat[r * m + c] = std::move(tmp);
    }

  double sup = 0.0;
  const auto& out_rows = index_tuples(n, p + 1);
  for (const MultiIndex& M : out_rows) {
    for (int jcol = 0; jcol < m; ++jcol) {
      Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(g.total());
      for (size_t pos = 0; pos < M.size(); ++pos) {
        int i = M[pos];
        MultiIndex rest;
        for (size_t q = 0; q < M.size(); ++q)
          if (q != pos) rest.push_back(M[q]);
        int row = tuple_rank(n, rest);
        double sign = (pos % 2 == 0) ? 1.0 : -1.0;
        const Eigen::ArrayXcd& h = hat[row * m + jcol];
        for_each_point(g, [&](long long idx, const int* c) {
          int kx = g.deriv_freq(2 * i, c[2 * i]);
          int ky = g.deriv_freq(2 * i + 1, c[2 * i + 1]);
          acc[idx] += sign * sigma_symbol(kx, ky) * h[idx];
        });
      }
      fft_inverse(g, acc);
      sup = std::max(sup, acc.cwiseAbs().maxCoeff());
    }
  }
  (void)rows;
  if (sup_out) *sup_out = sup;
  return sup <= tol;
}

double gradient_sup(const ScalarField& phi) {
  const TorusGrid& g = phi.grid;
  Eigen::ArrayXcd spec = fft_forward_copy(g, phi.values);
  Eigen::ArrayXd sumsq = Eigen::ArrayXd::Zero(g.total());
  for (int a = 0; a < g.axes(); ++a) {
    Eigen::ArrayXcd d(g.total());
    for_each_point(g, [&](long long idx, const int* c) {
      double k = 2.0 * kPi * g.deriv_freq(a, c[a]);
      d[idx] = Complex(0.0, k) * spec[idx];
    });
    fft_inverse(g, d);
    sumsq += d.real().square();
  }
  return std::sqrt(sumsq.maxCoeff());
}

FieldExtremum min_gram_eigenvalue(const FormField& f) {
  const long long total = f.grid().total();
  switch (f.basis_size()) {
    case 1: {
      const Eigen::ArrayXd d = f.comp(0, 0).real();
      return scan_points(total, [&](long long i) { return d[i]; });
    }
    case 2:
      return scan_points(total, [&](long long i) {
        Eigen::Matrix<Complex, 2, 2> M;
        load_matrix<2>(f, i, M);
        double e[2];
        eigs_2(M, e);
        return e[0];
      });
    case 3:
      return scan_points(total, [&](long long i) {
        Eigen::Matrix<Complex, 3, 3> M;
        load_matrix<3>(f, i, M);
        double e[3];
        eigs_3(M, e);
        return e[0];
      });
    default:
      throw std::invalid_argument("min_gram_eigenvalue: unsupported basis size");
  }
}

namespace {

template <int N>
FieldExtremum min_rel_eig_impl(const FormField& h, const FormField& g) {
  const long long total = h.grid().total();
  return scan_points(total, [&](long long i) {
    Eigen::Matrix<Complex, N, N> H, G;
    load_matrix<N>(h, i, H);
    load_matrix<N>(g, i, G);
    double e[N];
    if (!relative_eigs<N>(H, G, e))
      throw std::invalid_argument("min_relative_eigenvalue: g not positive-definite on the grid");
    return e[0];
  });
}

template <int N>
FieldExtremum min_slack_impl(const FormField& h, const FormField& g,
                             const EllipticityParams& params) {
  const long long total = h.grid().total();
  const auto& tuples = index_tuples(N, params.k0);
  const double factor = params.delta / static_cast<double>(binomial(N, params.k0));
  return scan_points(total, [&](long long i) {
    Eigen::Matrix<Complex, N, N> H, G;
    load_matrix<N>(h, i, H);
    load_matrix<N>(g, i, G);
    double e[N];
    if (!relative_eigs<N>(H, G, e))
      throw std::invalid_argument("min_ellipticity_slack: g not positive-definite on the grid");
    for (int k = 0; k < N; ++k)
      if (e[k] <= 0.0) return -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const MultiIndex& I : tuples) {
      double prod = 1.0;
      for (int q : I) prod *= e[q];
      sum += 1.0 / prod;
    }
    return 1.0 - factor * sum;
  });
}

}  // namespace

FieldExtremum min_relative_eigenvalue(const FormField& h, const FormField& g) {
  check_same_grid(h, g, "min_relative_eigenvalue");
  if (h.degree() != 1 || g.degree() != 1)
    throw std::invalid_argument("min_relative_eigenvalue: needs (1,1) fields");
  switch (h.dim()) {
    case 1: return min_rel_eig_impl<1>(h, g);
    case 2: return min_rel_eig_impl<2>(h, g);
    default: return min_rel_eig_impl<3>(h, g);
  }
}

FieldExtremum min_ellipticity_slack(const FormField& h, const FormField& g,
                                    const EllipticityParams& params) {
  check_same_grid(h, g, "min_ellipticity_slack");
  if (params.delta <= 0.0 || params.k0 < 1 || params.k0 > h.dim())
    throw std::invalid_argument("min_ellipticity_slack: invalid ellipticity parameters");
  switch (h.dim()) {
    case 1: return min_slack_impl<1>(h, g, params);
    case 2: return min_slack_impl<2>(h, g, params);
    default: return min_slack_impl<3>(h, g, params);
  }
}

namespace {

Eigen::ArrayXcd derivative_impl(const TorusGrid& g, const Eigen::ArrayXcd& comp, int j, bool bar) {
  if (j < 0 || j >= g.complex_dim()) throw std::invalid_argument("derivative: bad direction");
  Eigen::ArrayXcd spec = comp;
  fft_forward(g, spec);
  for_each_point(g, [&](long long idx, const int* c) {
    int kx = g.deriv_freq(2 * j, c[2 * j]);
    int ky = g.deriv_freq(2 * j + 1, c[2 * j + 1]);
    spec[idx] *= bar ? tau_symbol(kx, ky) : sigma_symbol(kx, ky);
  });
  fft_inverse(g, spec);
  return spec;
}

}  // namespace

Eigen::ArrayXcd dz_derivative(const TorusGrid& g, const Eigen::ArrayXcd& comp, int j) {
  return derivative_impl(g, comp, j, false);
}

Eigen::ArrayXcd dzbar_derivative(const TorusGrid& g, const Eigen::ArrayXcd& comp, int j) {
  return derivative_impl(g, comp, j, true);
}

}  // namespace gma
