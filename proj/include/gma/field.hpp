#pragma once

#include <functional>

#include "gma/form.hpp"
#include "gma/grid.hpp"

namespace gma {

// Real scalar field over a torus grid. `zero_average` records whether the
// integral gauge \int phi omega^n = 0 has been applied.
struct ScalarField {
  TorusGrid grid;
  Eigen::ArrayXd values;
  bool zero_average = false;

  ScalarField() = default;
  explicit ScalarField(const TorusGrid& g) : grid(g), values(Eigen::ArrayXd::Zero(g.total())) {}
  ScalarField(const TorusGrid& g, Eigen::ArrayXd v);

  double sup_norm() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

// Grid-sampled real (p,p)-form. Storage is structure-of-arrays: one complex
// array per upper-triangle entry (row <= col) of the Lambda^p coefficient
// matrix; the lower triangle is implied by conjugation and diagonal arrays
// carry zero imaginary part, so every sample is Hermitian by construction.
class FormField {
 public:
  FormField() = default;

  static FormField zero(const TorusGrid& grid, int degree);
  static FormField constant(const TorusGrid& grid, const PPForm& value);

  bool valid() const { return degree_ >= 0; }
  const TorusGrid& grid() const { return grid_; }
  int dim() const { return grid_.complex_dim(); }
  int degree() const { return degree_; }
  int basis_size() const { return m_; }
  int comp_count() const { return m_ * (m_ + 1) / 2; }
  int comp_index(int row, int col) const { return row * m_ - row * (row - 1) / 2 + (col - row); }

  Eigen::ArrayXcd& comp(int row, int col);
  const Eigen::ArrayXcd& comp(int row, int col) const;
  // stored array for (row, col) in either triangle; sets `conjugated` when
  // the requested entry is the conjugate of the stored one
  const Eigen::ArrayXcd& raw(int row, int col, bool& conjugated) const;

  PPForm sample(long long point) const;
  PPForm mean() const;
  double max_abs() const;

  // exact cancellation of roundoff imaginary parts on diagonal components
  void realify_diagonal();

  FormField& operator+=(const FormField& o);
  FormField& operator-=(const FormField& o);
  FormField& operator*=(double s);

 private:
  TorusGrid grid_;
  int degree_ = -1;
  int m_ = 0;
  std::vector<Eigen::ArrayXcd> comps_;
};

FormField operator+(FormField a, const FormField& b);
FormField operator-(FormField a, const FormField& b);
FormField operator*(double s, FormField a);

// Pointwise exterior product; wedges are local so no transform is involved.
FormField wedge(const FormField& a, const FormField& b);
FormField wedge_power(const FormField& a, int k);
// Pointwise scalar multiple s(x) * f(x).
FormField scaled(const ScalarField& s, const FormField& f);

// Coefficient of a top-degree field relative to vol = prod_j (i dz^j dz̄^j).
Eigen::ArrayXd top_coefficient(const FormField& top);
// Pointwise ratio of two top-degree fields.
ScalarField top_ratio_field(const FormField& a, const FormField& ref);

// i ddbar phi by discrete-Fourier differentiation: exact for band-limited
// phi, Hermitian at every sample, zero average entrywise. First-derivative
// symbols vanish on the Nyquist bin (see TorusGrid::deriv_freq).
FormField spectral_ddbar(const ScalarField& phi);

// Quadrature of a top-degree field: mean of the coefficient (the torus has
// unit volume in the vol normalization), spectrally accurate for smooth
// integrands.
double integrate(const FormField& top);
double integrate_against(const ScalarField& phi, const FormField& top);

// phi - (\int phi omega^n / \int omega^n); idempotent. `omega` may be the
// (1,1) metric field or a precomputed top-degree field.
ScalarField zero_average_project(const ScalarField& phi, const FormField& omega);

// Sup norm over all spectral exterior-derivative components of alpha; the
// conjugate half is omitted since alpha is real. Constant fields pass
// exactly.
bool check_closed(const FormField& alpha, double tol, double* sup_out = nullptr);

// Sup of the Euclidean norm of the real gradient, computed spectrally.
double gradient_sup(const ScalarField& phi);

struct FieldExtremum {
  double value = 0.0;
  long long point = -1;
};

// Minimum over the grid of the smallest coefficient-Gram eigenvalue.
FieldExtremum min_gram_eigenvalue(const FormField& f);
// Minimum over the grid of the smallest eigenvalue of h relative to g,
// both (1,1) fields with g positive-definite pointwise.
FieldExtremum min_relative_eigenvalue(const FormField& h, const FormField& g);
// Minimum over the grid of ellipticity_bound applied to the relative
// spectrum of h against g.
FieldExtremum min_ellipticity_slack(const FormField& h, const FormField& g,
                                    const EllipticityParams& params);

// d/dz^j and d/dz̄^j of a complex component array, spectrally.
Eigen::ArrayXcd dz_derivative(const TorusGrid& grid, const Eigen::ArrayXcd& comp, int j);
Eigen::ArrayXcd dzbar_derivative(const TorusGrid& grid, const Eigen::ArrayXcd& comp, int j);

}  // namespace gma
