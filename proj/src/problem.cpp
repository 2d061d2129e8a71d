#include "gma/problem.hpp"

#include <algorithm>

namespace gma {

namespace {

// chi is required constant-coefficient; tolerate only roundoff deviation.
void require_constant(const FormField& f, const char* name) {
  PPForm m = f.mean();
  double scale = std::max(f.max_abs(), 1e-300);
  FormField dev = f - FormField::constant(f.grid(), m);
  if (dev.max_abs() > 1e-12 * scale)
    throw InvalidProblemError(std::string(name) + " must be constant-coefficient");
}

}  // namespace

double GmaProblem::chi_top() const {
  return wedge_power(chi.mean(), dim()).top_value();
}

std::vector<std::string> ProblemReport::failures() const {
  std::vector<std::string> out;
  if (!shapes_ok) out.push_back("shapes");
  if (!omega_positive) out.push_back("omega_positivity");
  if (!chi_ok) out.push_back("chi");
  if (!positivity_ok) out.push_back("alpha_positivity");
  if (!closedness_ok) out.push_back("closedness");
  if (!consistency_ok) out.push_back("consistency");
  if (!cone_ok) out.push_back("cone");
  if (!witness_ok) out.push_back("witness");
  if (!alpha_n_mass_ok) out.push_back("alpha_n_mass");
  return out;
}

ProblemReport validate(const GmaProblem& p) {
  ProblemReport rep;
  const int n = p.dim();

  if (!p.grid.valid() || !p.omega.valid() || !p.chi.valid() || p.omega.degree() != 1 ||
      p.chi.degree() != 1 || static_cast<int>(p.alphas.size()) > n) {
    rep.shapes_ok = false;
    return rep;
  }
  for (int k = 1; k <= static_cast<int>(p.alphas.size()); ++k)
    if (p.has_alpha(k) && (p.alpha(k).degree() != k || !(p.alpha(k).grid() == p.grid)))
      rep.shapes_ok = false;
  if (!rep.shapes_ok) return rep;

  rep.min_omega_eig = min_gram_eigenvalue(p.omega).value;
  rep.omega_positive = rep.min_omega_eig > 0.0;

  try {
    require_constant(p.chi, "chi");
    rep.chi_ok = min_gram_eigenvalue(p.chi).value > 0.0;
  } catch (const InvalidProblemError&) {
    rep.chi_ok = false;
  }

  // pointwise positivity and closedness of every alpha_k
  rep.min_alpha_eig = std::numeric_limits<double>::infinity();
  bool any_alpha = false;
  for (int k = 1; k <= n; ++k) {
    if (!p.has_alpha(k)) continue;
    any_alpha = true;
    const FormField& a = p.alpha(k);
    double scale = 1.0 + a.max_abs();
    rep.min_alpha_eig = std::min(rep.min_alpha_eig, min_gram_eigenvalue(a).value);
    if (min_gram_eigenvalue(a).value < -p.tol.pos_tol * scale) rep.positivity_ok = false;
    double sup = 0.0;
    check_closed(a, p.tol.quad_tol * scale, &sup);
    rep.max_closedness_sup = std::max(rep.max_closedness_sup, sup / scale);
    if (sup > p.tol.quad_tol * scale) rep.closedness_ok = false;
  }
  if (!any_alpha) rep.positivity_ok = false;

  // consistency: ∫ omega^n = sum_k ∫ alpha_k ∧ omega^{n-k}
  FormField omega_n = wedge_power(p.omega, n);
  double mass_omega = integrate(omega_n);
  double mass_rhs = 0.0;
  for (int k = 1; k <= n; ++k) {
    if (!p.has_alpha(k)) continue;
    mass_rhs += k == n ? integrate(p.alpha(n)) : integrate(wedge(p.alpha(k), wedge_power(p.omega, n - k)));
  }
  rep.consistency_error = std::abs(mass_omega - mass_rhs) / std::max(std::abs(mass_omega), 1e-300);
  rep.consistency_ok = rep.consistency_error <= p.tol.quad_tol;

  // cone condition at phi = 0, t = 1
  rep.cone_min_eig = min_gram_eigenvalue(cone_field(p, p.omega, 1.0)).value;
  rep.cone_ok = rep.cone_min_eig > 0.0;

  // witness alpha_{k0} - delta omega^{k0} >= 0 pointwise
  if (p.witness.k0 < 1 || p.witness.k0 > n || p.witness.delta <= 0.0 || !p.has_alpha(p.witness.k0)) {
    rep.witness_ok = false;
  } else {
    FormField w = p.alpha(p.witness.k0) - p.witness.delta * wedge_power(p.omega, p.witness.k0);
    rep.witness_min_eig = min_gram_eigenvalue(w).value;
    rep.witness_ok = rep.witness_min_eig >= -p.tol.pos_tol * (1.0 + w.max_abs());
  }

  rep.alpha_n_mass = p.has_alpha(n) ? integrate(p.alpha(n)) : 0.0;
  rep.alpha_n_mass_ok = rep.alpha_n_mass > 0.0;
  return rep;
}

NormalizationConstants normalization_constants(const GmaProblem& p) {
  const int n = p.dim();
  if (!p.has_alpha(n)) throw InvalidProblemError("normalization_constants: alpha_n is absent");
  NormalizationConstants nc;
  nc.mass_omega = integrate(wedge_power(p.omega, n));
  nc.mass_alpha_n = integrate(p.alpha(n));
  if (nc.mass_alpha_n <= 0.0)
    throw InvalidProblemError("normalization_constants: ∫ alpha_n must be positive");
  nc.mass_lower = 0.0;
  for (int k = 1; k < n; ++k)
    if (p.has_alpha(k)) nc.mass_lower += integrate(wedge(p.alpha(k), wedge_power(p.omega, n - k)));
  nc.c = nc.mass_omega / nc.mass_alpha_n;
  return nc;
}

FormField omega_phi_field(const GmaProblem& p, const ScalarField& phi) {
  return p.omega + spectral_ddbar(phi);
}

FormField cone_field(const GmaProblem& p, const FormField& omega_phi, double t) {
  const int n = p.dim();
  FormField out = static_cast<double>(n) * wedge_power(omega_phi, n - 1);
  for (int k = 1; k <= n - 1; ++k) {
    if (!p.has_alpha(k)) continue;
    FormField term = wedge(p.alpha(k), wedge_power(omega_phi, n - k - 1));
    out -= (t * static_cast<double>(n - k)) * term;
  }
  return out;
}

namespace {

ScalarField residual_impl(const GmaProblem& p, const FormField& omega_phi, double t,
                          const NormalizationConstants& nc) {
  const int n = p.dim();
  FieldExtremum pos = min_gram_eigenvalue(omega_phi);
  if (pos.value <= 0.0)
    throw AdmissibilityError("residual: omega_phi loses positivity", pos.point, pos.value);

  FormField acc = wedge_power(omega_phi, n);
  for (int k = 1; k <= n - 1; ++k) {
    if (!p.has_alpha(k) || t == 0.0) continue;
    acc -= t * wedge(p.alpha(k), wedge_power(omega_phi, n - k));
  }
  acc -= nc.btc(t) * p.alpha(n);
  ScalarField r(p.grid, top_coefficient(acc) / p.chi_top());
  return r;
}

}  // namespace

ScalarField residual(const GmaProblem& p, const ScalarField& phi, double t,
                     const NormalizationConstants& nc) {
  return residual_impl(p, omega_phi_field(p, phi), t, nc);
}

ScalarField residual_at(const GmaProblem& p, const FormField& omega_phi, double t,
                        const NormalizationConstants& nc) {
  return residual_impl(p, omega_phi, t, nc);
}

ScalarField residual(const GmaProblem& p, const ScalarField& phi, double t) {
  return residual(p, phi, t, normalization_constants(p));
}

ScalarField linearized_apply(const GmaProblem& p, const ScalarField& phi, double t,
                             const ScalarField& u) {
  FormField omega_phi = omega_phi_field(p, phi);
  FieldExtremum pos = min_gram_eigenvalue(omega_phi);
  if (pos.value <= 0.0)
    throw AdmissibilityError("linearized_apply: omega_phi loses positivity", pos.point, pos.value);
  return LinearizedOperator(p, omega_phi, t).apply(u);
}

LinearizedOperator::LinearizedOperator(const GmaProblem& p, const FormField& omega_phi, double t)
    : cone_(cone_field(p, omega_phi, t)), chi_top_(p.chi_top()) {}

ScalarField LinearizedOperator::apply(const ScalarField& u) const {
  FormField h = spectral_ddbar(u);
  FormField top = wedge(cone_, h);
  return ScalarField(u.grid, top_coefficient(top) / chi_top_);
}

AdmissibilityReport admissibility_check(const GmaProblem& p, const ScalarField& phi, double t) {
  return admissibility_check(p, phi, omega_phi_field(p, phi), t);
}

AdmissibilityReport admissibility_check(const GmaProblem& p, const ScalarField& phi,
                                        const FormField& omega_phi, double t) {
  const int n = p.dim();
  AdmissibilityReport rep;
  FieldExtremum rel = min_relative_eigenvalue(omega_phi, p.omega);
  rep.min_omega_phi_eig = rel.value;
  rep.omega_phi_argmin = rel.point;

  FieldExtremum cone = min_gram_eigenvalue(cone_field(p, omega_phi, t));
  rep.min_cone_eig = cone.value;
  rep.cone_argmin = cone.point;

  rep.lemma_slack = min_ellipticity_slack(omega_phi, p.omega, p.witness).value;
  rep.sup_phi = phi.sup_norm();
  rep.max_grad_phi = gradient_sup(phi);

  if (n >= 2 && p.has_alpha(n - 1)) {
    FormField top = wedge(p.alpha(n - 1), omega_phi);
    rep.max_alpha_ratio = (top_coefficient(top) / p.chi_top()).maxCoeff();
  }
  return rep;
}

}  // namespace gma
