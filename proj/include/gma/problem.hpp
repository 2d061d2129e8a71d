#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gma/field.hpp"

namespace gma {

// Raised when omega_phi (or the cone operator) loses pointwise positivity;
// carries the offending grid point and the minimum eigenvalue seen there.
struct AdmissibilityError : std::runtime_error {
  long long point;
  double min_eigenvalue;
  AdmissibilityError(const std::string& what, long long pt, double eig)
      : std::runtime_error(what), point(pt), min_eigenvalue(eig) {}
};

struct InvalidProblemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double newton_tol = 1e-10;  // sup-norm residual target
  double quad_tol = 1e-10;    // integral identities
  double pos_tol = 1e-10;     // pointwise eigenvalue positivity
  double linear_tol = 1e-12;  // relative tolerance of the inner linear solve
};

// Data of omega_phi^n = sum_{k=1}^n alpha_k ∧ omega_phi^{n-k} on the torus:
// background Kähler omega, flat reference chi (constant-coefficient), the
// closed positive alpha_k (invalid entries count as zero, alpha_n with
// positive mass is required by the continuity path), and the ellipticity
// witness alpha_{k0} > delta * omega^{k0}.
struct GmaProblem {
  TorusGrid grid;
  FormField omega;
  FormField chi;
  std::vector<FormField> alphas;  // alphas[k-1] = alpha_k
  EllipticityParams witness;
  Tolerances tol;

  int dim() const { return grid.complex_dim(); }
  bool has_alpha(int k) const {
    return k >= 1 && k <= static_cast<int>(alphas.size()) && alphas[k - 1].valid();
  }
  const FormField& alpha(int k) const { return alphas[k - 1]; }

  // top coefficient of chi^n; chi is constant so this is a scalar
  double chi_top() const;
};

// Invariant report produced by `validate`; solver entry points reject
// problems whose report fails.
struct ProblemReport {
  bool shapes_ok = true;
  bool omega_positive = true;
  bool chi_ok = true;
  bool positivity_ok = true;
  bool closedness_ok = true;
  bool consistency_ok = true;
  bool cone_ok = true;
  bool witness_ok = true;
  bool alpha_n_mass_ok = true;

  double min_omega_eig = 0.0;
  double min_alpha_eig = 0.0;        // worst over all k
  double max_closedness_sup = 0.0;   // worst over all k
  double consistency_error = 0.0;    // relative
  double cone_min_eig = 0.0;         // at phi = 0, t = 1
  double witness_min_eig = 0.0;
  double alpha_n_mass = 0.0;

  bool ok() const {
    return shapes_ok && omega_positive && chi_ok && positivity_ok && closedness_ok &&
           consistency_ok && cone_ok && witness_ok && alpha_n_mass_ok;
  }
  std::vector<std::string> failures() const;
};

ProblemReport validate(const GmaProblem& p);

// c and t |-> b_t of the continuity family
//   omega_phi^n = t sum_{k<n} alpha_k ∧ omega_phi^{n-k} + alpha_n b_t c^{1-t}.
struct NormalizationConstants {
  double c = 1.0;
  double mass_omega = 0.0;    // ∫ omega^n
  double mass_alpha_n = 0.0;  // ∫ alpha_n
  double mass_lower = 0.0;    // sum_{k<n} ∫ alpha_k ∧ omega^{n-k}

  double b(double t) const { return std::pow(c, t - 1.0) * (mass_omega - t * mass_lower) / mass_alpha_n; }
  // b_t c^{1-t}, the coefficient actually multiplying alpha_n
  double btc(double t) const { return (mass_omega - t * mass_lower) / mass_alpha_n; }
};

NormalizationConstants normalization_constants(const GmaProblem& p);

FormField omega_phi_field(const GmaProblem& p, const ScalarField& phi);

// n omega_phi^{n-1} - t sum_{k=1}^{n-1} (n-k) alpha_k ∧ omega_phi^{n-k-1}
FormField cone_field(const GmaProblem& p, const FormField& omega_phi, double t);

// Pointwise residual of the continuity family at parameter t, scalarized
// against chi^n. Throws AdmissibilityError when omega_phi loses positivity.
ScalarField residual(const GmaProblem& p, const ScalarField& phi, double t);
ScalarField residual(const GmaProblem& p, const ScalarField& phi, double t,
                     const NormalizationConstants& nc);
// Same residual evaluated at a precomputed omega_phi (Newton inner loop).
ScalarField residual_at(const GmaProblem& p, const FormField& omega_phi, double t,
                        const NormalizationConstants& nc);

// Derivative of the residual at (phi, t) applied to u:
//   (n omega_phi^{n-1} - t sum (n-k) alpha_k ∧ omega_phi^{n-k-1}) ∧ i ddbar u / chi^n.
// Self-adjoint for the chi^n pairing; annihilates constants.
ScalarField linearized_apply(const GmaProblem& p, const ScalarField& phi, double t,
                             const ScalarField& u);

// Same operator with the cone field factored out once per Newton iterate.
class LinearizedOperator {
 public:
  LinearizedOperator(const GmaProblem& p, const FormField& omega_phi, double t);
  ScalarField apply(const ScalarField& u) const;

 private:
  FormField cone_;
  double chi_top_;
};

struct AdmissibilityReport {
  double min_omega_phi_eig = 0.0;  // smallest eigenvalue of omega_phi w.r.t. omega (R)
  long long omega_phi_argmin = -1;
  double min_cone_eig = 0.0;       // smallest Lambda^{n-1} Gram eigenvalue of the cone field
  long long cone_argmin = -1;
  double lemma_slack = 0.0;        // min over the grid of the ellipticity slack
  double sup_phi = 0.0;
  double max_grad_phi = 0.0;
  double max_alpha_ratio = std::numeric_limits<double>::quiet_NaN();  // alpha_{n-1} ∧ omega_phi / chi^n

  bool admissible() const { return min_omega_phi_eig > 0.0 && min_cone_eig > 0.0; }
};

// Report-only: eigenvalue floors, ellipticity slack, and the monitored
// estimate quantities sup|phi|, max|grad phi|, max alpha ∧ omega_phi / chi^n.
AdmissibilityReport admissibility_check(const GmaProblem& p, const ScalarField& phi, double t);
AdmissibilityReport admissibility_check(const GmaProblem& p, const ScalarField& phi,
                                        const FormField& omega_phi, double t);

}  // namespace gma
