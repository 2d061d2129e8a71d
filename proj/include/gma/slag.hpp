#pragma once

#include "gma/problem.hpp"

namespace gma {

// Special-Lagrangian-type reduction data on a 3-fold: Kähler omega,
// curvature Theta = i F0 (no 2 pi normalization), the phase tangent from
// the class-level cubic, and Omega = Theta - omega tan(theta_hat).
struct SlagData {
  FormField omega;
  FormField theta;
  double tan_theta_hat = 0.0;
  double sec2 = 1.0;  // 1 + tan^2
  FormField Omega;
  double hyp1_min_eig = 0.0;  // Omega > 0 margin
  double hyp2_min_eig = 0.0;  // Omega^2 - omega^2 sec2 > 0 margin
};

// tan(theta_hat) = ∫(3 omega^2 ∧ Theta - Theta^3) / ∫(omega^3 - 3 Theta^2 ∧ omega).
// Defined for n = 3 only; a vanishing denominator is a phase-undefined error.
double compute_theta_hat(const FormField& omega, const FormField& theta);

// Computes the phase and checks tan(theta_hat) > 0 and both pointwise
// hypotheses; throws InvalidProblemError naming the failed hypothesis and
// the worst grid point.
SlagData make_slag_data(const FormField& omega, const FormField& theta, double pos_tol = 1e-10);

// The generalised Monge-Ampere problem in the base metric Omega:
//   Omega_phi^3 = 3 sec2 * omega^2 ∧ Omega_phi + 2 tan sec2 * omega^3,
// whose cone condition is exactly hypothesis (2).
GmaProblem build_slag_problem(const SlagData& data, const Tolerances& tol = {});

// Pointwise regrouping of the phase cubic: the two displayed forms
//   E1 = -Theta^3 + 3 omega^2 Theta - tan (omega^3 - 3 Theta^2 omega)
//   E2 = Omega0^3 - 3 omega^2 Omega0 sec2 - 2 omega^3 tan sec2,  Omega0 = Theta - omega tan,
// define the same equation with opposite signs: E1 + E2 == 0 identically.
// Returns |E1 + E2| relative to max(|E1|, |E2|).
double grouping_defect(const PPForm& theta, const PPForm& omega, double tan_theta);

// The k-th tensor-power phase of the worked example, as a rational function
// of the four intersection numbers I_ab = ∫ Theta0^(3-b) gamma^b.
struct ExampleParams {
  int k = 1;
  double eps = 0.0;
  double i30 = 1.0;  // ∫ Theta0^3
  double i21 = 1.0;  // ∫ Theta0^2 gamma
  double i12 = 1.0;  // ∫ Theta0 gamma^2
  double i03 = 1.0;  // ∫ gamma^3
};

// tan(theta_hat_k) = ∫(k^3 Theta0^3 - 3k Theta0 (Theta0 + eps gamma)^2)
//                  / ∫(3k^2 Theta0^2 (Theta0 + eps gamma) - (Theta0 + eps gamma)^3).
double example_tangent(const ExampleParams& params);

}  // namespace gma
