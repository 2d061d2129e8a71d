#pragma once

#include <span>

#include "gma/problem.hpp"

namespace gma {

// Line-bundle top-character data: normalized curvature Theta0 = i F0 / 2pi,
// ambient Kähler omega, and the target top form eta representing the same
// class as Theta0^n (∫ eta = ∫ Theta0^n).
struct ChernData {
  FormField theta0;
  FormField omega;
  FormField eta;
};

// Relative defect of the class condition ∫ eta = ∫ Theta0^n.
double chern_class_defect(const ChernData& data);
// Rejects data whose class defect exceeds tol (default 1e-10 relative).
void validate_chern(const ChernData& data, double tol = 1e-10);

// The inductive coefficients reducing the top-character equation to the
// generalised Monge-Ampere form:
//   alpha_1 = n (omega - Theta0)
//   alpha_p = -C(n,p) Theta0^p + C(n,p) omega^p
//             - sum_{i=1}^{p-1} C(n-i, p-i) alpha_i ∧ omega^{p-i},  2 <= p <= n-1
//   alpha_n = eta - Theta0^n + omega^n - sum_{i=1}^{n-1} alpha_i ∧ omega^{n-i}.
// All closed when the inputs are; positivity is NOT guaranteed and is only
// reported (problem assembly fails downstream when it is violated).
std::vector<FormField> build_alphas(const ChernData& data);

// (Theta0 + i ddbar phi)^n - eta, scalarized against the flat chi^n. This
// is the equation for the conformal factor h = h0 e^{-2 pi phi} with the
// 2 pi absorbed into phi.
ScalarField chern_residual_direct(const ChernData& data, const ScalarField& phi);

// sup over the grid of |direct residual - (omega_phi^n - sum alpha_p ∧
// omega_phi^{n-p}) / chi^n|. The recursion makes the two expressions
// algebraically identical, so this is a roundoff-level quantity for EVERY
// phi, solution or not.
double equivalence_check(const ChernData& data, const ScalarField& phi);
double equivalence_check(const ChernData& data, std::span<const FormField> alphas,
                         const ScalarField& phi);

// Positivity, closedness, and the conformal-factor fit alpha_i = c_i chi^i psi.
// A failed fit is a warning, not an error: the discrete solver needs only
// the GmaProblem invariants.
struct ChernHypothesisReport {
  std::vector<double> min_alpha_eig;  // per p = 1..n
  bool all_positive = true;
  bool closed_ok = true;
  bool conformal_fit_ok = false;
  std::vector<double> c;   // fitted c_i, 0 for vanishing alpha_i
  double fit_error = 0.0;  // worst relative reconstruction error
  ScalarField psi;         // shared factor, normalized to unit mean
};

ChernHypothesisReport chern_hypothesis_report(const ChernData& data,
                                              std::span<const FormField> alphas);

// Assemble the GmaProblem (flat Euclidean chi, witness fitted from the
// data). Throws InvalidProblemError when the constructed coefficients
// violate the problem invariants.
GmaProblem make_chern_problem(const ChernData& data, const Tolerances& tol = {});

}  // namespace gma
