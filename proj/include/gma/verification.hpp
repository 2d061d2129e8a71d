#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gma/form.hpp"

namespace gma::verify {

struct SuiteResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;      // worst observed defect / margin, suite-specific
  long long samples = 0;
  double seconds = 0.0;
  std::string detail;
};

// Phase-cubic regrouping identity on random Hermitian data (relative
// defect, pass threshold 1e-12).
SuiteResult slag_grouping_suite(int samples, std::uint64_t seed);

// Recursion-vs-direct expansion agreement for random smooth potentials on
// n = 2 and n = 3 grids (absolute sup defect, threshold 1e-10).
SuiteResult chern_equivalence_suite(int samples_per_dim, std::uint64_t seed);

// Strict positivity of wedge products of random strictly positive pairs,
// Gram eigenvalue tolerance 1e-10.
SuiteResult wedge_positivity_suite(int samples, std::uint64_t seed);

// Convexity of omega -> alpha_k ∧ omega^{n-k} / omega^n over Kähler forms;
// worst violation margin must stay above -1e-12.
SuiteResult convexity_suite(int samples, std::uint64_t seed);

// Back-substitution of the solved-for largest relative eigenvalue into the
// diagonalized residual (relative defect, threshold 1e-12).
SuiteResult lambda1_suite(int samples, std::uint64_t seed);

// Closed-form ellipticity slack values (exact arithmetic checks, 1e-15).
SuiteResult ellipticity_closed_form_suite();

// Phase positivity and linear growth of the worked tensor-power example.
SuiteResult example_tangent_suite();

std::vector<SuiteResult> run_selftest(bool fast);

}  // namespace gma::verify
