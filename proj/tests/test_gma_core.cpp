#include <doctest.h>

#include <random>

#include "gma/problem.hpp"
#include "test_helpers.hpp"

using namespace gma;
using gma::testing::cosine_field;
using gma::testing::load_fixture_problem;
using gma::testing::random_band_limited;

namespace {
constexpr double kPi = std::numbers::pi;

double inner(const ScalarField& a, const ScalarField& b, double weight) {
  return (a.values * b.values).mean() * weight;
}
}  // namespace

TEST_CASE("fixtures validate; the cone-violating fixture names the cone") {
  for (const char* name : {"cy_trivial_n2.json", "mixed_const_n2.json", "cy_perturbed_n2.json",
                           "mixed_perturbed_n2.json"}) {
    GmaProblem p = load_fixture_problem(name);
    ProblemReport rep = validate(p);
    INFO(name);
    CHECK(rep.ok());
  }
  GmaProblem bad = load_fixture_problem("cone_violation_n2.json");
  ProblemReport rep = validate(bad);
  CHECK_FALSE(rep.ok());
  auto fails = rep.failures();
  CHECK(std::find(fails.begin(), fails.end(), "cone") != fails.end());
  CHECK(rep.cone_min_eig == doctest::Approx(-1.0).epsilon(1e-12));  // 2w - 3w = -w
}

TEST_CASE("normalization constants") {
  GmaProblem trivial = load_fixture_problem("cy_trivial_n2.json");
  NormalizationConstants nc = normalization_constants(trivial);
  CHECK(nc.c == doctest::Approx(1.0).epsilon(1e-14));
  for (double t : {0.0, 0.3, 0.7, 1.0}) CHECK(nc.b(t) == doctest::Approx(1.0).epsilon(1e-13));

  GmaProblem mixed = load_fixture_problem("mixed_perturbed_n2.json");
  NormalizationConstants nm = normalization_constants(mixed);
  CHECK(nm.b(0.0) == doctest::Approx(1.0).epsilon(1e-12));  // path start is omega^n = c alpha_n
  CHECK(nm.b(1.0) == doctest::Approx(1.0).epsilon(1e-12));  // consistency recovers the target
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) CHECK(nm.btc(t) >= 1.0 - 1e-12);

  // ∫ alpha_n <= 0 is rejected
  GmaProblem no_top = trivial;
  no_top.alphas[1] = FormField();
  CHECK_THROWS_AS(normalization_constants(no_top), InvalidProblemError);
}

TEST_CASE("residual: exact zeros and the t = 0 closed form") {
  GmaProblem trivial = load_fixture_problem("cy_trivial_n2.json");
  ScalarField zero(trivial.grid);
  for (double t : {0.0, 0.5, 1.0})
    CHECK(residual(trivial, zero, t).sup_norm() <= 1e-13);

  // mixed constant problem: phi = 0 solves the whole path because b_t balances
  GmaProblem mixed = load_fixture_problem("mixed_const_n2.json");
  ScalarField zero2(mixed.grid);
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
    CHECK(residual(mixed, zero2, t).sup_norm() <= 1e-13);

  // perturbed problem at t = 0: r = (omega^n - c alpha_n)/chi^n pointwise
  GmaProblem pert = load_fixture_problem("mixed_perturbed_n2.json");
  NormalizationConstants nc = normalization_constants(pert);
  ScalarField zero3(pert.grid);
  ScalarField r = residual(pert, zero3, 0.0, nc);
  Eigen::ArrayXd expect =
      (2.0 - nc.c * (1.0 + 0.2 * cosine_field(pert.grid, {1, 0, 0, 0}, 1.0).values)) / 2.0;
  CHECK((r.values - expect).cwiseAbs().maxCoeff() <= 1e-12);

  // perturbing phi keeps the residual mass at quadrature level
  std::mt19937_64 rng(3);
  ScalarField phi = cosine_field(pert.grid, {1, 0, 0, 0}, 0.01);
  ScalarField r2 = residual(pert, phi, 1.0, nc);
  CHECK(std::abs(r2.values.mean()) <= 1e-10);
}

TEST_CASE("residual raises an admissibility error carrying the worst point") {
  GmaProblem trivial = load_fixture_problem("cy_trivial_n2.json");
  // i ddbar of cos(2 pi x1) has (1,1bar) entry -pi^2 cos; amplitude 1 kills positivity
  ScalarField phi = cosine_field(trivial.grid, {1, 0, 0, 0}, 1.0);
  try {
    residual(trivial, phi, 1.0);
    FAIL("expected AdmissibilityError");
  } catch (const AdmissibilityError& e) {
    CHECK(e.min_eigenvalue < 0.0);
    CHECK(e.min_eigenvalue == doctest::Approx(1.0 - kPi * kPi).epsilon(1e-10));
    CHECK(e.point >= 0);
  }
}

TEST_CASE("linearized operator: constants, self-adjointness, Fourier diagonalization") {
  GmaProblem trivial = load_fixture_problem("cy_trivial_n2.json");
  ScalarField zero(trivial.grid);

  ScalarField cnst(trivial.grid, Eigen::ArrayXd::Constant(trivial.grid.total(), 4.2));
  CHECK(linearized_apply(trivial, zero, 1.0, cnst).sup_norm() <= 1e-12);

  // constant-coefficient case: L is a Fourier multiplier, cosines are eigenfields
  ScalarField u = cosine_field(trivial.grid, {1, 0, 0, 0}, 1.0);
  ScalarField lu = linearized_apply(trivial, zero, 1.0, u);
  CHECK((lu.values + kPi * kPi * u.values).cwiseAbs().maxCoeff() <= 1e-12);

  // self-adjointness in the chi^n pairing at a generic admissible state
  GmaProblem pert = load_fixture_problem("mixed_perturbed_n2.json");
  std::mt19937_64 rng(41);
  ScalarField phi = random_band_limited(rng, pert.grid, 3, 0.003);
  ScalarField v = random_band_limited(rng, pert.grid, 3, 1.0);
  ScalarField w = random_band_limited(rng, pert.grid, 3, 1.0);
  ScalarField lv = linearized_apply(pert, phi, 0.7, v);
  ScalarField lw = linearized_apply(pert, phi, 0.7, w);
  double a = inner(lv, w, pert.chi_top());
  double b = inner(v, lw, pert.chi_top());
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("linearization consistency: slope-2 decay of the Taylor defect") {
  GmaProblem pert = load_fixture_problem("mixed_perturbed_n2.json");
  NormalizationConstants nc = normalization_constants(pert);
  std::mt19937_64 rng(43);
  ScalarField phi = random_band_limited(rng, pert.grid, 3, 0.003);
  ScalarField u = random_band_limited(rng, pert.grid, 3, 1.0);
  ScalarField base = residual(pert, phi, 1.0, nc);
  ScalarField lu = linearized_apply(pert, phi, 1.0, u);

  auto defect = [&](double eps) {
    ScalarField shifted(pert.grid, phi.values + eps * u.values);
    ScalarField r = residual(pert, shifted, 1.0, nc);
    return (r.values - base.values - eps * lu.values).cwiseAbs().maxCoeff();
  };
  double d3 = defect(1e-3), d4 = defect(1e-4);
  double slope = std::log10(d3 / d4);
  CHECK(slope > 1.8);
  CHECK(slope < 2.2);
}

TEST_CASE("admissibility report") {
  GmaProblem mixed = load_fixture_problem("mixed_const_n2.json");
  ScalarField zero(mixed.grid);

  AdmissibilityReport rep = admissibility_check(mixed, zero, 1.0);
  CHECK(rep.admissible());
  CHECK(rep.min_omega_phi_eig == doctest::Approx(1.0).epsilon(1e-12));
  // cone = 2 omega - t alpha_1 = (2 - 0.5 t) omega
  CHECK(rep.min_cone_eig == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(rep.lemma_slack >= -1e-12);
  CHECK(rep.sup_phi == 0.0);
  CHECK(rep.max_grad_phi <= 1e-12);
  CHECK(rep.max_alpha_ratio == doctest::Approx(0.5).epsilon(1e-12));  // alpha_1 ∧ omega / chi^2

  AdmissibilityReport rep0 = admissibility_check(mixed, zero, 0.0);
  CHECK(rep0.min_cone_eig == doctest::Approx(2.0).epsilon(1e-12));

  // slack formula at the fixture witness (delta = 0.45, k0 = 2):
  // 1 - 0.45 / (lambda_1 lambda_2) = 1 - 0.45 at phi = 0
  CHECK(rep.lemma_slack == doctest::Approx(0.55).epsilon(1e-12));
}

TEST_CASE("chi must be constant and positive") {
  GmaProblem p = load_fixture_problem("cy_trivial_n2.json");
  FormField bad_chi = FormField::constant(p.grid, PPForm::euclidean_kahler(2));
  bad_chi.comp(0, 0) += cosine_field(p.grid, {1, 0, 0, 0}, 0.5).values.cast<Complex>();
  p.chi = bad_chi;
  ProblemReport rep = validate(p);
  CHECK_FALSE(rep.chi_ok);
}
