#include "gma/slag.hpp"

namespace gma {

namespace {

void check_slag_shapes(const FormField& omega, const FormField& theta) {
  if (!omega.valid() || !theta.valid()) throw std::invalid_argument("slag: missing field");
  if (omega.dim() != 3) throw std::invalid_argument("slag: defined for complex 3-folds only");
  if (omega.degree() != 1 || theta.degree() != 1)
    throw std::invalid_argument("slag: omega and Theta must be (1,1)-forms");
  if (!(omega.grid() == theta.grid())) throw std::invalid_argument("slag: grid mismatch");
}

}  // namespace

double compute_theta_hat(const FormField& omega, const FormField& theta) {
  check_slag_shapes(omega, theta);
  FormField omega2 = wedge(omega, omega);
  double num = 3.0 * integrate(wedge(omega2, theta)) - integrate(wedge_power(theta, 3));
  double den = integrate(wedge(omega2, omega)) - 3.0 * integrate(wedge(wedge(theta, theta), omega));
  double scale = std::max({std::abs(num), std::abs(den), 1.0});
  if (std::abs(den) <= 1e-14 * scale)
    throw InvalidProblemError("compute_theta_hat: phase undefined (denominator integral vanishes)");
  return num / den;
}

SlagData make_slag_data(const FormField& omega, const FormField& theta, double pos_tol) {
  SlagData d;
  d.omega = omega;
  d.theta = theta;
  d.tan_theta_hat = compute_theta_hat(omega, theta);
  if (!(d.tan_theta_hat > 0.0))
    throw InvalidProblemError("slag: tan(theta_hat) = " + std::to_string(d.tan_theta_hat) +
                              " violates the phase hypothesis tan(theta_hat) > 0");
  d.sec2 = 1.0 + d.tan_theta_hat * d.tan_theta_hat;
  d.Omega = theta - d.tan_theta_hat * omega;

  FieldExtremum h1 = min_gram_eigenvalue(d.Omega);
  d.hyp1_min_eig = h1.value;
  if (h1.value <= pos_tol * (1.0 + d.Omega.max_abs()))
    throw InvalidProblemError("slag: hypothesis (1) fails, Omega not positive (eig " +
                              std::to_string(h1.value) + " at point " + std::to_string(h1.point) +
                              ")");
  FormField cone2 = wedge(d.Omega, d.Omega) - d.sec2 * wedge(omega, omega);
  FieldExtremum h2 = min_gram_eigenvalue(cone2);
  d.hyp2_min_eig = h2.value;
  if (h2.value <= pos_tol * (1.0 + cone2.max_abs()))
    throw InvalidProblemError(
        "slag: hypothesis (2) fails, Omega^2 - omega^2 sec^2 not positive (eig " +
        std::to_string(h2.value) + " at point " + std::to_string(h2.point) + ")");
  return d;
}

GmaProblem build_slag_problem(const SlagData& data, const Tolerances& tol) {
  GmaProblem p;
  p.grid = data.omega.grid();
  p.omega = data.Omega;
  p.chi = FormField::constant(p.grid, PPForm::euclidean_kahler(3));
  p.alphas.resize(3);
  FormField omega2 = wedge(data.omega, data.omega);
  p.alphas[1] = (3.0 * data.sec2) * omega2;
  p.alphas[2] = (2.0 * data.tan_theta_hat * data.sec2) * wedge(omega2, data.omega);
  p.tol = tol;

  double ratio_min =
      (top_coefficient(p.alphas[2]) / top_coefficient(wedge_power(p.omega, 3))).minCoeff();
  if (ratio_min > 0.0) p.witness = {0.9 * ratio_min, 3};

  ProblemReport rep = validate(p);
  if (!rep.ok()) {
    std::string msg = "build_slag_problem: constructed problem invalid:";
    for (const auto& f : rep.failures()) msg += " " + f;
    throw InvalidProblemError(msg);
  }
  return p;
}

double grouping_defect(const PPForm& theta, const PPForm& omega, double tan_theta) {
  if (theta.dim() != 3 || omega.dim() != 3 || theta.degree() != 1 || omega.degree() != 1)
    throw std::invalid_argument("grouping_defect: needs (1,1)-forms on a 3-fold");
  double sec2 = 1.0 + tan_theta * tan_theta;
  PPForm omega2 = wedge(omega, omega);
  PPForm omega3 = wedge(omega2, omega);
  PPForm theta2 = wedge(theta, theta);

  double e1 = -wedge(theta2, theta).top_value() + 3.0 * wedge(omega2, theta).top_value() -
              tan_theta * (omega3.top_value() - 3.0 * wedge(theta2, omega).top_value());

  PPForm omega0 = theta - tan_theta * omega;
  double e2 = wedge_power(omega0, 3).top_value() -
              3.0 * sec2 * wedge(omega2, omega0).top_value() -
              2.0 * tan_theta * sec2 * omega3.top_value();

  double scale = std::max({std::abs(e1), std::abs(e2), 1e-300});
  return std::abs(e1 + e2) / scale;
}

double example_tangent(const ExampleParams& params) {
  if (params.k < 1) throw std::invalid_argument("example_tangent: k must be >= 1");
  if (!(params.eps > 0.0)) throw std::invalid_argument("example_tangent: eps must be > 0");
  double k = static_cast<double>(params.k), e = params.eps;
  double num = k * k * k * params.i30 -
               3.0 * k * (params.i30 + 2.0 * e * params.i21 + e * e * params.i12);
  double den = 3.0 * k * k * (params.i30 + e * params.i21) -
               (params.i30 + 3.0 * e * params.i21 + 3.0 * e * e * params.i12 + e * e * e * params.i03);
  if (std::abs(den) <= 1e-300)
    throw std::invalid_argument("example_tangent: denominator vanishes");
  return num / den;
}

}  // namespace gma
