#include "gma/chern.hpp"

namespace gma {

namespace {

void check_chern_shapes(const ChernData& d) {
  if (!d.theta0.valid() || !d.omega.valid() || !d.eta.valid())
    throw std::invalid_argument("ChernData: missing field");
  int n = d.omega.dim();
  if (d.theta0.degree() != 1 || d.omega.degree() != 1 || d.eta.degree() != n)
    throw std::invalid_argument("ChernData: wrong degrees");
  if (!(d.theta0.grid() == d.omega.grid()) || !(d.eta.grid() == d.omega.grid()))
    throw std::invalid_argument("ChernData: grid mismatch");
}

}  // namespace

double chern_class_defect(const ChernData& data) {
  check_chern_shapes(data);
  int n = data.omega.dim();
  double lhs = integrate(data.eta);
  double rhs = integrate(wedge_power(data.theta0, n));
  return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

void validate_chern(const ChernData& data, double tol) {
  if (chern_class_defect(data) > tol)
    throw InvalidProblemError("ChernData: [eta] does not match [Theta0^n] (class defect)");
}

std::vector<FormField> build_alphas(const ChernData& data) {
  check_chern_shapes(data);
  const int n = data.omega.dim();
  const FormField& w = data.omega;
  const FormField& th = data.theta0;

  std::vector<FormField> alphas(n);
  if (n >= 2) alphas[0] = static_cast<double>(n) * (w - th);
  for (int p = 2; p <= n - 1; ++p) {
    double cnp = static_cast<double>(binomial(n, p));
    FormField ap = cnp * wedge_power(w, p) - cnp * wedge_power(th, p);
    for (int i = 1; i <= p - 1; ++i) {
      double cid = static_cast<double>(binomial(n - i, p - i));
      ap -= cid * wedge(alphas[i - 1], wedge_power(w, p - i));
    }
    alphas[p - 1] = std::move(ap);
  }
  FormField an = data.eta - wedge_power(th, n) + wedge_power(w, n);
  for (int i = 1; i <= n - 1; ++i) an -= wedge(alphas[i - 1], wedge_power(w, n - i));
  alphas[n - 1] = std::move(an);
  return alphas;
}

ScalarField chern_residual_direct(const ChernData& data, const ScalarField& phi) {
  check_chern_shapes(data);
  const int n = data.omega.dim();
  FormField theta_phi = data.theta0 + spectral_ddbar(phi);
  FormField top = wedge_power(theta_phi, n) - data.eta;
  double chi_top = wedge_power(PPForm::euclidean_kahler(n), n).top_value();
  return ScalarField(phi.grid, top_coefficient(top) / chi_top);
}

double equivalence_check(const ChernData& data, const ScalarField& phi) {
  std::vector<FormField> alphas = build_alphas(data);
  return equivalence_check(data, alphas, phi);
}

double equivalence_check(const ChernData& data, std::span<const FormField> alphas,
                         const ScalarField& phi) {
  const int n = data.omega.dim();
  ScalarField direct = chern_residual_direct(data, phi);

  FormField omega_phi = data.omega + spectral_ddbar(phi);
  FormField acc = wedge_power(omega_phi, n);
  for (int p = 1; p <= n; ++p) {
    if (!alphas[p - 1].valid()) continue;
    acc -= p == n ? alphas[n - 1] : wedge(alphas[p - 1], wedge_power(omega_phi, n - p));
  }
  double chi_top = wedge_power(PPForm::euclidean_kahler(n), n).top_value();
  Eigen::ArrayXd gma_form = top_coefficient(acc) / chi_top;
  return (direct.values - gma_form).cwiseAbs().maxCoeff();
}

ChernHypothesisReport chern_hypothesis_report(const ChernData& data,
                                              std::span<const FormField> alphas) {
  const int n = data.omega.dim();
  const TorusGrid& g = data.omega.grid();
  ChernHypothesisReport rep;
  rep.min_alpha_eig.resize(n, 0.0);
  rep.c.assign(n, 0.0);

  FormField chi = FormField::constant(g, PPForm::euclidean_kahler(n));
  double chi_top = wedge_power(PPForm::euclidean_kahler(n), n).top_value();

  std::vector<Eigen::ArrayXd> psi_fields(n);
  for (int p = 1; p <= n; ++p) {
    const FormField& a = alphas[p - 1];
    if (!a.valid()) continue;
    double scale = 1.0 + a.max_abs();
    rep.min_alpha_eig[p - 1] = min_gram_eigenvalue(a).value;
    if (rep.min_alpha_eig[p - 1] < -1e-10 * scale) rep.all_positive = false;
    double sup = 0.0;
    if (!check_closed(a, 1e-10 * scale, &sup)) rep.closed_ok = false;
    FormField top = p == n ? a : wedge(a, wedge_power(chi, n - p));
    psi_fields[p - 1] = top_coefficient(top) / chi_top;
  }

  // shared-factor fit: psi from the first alpha with mass, c_i from means
  int pivot = -1;
  for (int p = 1; p <= n; ++p)
    if (alphas[p - 1].valid() && psi_fields[p - 1].size() &&
        psi_fields[p - 1].cwiseAbs().maxCoeff() > 1e-14) {
      pivot = p;
      break;
    }
  if (pivot < 0) return rep;

  double pivot_mean = psi_fields[pivot - 1].mean();
  if (std::abs(pivot_mean) < 1e-14) return rep;
  Eigen::ArrayXd psi = psi_fields[pivot - 1] / pivot_mean;
  rep.psi = ScalarField(g, psi);

  double fit = 0.0;
  bool nonneg = true;
  double csum = 0.0;
  ScalarField psi_field(g, psi);
  for (int p = 1; p <= n; ++p) {
    const FormField& a = alphas[p - 1];
    if (!a.valid()) continue;
    double cp = psi_fields[p - 1].mean();
    rep.c[p - 1] = cp;
    if (cp < 0.0) nonneg = false;
    csum += cp;
    FormField rec = scaled(psi_field, FormField::constant(g, cp * wedge_power(PPForm::euclidean_kahler(n), p)));
    fit = std::max(fit, (a - rec).max_abs() / (1.0 + a.max_abs()));
  }
  rep.fit_error = fit;
  rep.conformal_fit_ok = nonneg && csum > 0.0 && fit <= 1e-8;
  return rep;
}

GmaProblem make_chern_problem(const ChernData& data, const Tolerances& tol) {
  validate_chern(data);
  const int n = data.omega.dim();
  GmaProblem p;
  p.grid = data.omega.grid();
  p.omega = data.omega;
  p.chi = FormField::constant(p.grid, PPForm::euclidean_kahler(n));
  p.alphas = build_alphas(data);
  p.tol = tol;

  // witness: prefer k0 = n via the scalar ratio, fall back to k0 = 1
  FormField omega_n = wedge_power(p.omega, n);
  if (p.has_alpha(n)) {
    double ratio_min =
        (top_coefficient(p.alpha(n)) / top_coefficient(omega_n)).minCoeff();
    if (ratio_min > 0.0) p.witness = {0.9 * ratio_min, n};
  }
  if (p.witness.k0 == 0 && p.has_alpha(1)) {
    double rel = min_relative_eigenvalue(p.alpha(1), p.omega).value;
    if (rel > 0.0) p.witness = {0.9 * rel, 1};
  }

  ProblemReport rep = validate(p);
  if (!rep.ok()) {
    std::string msg = "make_chern_problem: constructed problem invalid:";
    for (const auto& f : rep.failures()) msg += " " + f;
    throw InvalidProblemError(msg);
  }
  return p;
}

}  // namespace gma
