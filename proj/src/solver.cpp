#include "gma/solver.hpp"

#include <numbers>
#include <sstream>

#include "gma/fft.hpp"

namespace gma {

namespace {

constexpr double kPi = std::numbers::pi;

// Inverse of the constant-coefficient t = 0 operator, applied in Fourier
// space. The multiplier of n*mean(omega)^{n-1} ∧ i ddbar is
//   m(kappa) = sum_{k,l} A(k,l) sigma_k(kappa) tau_l(kappa)  (real, <= 0),
// with A the contraction matrix against chi. Modes annihilated by the
// operator (the mean and pure-Nyquist bins) are filtered out.
class SpectralPreconditioner {
 public:
  explicit SpectralPreconditioner(const GmaProblem& p) : grid_(p.grid) {
    const int n = p.dim();
    PPForm omega_bar = p.omega.mean();
    PPForm cone0 = static_cast<double>(n) * wedge_power(omega_bar, n - 1);
    Eigen::MatrixXcd A = contraction_matrix(cone0, p.chi.mean());

    inv_neg_m_.resize(grid_.total());
    const int axes = grid_.axes();
    int c[6] = {0, 0, 0, 0, 0, 0};
    Complex sig[3], tau[3];
    for (long long idx = 0; idx < grid_.total(); ++idx) {
      for (int j = 0; j < n; ++j) {
        int kx = grid_.deriv_freq(2 * j, c[2 * j]);
        int ky = grid_.deriv_freq(2 * j + 1, c[2 * j + 1]);
        sig[j] = Complex(kPi * ky, kPi * kx);
        tau[j] = Complex(-kPi * ky, kPi * kx);
      }
      double m = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) m += (A(k, l) * sig[k] * tau[l]).real();
      inv_neg_m_[idx] = m < 0.0 ? -1.0 / m : 0.0;
      for (int a = axes - 1; a >= 0; --a) {
        if (++c[a] < grid_.size(a)) break;
        c[a] = 0;
      }
    }
  }

  ScalarField apply(const ScalarField& r) const {
    Eigen::ArrayXcd spec = fft_forward_copy(grid_, r.values);
    spec *= inv_neg_m_;
    fft_inverse(grid_, spec);
    return ScalarField(grid_, spec.real());
  }

 private:
  TorusGrid grid_;
  Eigen::ArrayXd inv_neg_m_;
};

double dot(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) { return (a * b).sum(); }

// CG for (-L) x = rhs on the zero-average subspace, spectrally
// preconditioned. rhs and every operator output are mean-projected.
ScalarField solve_linearized(const LinearizedOperator& L, const SpectralPreconditioner& M,
                             const ScalarField& rhs, double rel_tol, int max_iter) {
  const TorusGrid& g = rhs.grid;
  Eigen::ArrayXd b = rhs.values - rhs.values.mean();
  double bnorm = std::sqrt(dot(b, b));
  ScalarField x(g);
  if (bnorm == 0.0) return x;

  auto apply_op = [&](const Eigen::ArrayXd& v) {
    ScalarField lv = L.apply(ScalarField(g, v));
    Eigen::ArrayXd out = -lv.values;
    out -= out.mean();
    return out;
  };

  // Convergence is measured in the preconditioned norm <r, M^{-1} r>: the
  // filter inside M projects out the modes the discrete operator
  // annihilates (mean and pure-Nyquist bins), which the right-hand side may
  // carry at its discretization floor.
  Eigen::ArrayXd r = b;
  Eigen::ArrayXd z = M.apply(ScalarField(g, r)).values;
  Eigen::ArrayXd p = z;
  double rz = dot(r, z);
  const double rz0 = rz;
  if (!(rz0 > 0.0)) return x;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::ArrayXd Ap = apply_op(p);
    double pAp = dot(p, Ap);
    if (!(pAp > 0.0))
      throw StepFailureError("linear solve: operator lost positive-definiteness");
    double alpha = rz / pAp;
    x.values += alpha * p;
    r -= alpha * Ap;
    if (std::sqrt(dot(r, r)) <= rel_tol * bnorm) return x;
    z = M.apply(ScalarField(g, r)).values;
    double rz_next = dot(r, z);
    if (rz_next <= rel_tol * rel_tol * rz0) return x;
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw StepFailureError("linear solve: CG did not reach the requested tolerance");
}

std::string describe(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

void ContinuityTrace::append(StepRecord rec) {
  if (!steps.empty() && rec.t <= steps.back().t)
    throw std::logic_error("ContinuityTrace: steps must have strictly increasing t");
  if (rec.report.min_omega_phi_eig <= 0.0)
    throw std::logic_error("ContinuityTrace: a step with R <= 0 must have been rejected");
  steps.push_back(std::move(rec));
}

NewtonResult newton_solve(const GmaProblem& p, const ScalarField& phi0, double t,
                          const SolverConfig& cfg) {
  return newton_solve(p, phi0, t, cfg, normalization_constants(p));
}

NewtonResult newton_solve(const GmaProblem& p, const ScalarField& phi0, double t,
                          const SolverConfig& cfg, const NormalizationConstants& nc) {
  if (!(phi0.grid == p.grid)) throw std::invalid_argument("newton_solve: grid mismatch");
  const FormField omega_top = wedge_power(p.omega, p.dim());
  const SpectralPreconditioner precond(p);

  ScalarField phi = zero_average_project(phi0, omega_top);
  FormField omega_phi = omega_phi_field(p, phi);

  FieldExtremum rel = min_relative_eigenvalue(omega_phi, p.omega);
  if (rel.value <= 0.0)
    throw StepFailureError("newton: starting omega_phi not positive (eig " +
                           describe(rel.value) + " at point " + std::to_string(rel.point) + ")");
  double cone_min = min_gram_eigenvalue(cone_field(p, omega_phi, t)).value;
  if (cone_min <= 0.0)
    throw StepFailureError("newton: cone condition violated at start (eig " +
                           describe(cone_min) + ")");

  NewtonResult res;
  ScalarField r = residual_at(p, omega_phi, t, nc);
  double sup = r.sup_norm();
  res.history.push_back(sup);
  double r_floor = rel.value;

  for (int it = 0; it < cfg.max_newton; ++it) {
    if (sup <= cfg.newton_tol) {
      res.phi = phi;
      res.iterations = it;
      res.residual_sup = sup;
      return res;
    }
    // quadrature-floor acceptance: residual parked in (tol, 10 tol] for a
    // full window counts as converged, flagged in the trace
    if (static_cast<int>(res.history.size()) > cfg.stagnation_window) {
      bool parked = true;
      for (int w = 0; w < cfg.stagnation_window; ++w) {
        double h = res.history[res.history.size() - 1 - w];
        if (!(h > cfg.newton_tol && h <= 10.0 * cfg.newton_tol)) parked = false;
      }
      if (parked) {
        res.phi = phi;
        res.iterations = it;
        res.residual_sup = sup;
        res.stagnation = true;
        return res;
      }
    }

    // (-L) delta = r, i.e. the Newton update L delta = -r
    LinearizedOperator L(p, omega_phi, t);
    ScalarField delta = solve_linearized(L, precond, r, cfg.linear_tol, cfg.max_cg);

    // admissibility backtracking
    double s = 1.0;
    ScalarField cand;
    FormField omega_cand;
    while (true) {
      cand = zero_average_project(ScalarField(p.grid, phi.values + s * delta.values), omega_top);
      omega_cand = omega_phi_field(p, cand);
      FieldExtremum relc = min_relative_eigenvalue(omega_cand, p.omega);
      bool ok = relc.value >= cfg.eig_drop * r_floor;
      double conec = 0.0;
      if (ok) {
        conec = min_gram_eigenvalue(cone_field(p, omega_cand, t)).value;
        ok = conec > 0.0;
      }
      if (ok) {
        r_floor = relc.value;
        break;
      }
      s *= 0.5;
      if (s < cfg.backtrack_floor)
        throw StepFailureError("newton: admissibility backtracking exhausted (omega_phi eig " +
                               describe(relc.value) + ", cone eig " + describe(conec) + ")");
    }
    phi = cand;
    omega_phi = omega_cand;
    r = residual_at(p, omega_phi, t, nc);
    sup = r.sup_norm();
    res.history.push_back(sup);
  }
  throw StepFailureError("newton: no convergence within max_newton (residual " + describe(sup) +
                         ")");
}

ContinuityResult continuity_run(const GmaProblem& p, const SolverConfig& cfg,
                                const ScalarField* phi_init) {
  ContinuityResult out;
  ProblemReport rep = validate(p);
  if (!rep.ok()) {
    out.status = SolveStatus::InvalidProblem;
    out.trace.failure_reason = "invalid problem:";
    for (const auto& f : rep.failures()) out.trace.failure_reason += " " + f;
    return out;
  }
  out.constants = normalization_constants(p);
  const NormalizationConstants& nc = out.constants;

  int stepno = 0;
  auto record = [&](double t, const NewtonResult& nr) {
    StepRecord rec;
    rec.step = stepno++;
    rec.t = t;
    rec.b_t = nc.b(t);
    rec.btc = nc.btc(t);
    rec.newton_iters = nr.iterations;
    rec.residual_sup = nr.residual_sup;
    rec.stagnation_warn = nr.stagnation;
    rec.newton_residuals = nr.history;
    rec.report = admissibility_check(p, nr.phi, t);
    out.trace.append(std::move(rec));
  };

  ScalarField phi = phi_init ? *phi_init : ScalarField(p.grid);
  try {
    NewtonResult nr = newton_solve(p, phi, 0.0, cfg, nc);
    phi = nr.phi;
    record(0.0, nr);
  } catch (const StepFailureError& e) {
    out.status = SolveStatus::PathFailure;
    out.trace.failure_reason = std::string("t = 0 solve failed: ") + e.what();
    out.phi = phi;
    return out;
  }

  double t = 0.0;
  double dt = cfg.dt_init;
  while (t < cfg.t_max - 1e-14) {
    double t_next = std::min(t + dt, cfg.t_max);
    try {
      NewtonResult nr = newton_solve(p, phi, t_next, cfg, nc);
      phi = nr.phi;
      t = t_next;
      record(t, nr);
      if (nr.iterations <= cfg.easy_newton) dt = std::min(dt * cfg.dt_grow, cfg.dt_max);
    } catch (const StepFailureError& e) {
      dt *= 0.5;
      if (dt < cfg.dt_min) {
        out.status = SolveStatus::PathFailure;
        out.trace.failure_reason =
            "dt underflow at t = " + describe(t) + ": " + e.what();
        out.phi = phi;
        return out;
      }
    }
  }
  out.phi = phi;
  out.status = SolveStatus::Success;
  return out;
}

double uniqueness_check(const GmaProblem& p, std::span<const ScalarField> phis,
                        const SolverConfig& cfg) {
  NormalizationConstants nc = normalization_constants(p);
  FormField omega_top = wedge_power(p.omega, p.dim());
  std::vector<ScalarField> projected;
  projected.reserve(phis.size());
  for (const ScalarField& phi : phis) {
    ScalarField q = zero_average_project(phi, omega_top);
    double sup = residual(p, q, 1.0, nc).sup_norm();
    if (sup > 20.0 * cfg.newton_tol)
      throw std::invalid_argument("uniqueness_check: input does not solve the equation (residual " +
                                  describe(sup) + ")");
    projected.push_back(std::move(q));
  }
  double worst = 0.0;
  for (size_t i = 0; i < projected.size(); ++i)
    for (size_t j = i + 1; j < projected.size(); ++j)
      worst = std::max(worst, (projected[i].values - projected[j].values).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace gma
