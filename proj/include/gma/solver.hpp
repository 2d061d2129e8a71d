#pragma once

#include <span>

#include "gma/problem.hpp"

namespace gma {

struct SolverConfig {
  double newton_tol = 1e-10;   // sup-norm residual target
  int max_newton = 30;
  double dt_init = 0.1;
  double dt_min = 1e-4;
  double dt_max = 0.25;
  double dt_grow = 1.5;
  int easy_newton = 2;         // grow dt when a node converges within this many iterations
  double linear_tol = 1e-12;   // relative tolerance of the inner CG solve
  int max_cg = 2000;
  double backtrack_floor = 1e-6;  // smallest admissible step fraction
  double eig_drop = 0.1;          // omega_phi eigenvalue floor, fraction of previous
  int stagnation_window = 5;      // accept-with-warning rule
  double t_max = 1.0;
};

// Raised when a single continuity node cannot be solved; the driver reacts
// by shrinking dt. Carries a human-readable account of what collapsed.
struct StepFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SolveStatus { Success, PathFailure, InvalidProblem };

struct StepRecord {
  int step = 0;
  double t = 0.0;
  double b_t = 0.0;
  double btc = 0.0;  // b_t c^{1-t}
  int newton_iters = 0;
  double residual_sup = 0.0;
  bool stagnation_warn = false;
  AdmissibilityReport report;
  std::vector<double> newton_residuals;  // sup-norm per Newton iterate, initial included
};

struct ContinuityTrace {
  std::vector<StepRecord> steps;
  std::string failure_reason;  // empty on success

  // enforces strictly increasing t and positive recorded R
  void append(StepRecord rec);
};

struct NewtonResult {
  ScalarField phi;
  int iterations = 0;
  double residual_sup = 0.0;
  bool stagnation = false;
  std::vector<double> history;
};

// Newton correction at fixed t, starting from phi0. Keeps every iterate
// admissible by halving the update, solves the linearized equation by
// preconditioned CG on the zero-average subspace, and accepts with a
// warning when the residual stagnates within 10x of the target.
NewtonResult newton_solve(const GmaProblem& p, const ScalarField& phi0, double t,
                          const SolverConfig& cfg);
NewtonResult newton_solve(const GmaProblem& p, const ScalarField& phi0, double t,
                          const SolverConfig& cfg, const NormalizationConstants& nc);

struct ContinuityResult {
  ScalarField phi;
  ContinuityTrace trace;
  SolveStatus status = SolveStatus::Success;
  NormalizationConstants constants;
};

// The outer continuity driver over t in [0, t_max]: Newton from phi = 0 at
// t = 0 (or from phi_init when given), adaptive dt with halving on failure
// and growth on easy nodes, full trace recording.
ContinuityResult continuity_run(const GmaProblem& p, const SolverConfig& cfg,
                                const ScalarField* phi_init = nullptr);

// Max pairwise sup-distance between purported solutions of the t = 1
// equation, after zero-average projection. Inputs whose residual exceeds
// 20x newton_tol are rejected.
double uniqueness_check(const GmaProblem& p, std::span<const ScalarField> phis,
                        const SolverConfig& cfg);

}  // namespace gma
