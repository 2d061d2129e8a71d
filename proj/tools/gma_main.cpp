#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "gma/problem_io.hpp"
#include "gma/verification.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolverFailure = 2;
constexpr int kExitInvalidProblem = 3;

void emit_error(const std::string& kind, const std::string& message) {
  json err = {{"error", kind}, {"message", message}};
  std::cerr << err.dump() << "\n";
}

json report_json(const gma::ProblemReport& rep) {
  return json{{"ok", rep.ok()},
              {"failures", rep.failures()},
              {"min_omega_eig", rep.min_omega_eig},
              {"min_alpha_eig", rep.min_alpha_eig},
              {"max_closedness_sup", rep.max_closedness_sup},
              {"consistency_error", rep.consistency_error},
              {"cone_min_eig", rep.cone_min_eig},
              {"witness_min_eig", rep.witness_min_eig},
              {"alpha_n_mass", rep.alpha_n_mass}};
}

json step_json(const gma::StepRecord& s) {
  return json{{"t", s.t},
              {"b_t", s.b_t},
              {"btc", s.btc},
              {"newton_iters", s.newton_iters},
              {"residual_sup", s.residual_sup},
              {"min_omega_phi_eig", s.report.min_omega_phi_eig},
              {"min_cone_eig", s.report.min_cone_eig},
              {"lemma_slack", s.report.lemma_slack},
              {"sup_phi", s.report.sup_phi},
              {"stagnation_warn", s.stagnation_warn}};
}

int run_continuity_and_write(const gma::GmaProblem& problem, const gma::SolverConfig& cfg,
                             const fs::path& out_dir, bool quiet, json extra_summary) {
  fs::create_directories(out_dir);
  gma::ContinuityResult res = gma::continuity_run(problem, cfg);
  gma::write_trace_csv((out_dir / "trace.csv").string(), res.trace);
  if (res.status != gma::SolveStatus::InvalidProblem)
    gma::write_scalar_field((out_dir / "phi.gmaf").string(), res.phi);

  json summary = std::move(extra_summary);
  summary["status"] = res.status == gma::SolveStatus::Success         ? "success"
                      : res.status == gma::SolveStatus::PathFailure   ? "path_failure"
                                                                      : "invalid_problem";
  summary["steps"] = res.trace.steps.size();
  summary["failure_reason"] = res.trace.failure_reason;
  if (res.status != gma::SolveStatus::InvalidProblem) {
    summary["c"] = res.constants.c;
    summary["b1"] = res.constants.b(1.0);
  }
  if (!res.trace.steps.empty()) {
    const gma::StepRecord& last = res.trace.steps.back();
    summary["final_t"] = last.t;
    summary["final_residual_sup"] = last.residual_sup;
    summary["sup_phi"] = last.report.sup_phi;
    summary["min_omega_phi_eig"] = last.report.min_omega_phi_eig;
    summary["lemma_slack"] = last.report.lemma_slack;
    int warns = 0;
    for (const auto& s : res.trace.steps) warns += s.stagnation_warn ? 1 : 0;
    summary["stagnation_warnings"] = warns;
  }
  std::ofstream(out_dir / "summary.json") << summary.dump(2) << "\n";

  if (!quiet) {
    for (const auto& s : res.trace.steps)
      std::cout << "t = " << gma::format_double(s.t) << "  newton = " << s.newton_iters
                << "  residual = " << gma::format_double(s.residual_sup)
                << "  R = " << gma::format_double(s.report.min_omega_phi_eig) << "\n";
    std::cout << "status: " << summary["status"].get<std::string>() << "\n";
  }
  if (res.status == gma::SolveStatus::PathFailure) {
    emit_error("path_failure", res.trace.failure_reason);
    return kExitSolverFailure;
  }
  if (res.status == gma::SolveStatus::InvalidProblem) {
    emit_error("invalid_problem", res.trace.failure_reason);
    return kExitInvalidProblem;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
  if (const char* threads = std::getenv("GMA_THREADS")) {
    int t = std::atoi(threads);
    if (t > 0) omp_set_num_threads(t);
  }
#endif

  CLI::App app{"generalised Monge-Ampere continuity solver on flat complex tori"};
  app.require_subcommand(1);

  std::string config, out_dir = "out";
  std::vector<int> grid_override;
  double tol_override = -1.0, tmax = -1.0;
  bool quiet = false, do_solve = false, fast = false;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", config, "problem file (JSON)")->required();
    if (needs_out) sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--grid", grid_override, "grid override, per complex pair")->delimiter(',');
    sub->add_option("--tol", tol_override, "Newton residual tolerance");
    sub->add_flag("--quiet", quiet, "suppress progress output");
  };

  CLI::App* solve = app.add_subcommand("solve", "run the continuity path");
  add_common(solve, true);
  solve->add_option("--tmax", tmax, "stop the path at this t");

  CLI::App* validate_cmd = app.add_subcommand("validate", "check problem invariants, no solve");
  add_common(validate_cmd, false);

  CLI::App* chern_cmd = app.add_subcommand("chern", "build the top-character coefficients");
  add_common(chern_cmd, true);
  chern_cmd->add_flag("--solve", do_solve, "also run the continuity path");

  CLI::App* slag_cmd = app.add_subcommand("slag", "phase and hypotheses of the sLag reduction");
  add_common(slag_cmd, true);
  slag_cmd->add_flag("--solve", do_solve, "also run the continuity path");

  CLI::App* example_cmd = app.add_subcommand("example", "tensor-power phase table");
  int k_single = 0, k_min = 2, k_max = 20;
  double eps = 1e-3;
  double i30 = 1.0, i21 = 1.0, i12 = 1.0, i03 = 1.0;
  std::string example_out;
  example_cmd->add_option("--k", k_single, "single tensor power (overrides the range)");
  example_cmd->add_option("--kmin", k_min, "range start");
  example_cmd->add_option("--kmax", k_max, "range end");
  example_cmd->add_option("--eps", eps, "class perturbation")->required();
  example_cmd->add_option("--i30", i30, "intersection number of Theta0^3");
  example_cmd->add_option("--i21", i21, "intersection number of Theta0^2 gamma");
  example_cmd->add_option("--i12", i12, "intersection number of Theta0 gamma^2");
  example_cmd->add_option("--i03", i03, "intersection number of gamma^3");
  example_cmd->add_option("--out", example_out, "write the table to a file instead of stdout");

  CLI::App* selftest_cmd = app.add_subcommand("selftest", "run the property suites");
  selftest_cmd->add_flag("--fast", fast, "reduced sample counts");
  selftest_cmd->add_flag("--quiet", quiet, "only the final verdict");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  gma::LoadOverrides overrides;
  overrides.grid = grid_override;
  overrides.newton_tol = tol_override;
  overrides.t_max = tmax;

  try {
    if (solve->parsed()) {
      gma::ProblemBundle bundle = gma::load_problem(config, overrides);
      gma::GmaProblem problem = gma::assemble_problem(bundle);
      return run_continuity_and_write(problem, bundle.solver, out_dir, quiet, json::object());
    }

    if (validate_cmd->parsed()) {
      gma::ProblemBundle bundle = gma::load_problem(config, overrides);
      gma::GmaProblem problem = gma::assemble_problem(bundle);
      gma::ProblemReport rep = gma::validate(problem);
      std::cout << report_json(rep).dump(2) << "\n";
      if (!rep.ok()) {
        emit_error("invalid_problem", "invariant checks failed");
        return kExitInvalidProblem;
      }
      return kExitOk;
    }

    if (chern_cmd->parsed()) {
      gma::ProblemBundle bundle = gma::load_problem(config, overrides);
      if (!bundle.chern) throw std::invalid_argument("chern: the problem file has no chern block");
      gma::validate_chern(*bundle.chern);
      std::vector<gma::FormField> alphas = gma::build_alphas(*bundle.chern);
      gma::ChernHypothesisReport hyp = gma::chern_hypothesis_report(*bundle.chern, alphas);

      fs::create_directories(out_dir);
      for (size_t i = 0; i < alphas.size(); ++i)
        if (alphas[i].valid())
          gma::write_form_field(
              (fs::path(out_dir) / ("alpha_" + std::to_string(i + 1) + ".gmaf")).string(),
              alphas[i]);
      json hj = {{"class_defect", gma::chern_class_defect(*bundle.chern)},
                 {"min_alpha_eig", hyp.min_alpha_eig},
                 {"all_positive", hyp.all_positive},
                 {"closed_ok", hyp.closed_ok},
                 {"conformal_fit_ok", hyp.conformal_fit_ok},
                 {"fitted_c", hyp.c},
                 {"fit_error", hyp.fit_error}};
      std::ofstream(fs::path(out_dir) / "hypothesis_report.json") << hj.dump(2) << "\n";
      if (!quiet) std::cout << hj.dump(2) << "\n";
      if (!do_solve) return kExitOk;
      gma::GmaProblem problem = gma::make_chern_problem(*bundle.chern, bundle.tol);
      return run_continuity_and_write(problem, bundle.solver, out_dir, quiet,
                                      json{{"front_end", "chern"}});
    }

    if (slag_cmd->parsed()) {
      gma::ProblemBundle bundle = gma::load_problem(config, overrides);
      if (!bundle.slag_theta) throw std::invalid_argument("slag: the problem file has no slag block");
      gma::SlagData data = gma::make_slag_data(bundle.omega, *bundle.slag_theta, bundle.tol.pos_tol);
      gma::GmaProblem problem = gma::build_slag_problem(data, bundle.tol);
      json sj = {{"tan_theta_hat", data.tan_theta_hat},
                 {"sec2_theta_hat", data.sec2},
                 {"hyp1_min_eig", data.hyp1_min_eig},
                 {"hyp2_min_eig", data.hyp2_min_eig},
                 {"witness", {{"delta", problem.witness.delta}, {"k0", problem.witness.k0}}},
                 {"problem_report", report_json(gma::validate(problem))}};
      fs::create_directories(out_dir);
      std::ofstream(fs::path(out_dir) / "slag_report.json") << sj.dump(2) << "\n";
      if (!quiet) std::cout << sj.dump(2) << "\n";
      if (!do_solve) return kExitOk;
      return run_continuity_and_write(problem, bundle.solver, out_dir, quiet,
                                      json{{"front_end", "slag"},
                                           {"tan_theta_hat", data.tan_theta_hat}});
    }

    if (example_cmd->parsed()) {
      std::ostringstream table;
      table << "k,eps,tan_theta_hat,tan_over_k\n";
      int lo = k_single > 0 ? k_single : k_min;
      int hi = k_single > 0 ? k_single : k_max;
      for (int k = lo; k <= hi; ++k) {
        double tan = gma::example_tangent({k, eps, i30, i21, i12, i03});
        table << k << ',' << gma::format_double(eps) << ',' << gma::format_double(tan) << ','
              << gma::format_double(tan / k) << "\n";
      }
      if (example_out.empty())
        std::cout << table.str();
      else
        std::ofstream(example_out) << table.str();
      return kExitOk;
    }

    if (selftest_cmd->parsed()) {
      std::vector<gma::verify::SuiteResult> results = gma::verify::run_selftest(fast);
      bool all = true;
      for (const auto& r : results) {
        all = all && r.pass;
        if (!quiet)
          std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  (worst "
                    << gma::format_double(r.worst) << ", " << r.samples << " samples, "
                    << gma::format_double(r.seconds) << " s)\n";
      }
      std::cout << (all ? "selftest: all suites passed" : "selftest: FAILURES present") << "\n";
      return all ? kExitOk : kExitSolverFailure;
    }
  } catch (const gma::InvalidProblemError& e) {
    emit_error("invalid_problem", e.what());
    return kExitInvalidProblem;
  } catch (const gma::StepFailureError& e) {
    emit_error("solver_failure", e.what());
    return kExitSolverFailure;
  } catch (const std::exception& e) {
    emit_error("usage", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
