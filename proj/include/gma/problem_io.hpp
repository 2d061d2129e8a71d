#pragma once

#include <optional>
#include <string>

#include "gma/chern.hpp"
#include "gma/slag.hpp"
#include "gma/solver.hpp"

namespace gma {

// Command-line overrides applied on top of a problem file.
struct LoadOverrides {
  std::vector<int> grid;     // per complex pair; a single entry broadcasts
  double newton_tol = -1.0;  // < 0 keeps the file/default value
  double t_max = -1.0;
};

// Everything a problem file can define. `direct` is present when the file
// carries explicit alphas; `chern` / `slag_theta` when the corresponding
// front-end blocks are present (assembled on demand by the caller).
struct ProblemBundle {
  TorusGrid grid;
  FormField omega;
  FormField chi;
  Tolerances tol;
  SolverConfig solver;
  std::optional<GmaProblem> direct;
  std::optional<ChernData> chern;
  std::optional<FormField> slag_theta;
};

ProblemBundle load_problem(const std::string& path, const LoadOverrides& overrides = {});

// Assembles the problem a `solve`/`validate` run should use: the direct
// problem when present, otherwise the chern or slag reduction.
GmaProblem assemble_problem(const ProblemBundle& bundle);

// Field container format: "GMAF" magic, format version, a JSON header
// (grid, degree, component order) and little-endian float64 payload.
void write_scalar_field(const std::string& path, const ScalarField& f);
ScalarField read_scalar_field(const std::string& path);
void write_form_field(const std::string& path, const FormField& f);
FormField read_form_field(const std::string& path);

// One CSV row per accepted continuity step, doubles at 17 significant
// digits; column order is part of the format (docs/formats.md).
void write_trace_csv(const std::string& path, const ContinuityTrace& trace);

std::string format_double(double v);  // %.17g

}  // namespace gma
