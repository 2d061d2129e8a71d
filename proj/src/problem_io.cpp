#include "gma/problem_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <json.hpp>

namespace gma {

using nlohmann::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  in >> j;
  return j;
}

Complex parse_complex(const json& v) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2) return Complex(v[0].get<double>(), v[1].get<double>());
  throw std::invalid_argument("problem file: complex entries are numbers or [re, im]");
}

PPForm parse_constant_form(const json& j, int n, int degree) {
  int m = static_cast<int>(binomial(n, degree));
  Eigen::MatrixXcd coeffs = Eigen::MatrixXcd::Zero(m, m);
  if (j.contains("matrix")) {
    const json& rows = j["matrix"];
    if (static_cast<int>(rows.size()) != m)
      throw std::invalid_argument("problem file: coefficient matrix has wrong size");
    for (int r = 0; r < m; ++r) {
      if (static_cast<int>(rows[r].size()) != m)
        throw std::invalid_argument("problem file: coefficient matrix is not square");
      for (int c = 0; c < m; ++c) coeffs(r, c) = parse_complex(rows[r][c]);
    }
  }
  return PPForm::from_matrix(n, degree, coeffs);
}

// A form block: "degree", optional constant "matrix", optional additive
// Fourier "modes", optional overall "scale". A mode on a diagonal component
// contributes coeff e^{2 pi i k.x} + c.c.; off-diagonal modes contribute
// coeff e^{2 pi i k.x} to the stored (r, c) entry, the (c, r) entry being
// implied by Hermiticity.
FormField parse_form_field(const json& j, const TorusGrid& grid) {
  if (!j.contains("degree")) throw std::invalid_argument("problem file: form needs a degree");
  int degree = j["degree"].get<int>();
  int n = grid.complex_dim();
  FormField f = FormField::constant(grid, parse_constant_form(j, n, degree));

  if (j.contains("modes")) {
    for (const json& mode : j["modes"]) {
      std::vector<int> comp = mode.at("component").get<std::vector<int>>();
      std::vector<int> k = mode.at("k").get<std::vector<int>>();
      Complex coeff = parse_complex(mode.at("coeff"));
      if (comp.size() != 2 || comp[0] < 0 || comp[1] < 0 || comp[0] >= f.basis_size() ||
          comp[1] >= f.basis_size())
        throw std::invalid_argument("problem file: mode component out of range");
      if (static_cast<int>(k.size()) != grid.axes())
        throw std::invalid_argument("problem file: mode frequency needs one entry per real axis");
      int r = comp[0], c = comp[1];
      if (r > c) {
        std::swap(r, c);
        coeff = std::conj(coeff);
      }
      Eigen::ArrayXcd& target = f.comp(r, c);
      const bool diag = r == c;
      for (long long idx = 0; idx < grid.total(); ++idx) {
        double phase = 0.0;
        for (int a = 0; a < grid.axes(); ++a)
          phase += static_cast<double>(k[a]) * grid.coord(idx, a) / grid.size(a);
        Complex e = std::polar(1.0, 2.0 * std::numbers::pi * phase);
        target[idx] += diag ? coeff * e + std::conj(coeff * e) : coeff * e;
      }
    }
    f.realify_diagonal();
  }
  if (j.contains("scale")) f *= j["scale"].get<double>();
  return f;
}

void apply_solver_block(const json& j, SolverConfig& cfg) {
  if (j.contains("dt_init")) cfg.dt_init = j["dt_init"].get<double>();
  if (j.contains("dt_min")) cfg.dt_min = j["dt_min"].get<double>();
  if (j.contains("dt_max")) cfg.dt_max = j["dt_max"].get<double>();
  if (j.contains("max_newton")) cfg.max_newton = j["max_newton"].get<int>();
  if (j.contains("max_cg")) cfg.max_cg = j["max_cg"].get<int>();
  if (j.contains("easy_newton")) cfg.easy_newton = j["easy_newton"].get<int>();
}

}  // namespace

ProblemBundle load_problem(const std::string& path, const LoadOverrides& overrides) {
  json j = load_json(path);
  ProblemBundle b;

  int n = j.at("dimension").get<int>();
  std::vector<int> pair_sizes = j.at("grid").get<std::vector<int>>();
  if (!overrides.grid.empty()) {
    pair_sizes = overrides.grid;
    if (static_cast<int>(pair_sizes.size()) == 1) pair_sizes.assign(n, pair_sizes[0]);
  }
  long long budget = TorusGrid::kDefaultMaxPoints;
  if (j.contains("max_points")) budget = j["max_points"].get<long long>();
  b.grid = TorusGrid(n, pair_sizes, budget);

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (t.contains("newton_tol")) b.tol.newton_tol = t["newton_tol"].get<double>();
    if (t.contains("quad_tol")) b.tol.quad_tol = t["quad_tol"].get<double>();
    if (t.contains("pos_tol")) b.tol.pos_tol = t["pos_tol"].get<double>();
    if (t.contains("linear_tol")) b.tol.linear_tol = t["linear_tol"].get<double>();
  }
  if (overrides.newton_tol > 0.0) b.tol.newton_tol = overrides.newton_tol;

  b.solver.newton_tol = b.tol.newton_tol;
  b.solver.linear_tol = b.tol.linear_tol;
  if (j.contains("solver")) apply_solver_block(j["solver"], b.solver);
  if (overrides.t_max > 0.0) b.solver.t_max = std::min(overrides.t_max, 1.0);

  b.omega = parse_form_field(j.at("omega"), b.grid);
  b.chi = j.contains("chi") ? parse_form_field(j["chi"], b.grid)
                            : FormField::constant(b.grid, PPForm::euclidean_kahler(n));

  if (j.contains("alphas")) {
    GmaProblem p;
    p.grid = b.grid;
    p.omega = b.omega;
    p.chi = b.chi;
    p.tol = b.tol;
    const json& alphas = j["alphas"];
    if (static_cast<int>(alphas.size()) != n)
      throw std::invalid_argument("problem file: alphas must list k = 1..n (null for zero)");
    p.alphas.resize(n);
    for (int k = 1; k <= n; ++k) {
      if (alphas[k - 1].is_null()) continue;
      p.alphas[k - 1] = parse_form_field(alphas[k - 1], b.grid);
      if (p.alphas[k - 1].degree() != k)
        throw std::invalid_argument("problem file: alpha_" + std::to_string(k) +
                                    " has the wrong degree");
    }
    if (j.contains("witness")) {
      p.witness.delta = j["witness"].at("delta").get<double>();
      p.witness.k0 = j["witness"].at("k0").get<int>();
    }
    b.direct = std::move(p);
  }

  if (j.contains("chern")) {
    ChernData d;
    d.omega = b.omega;
    d.theta0 = parse_form_field(j["chern"].at("theta0"), b.grid);
    d.eta = parse_form_field(j["chern"].at("eta"), b.grid);
    b.chern = std::move(d);
  }
  if (j.contains("slag")) {
    if (n != 3) throw std::invalid_argument("problem file: slag block needs dimension 3");
    b.slag_theta = parse_form_field(j["slag"].at("theta"), b.grid);
  }
  if (!b.direct && !b.chern && !b.slag_theta)
    throw std::invalid_argument("problem file: needs alphas, a chern block, or a slag block");
  return b;
}

GmaProblem assemble_problem(const ProblemBundle& bundle) {
  if (bundle.direct) return *bundle.direct;
  if (bundle.chern) return make_chern_problem(*bundle.chern, bundle.tol);
  if (bundle.slag_theta) {
    SlagData d = make_slag_data(bundle.omega, *bundle.slag_theta, bundle.tol.pos_tol);
    return build_slag_problem(d, bundle.tol);
  }
  throw std::invalid_argument("assemble_problem: empty bundle");
}

namespace {

constexpr char kMagic[4] = {'G', 'M', 'A', 'F'};

void write_blob(std::ofstream& out, const json& header, const void* data, size_t bytes) {
  std::string h = header.dump();
  std::uint32_t version = 1, hlen = static_cast<std::uint32_t>(h.size());
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&hlen), 4);
  out.write(h.data(), hlen);
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

json read_blob_header(std::ifstream& in) {
  char magic[4];
  std::uint32_t version = 0, hlen = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&hlen), 4);
  if (!in || std::string(magic, 4) != "GMAF" || version != 1)
    throw std::invalid_argument("field file: bad magic or version");
  std::string h(hlen, '\0');
  in.read(h.data(), hlen);
  return json::parse(h);
}

TorusGrid grid_from_header(const json& h) {
  return TorusGrid(h.at("dimension").get<int>(), h.at("grid").get<std::vector<int>>());
}

}  // namespace

void write_scalar_field(const std::string& path, const ScalarField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  json h = {{"kind", "scalar"},
            {"dimension", f.grid.complex_dim()},
            {"grid", f.grid.pair_sizes()},
            {"count", f.grid.total()},
            {"dtype", "float64"},
            {"zero_average", f.zero_average}};
  write_blob(out, h, f.values.data(), sizeof(double) * f.values.size());
}

ScalarField read_scalar_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json h = read_blob_header(in);
  if (h.at("kind") != "scalar") throw std::invalid_argument("field file: not a scalar field");
  TorusGrid grid = grid_from_header(h);
  Eigen::ArrayXd values(grid.total());
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(sizeof(double) * values.size()));
  if (!in) throw std::invalid_argument("field file: truncated payload");
  ScalarField f(grid, std::move(values));
  f.zero_average = h.value("zero_average", false);
  return f;
}

void write_form_field(const std::string& path, const FormField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  json comps = json::array();
  for (int r = 0; r < f.basis_size(); ++r)
    for (int c = r; c < f.basis_size(); ++c) comps.push_back({r, c});
  json h = {{"kind", "form"},
            {"dimension", f.dim()},
            {"grid", f.grid().pair_sizes()},
            {"degree", f.degree()},
            {"components", comps},
            {"count", f.grid().total()},
            {"dtype", "complex128"}};
  std::string hd = h.dump();
  std::uint32_t version = 1, hlen = static_cast<std::uint32_t>(hd.size());
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&hlen), 4);
  out.write(hd.data(), hlen);
  for (int r = 0; r < f.basis_size(); ++r)
    for (int c = r; c < f.basis_size(); ++c)
      out.write(reinterpret_cast<const char*>(f.comp(r, c).data()),
                static_cast<std::streamsize>(sizeof(Complex) * f.grid().total()));
}

FormField read_form_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json h = read_blob_header(in);
  if (h.at("kind") != "form") throw std::invalid_argument("field file: not a form field");
  TorusGrid grid = grid_from_header(h);
  FormField f = FormField::zero(grid, h.at("degree").get<int>());
  for (int r = 0; r < f.basis_size(); ++r)
    for (int c = r; c < f.basis_size(); ++c)
      in.read(reinterpret_cast<char*>(f.comp(r, c).data()),
              static_cast<std::streamsize>(sizeof(Complex) * grid.total()));
  if (!in) throw std::invalid_argument("field file: truncated payload");
  return f;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(const std::string& path, const ContinuityTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << "step,t,b_t,btc,newton_iters,residual_sup,min_omega_phi_eig,min_cone_eig,"
         "lemma_slack,sup_phi,max_grad_phi,max_alpha_ratio,stagnation_warn\n";
  for (const StepRecord& s : trace.steps) {
    out << s.step << ',' << format_double(s.t) << ',' << format_double(s.b_t) << ','
        << format_double(s.btc) << ',' << s.newton_iters << ','
        << format_double(s.residual_sup) << ',' << format_double(s.report.min_omega_phi_eig)
        << ',' << format_double(s.report.min_cone_eig) << ','
        << format_double(s.report.lemma_slack) << ',' << format_double(s.report.sup_phi) << ','
        << format_double(s.report.max_grad_phi) << ','
        << format_double(s.report.max_alpha_ratio) << ',' << (s.stagnation_warn ? 1 : 0)
        << '\n';
  }
}

}  // namespace gma
