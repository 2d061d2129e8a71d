#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gma/problem_io.hpp"
#include "test_helpers.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary() { return GMA_BINARY; }
std::string fixture(const std::string& name) { return gma::testing::fixture(name); }

int run(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = binary() + " " + args;
  if (!stdout_file.empty()) cmd += " > " + stdout_file + " 2>/dev/null";
  else cmd += " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / tag) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("usage surface") {
  CHECK(run("--help") == 0);
  CHECK(run("solve") == 1);                   // missing --config
  CHECK(run("bogus-subcommand") == 1);
  CHECK(run("solve --config /nonexistent.json") == 1);
}

TEST_CASE("solve on the exactly-solved fixture") {
  TempDir dir("gma_cli_solve");
  int rc = run("solve --config " + fixture("cy_trivial_n2.json") + " --out " +
               (dir.path / "a").string() + " --quiet");
  CHECK(rc == 0);
  CHECK(fs::exists(dir.path / "a" / "trace.csv"));
  CHECK(fs::exists(dir.path / "a" / "summary.json"));
  gma::ScalarField phi = gma::read_scalar_field((dir.path / "a" / "phi.gmaf").string());
  CHECK(phi.sup_norm() <= 1e-10);
  std::string summary = slurp(dir.path / "a" / "summary.json");
  CHECK(summary.find("\"status\": \"success\"") != std::string::npos);

  // byte-identical reruns
  rc = run("solve --config " + fixture("cy_trivial_n2.json") + " --out " +
           (dir.path / "b").string() + " --quiet");
  CHECK(rc == 0);
  CHECK(slurp(dir.path / "a" / "trace.csv") == slurp(dir.path / "b" / "trace.csv"));
  CHECK(slurp(dir.path / "a" / "summary.json") == slurp(dir.path / "b" / "summary.json"));
}

TEST_CASE("solve honors --tmax") {
  TempDir dir("gma_cli_tmax");
  int rc = run("solve --config " + fixture("cy_trivial_n2.json") + " --out " +
               (dir.path / "out").string() + " --tmax 0.5 --quiet");
  CHECK(rc == 0);
  std::string summary = slurp(dir.path / "out" / "summary.json");
  CHECK(summary.find("\"final_t\": 0.5") != std::string::npos);
}

TEST_CASE("validate flags the cone violation and writes nothing") {
  TempDir dir("gma_cli_validate");
  fs::path report = dir.path / "report.txt";
  int rc = run("validate --config " + fixture("cone_violation_n2.json"), report.string());
  CHECK(rc == 3);
  std::string out = slurp(report);
  CHECK(out.find("cone") != std::string::npos);
  CHECK(out.find("\"ok\": false") != std::string::npos);

  fs::path report2 = dir.path / "report2.txt";
  CHECK(run("validate --config " + fixture("mixed_const_n2.json"), report2.string()) == 0);
  CHECK(slurp(report2).find("\"ok\": true") != std::string::npos);
}

TEST_CASE("chern subcommand emits coefficients and the hypothesis report") {
  TempDir dir("gma_cli_chern");
  int rc = run("chern --config " + fixture("chern_n2.json") + " --grid 16,8 --out " +
               (dir.path / "out").string() + " --quiet");
  CHECK(rc == 0);
  CHECK(fs::exists(dir.path / "out" / "alpha_1.gmaf"));
  CHECK(fs::exists(dir.path / "out" / "alpha_2.gmaf"));
  std::string rep = slurp(dir.path / "out" / "hypothesis_report.json");
  CHECK(rep.find("\"all_positive\": true") != std::string::npos);

  gma::FormField a1 = gma::read_form_field((dir.path / "out" / "alpha_1.gmaf").string());
  CHECK(a1.degree() == 1);
  // alpha_1 = 2 (omega - 3/4 omega) = omega / 2
  CHECK(std::abs(a1.comp(0, 0)[0].real() - 0.5) <= 1e-12);
}

TEST_CASE("slag subcommand reports the phase") {
  TempDir dir("gma_cli_slag");
  fs::path stdout_file = dir.path / "stdout.txt";
  int rc = run("slag --config " + fixture("slag_n3.json") + " --out " +
               (dir.path / "out").string(), stdout_file.string());
  CHECK(rc == 0);
  std::string rep = slurp(dir.path / "out" / "slag_report.json");
  CHECK(rep.find("tan_theta_hat") != std::string::npos);
  double tan = nlohmann::json::parse(rep)["tan_theta_hat"].get<double>();
  CHECK(tan == doctest::Approx(970.0 / 299.0).epsilon(1e-10));
}

TEST_CASE("example subcommand matches the closed form") {
  TempDir dir("gma_cli_example");
  fs::path table = dir.path / "table.csv";
  int rc = run("example --kmin 2 --kmax 6 --eps 0.001 --out " + table.string());
  CHECK(rc == 0);
  std::ifstream in(table);
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,eps,tan_theta_hat,tan_over_k");
  int k;
  char comma;
  double eps, tan, tan_over_k;
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    ls >> k >> comma >> eps >> comma >> tan >> comma >> tan_over_k;
    double expect = gma::example_tangent({k, eps, 1.0, 1.0, 1.0, 1.0});
    CHECK(tan == doctest::Approx(expect).epsilon(1e-15));
    ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("selftest --fast passes") {
  CHECK(run("selftest --fast --quiet") == 0);
}
