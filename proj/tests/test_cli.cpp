#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "opeq/matrix_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code;
  std::string output;  // stdout
};

const std::string& cli_path() {
  static const std::string path = OPEQ_CLI_PATH;
  return path;
}

fs::path temp_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "opeq_cli_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  const fs::path out_file = temp_dir() / "stdout.txt";
  const std::string command =
      cli_path() + " " + args + " > " + out_file.string() + " 2> /dev/null";
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  return result;
}

std::string write_matrix(const std::string& filename, const std::string& body) {
  const fs::path path = temp_dir() / filename;
  std::ofstream out(path);
  out << body;
  return path.string();
}

}  // namespace

TEST_CASE("cli solve: identity instance and exit codes") {
  const auto a = write_matrix("a_id.mat", "dim 2\ndata\n1 0\n0 1\n");
  const auto b = write_matrix("b_two.mat", "dim 2\ndata\n2 0\n0 2\n");
  const auto res = run_cli("solve -a " + a + " -b " + b + " -n 2 --json");
  CHECK(res.exit_code == 0);
  const json report = json::parse(res.output);
  CHECK(report["x"]["dim"] == 2);
  CHECK(report["x"]["data"][0].get<double>() == doctest::Approx(1.0));
  CHECK(report["x"]["data"][3].get<double>() == doctest::Approx(1.0));
  CHECK(report["residual_fro"].get<double>() <= 1e-9);

  // missing file -> input error
  CHECK(run_cli("solve -a /nonexistent.mat -b " + b + " -n 2").exit_code == 2);
  // malformed file -> input error
  const auto bad = write_matrix("bad.mat", "dim 2\ndata\n1 0\n");
  CHECK(run_cli("solve -a " + bad + " -b " + b + " -n 2").exit_code == 2);
  // dimension mismatch -> input error
  const auto b3 = write_matrix("b3.mat", "dim 3\ndata\n1 0 0\n0 1 0\n0 0 1\n");
  CHECK(run_cli("solve -a " + a + " -b " + b3 + " -n 2").exit_code == 2);
  // A not positive definite -> precondition error
  const auto indef = write_matrix("indef.mat", "dim 2\ndata\n1 0\n0 -1\n");
  CHECK(run_cli("solve -a " + indef + " -b " + b + " -n 2").exit_code == 3);
  // bad usage -> input error
  CHECK(run_cli("solve -a " + a).exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
}

TEST_CASE("cli solve: radical instance from files recovers the known spectrum") {
  // A = diag(1, 2*2^{1/3}) and its generated Y, written through the document
  // writer at full precision, solved back at n = 3.
  const double a1 = 2.0 * std::pow(2.0, 1.0 / 3.0);
  const double off = 3.0 * std::pow(2.0, 0.25) + 6.0 * std::pow(2.0, 0.75);
  Eigen::Matrix2d a_mat;
  a_mat << 1.0, 0.0, 0.0, a1;
  Eigen::Matrix2d y_mat;
  y_mat << 4.0, off, off, 32.0;
  const auto a_path = (temp_dir() / "a_radical.mat").string();
  const auto y_path = (temp_dir() / "y_radical.mat").string();
  opeq::save_matrix_document(opeq::MatrixDocument::from_matrix(a_mat, "A"), a_path);
  opeq::save_matrix_document(opeq::MatrixDocument::from_matrix(y_mat, "Y"), y_path);

  const auto res = run_cli("solve -a " + a_path + " -b " + y_path + " -n 3 --json");
  CHECK(res.exit_code == 0);
  const json report = json::parse(res.output);
  CHECK(report["x_eigenvalues"][0].get<double>() ==
        doctest::Approx(0.1119).epsilon(1e-3));
  CHECK(report["x_eigenvalues"][1].get<double>() ==
        doctest::Approx(2.9013).epsilon(1e-3));
  CHECK(report["x_report"]["verdict"] == "PositiveDefinite");
}

TEST_CASE("cli solve --oracle agrees") {
  const auto a = write_matrix("a_pd.mat", "dim 2\ndata\n2 0.3\n0.3 1\n");
  const auto b = write_matrix("b_any.mat", "dim 2\ndata\n1 0.5\n0.5 -2\n");
  const auto res = run_cli("solve -a " + a + " -b " + b + " -n 3 --oracle --json");
  CHECK(res.exit_code == 0);
  const json report = json::parse(res.output);
  CHECK(report["oracle"]["agree"].get<bool>());
  CHECK(report["oracle"]["rel_fro_difference"].get<double>() <= 1e-9);
}

TEST_CASE("cli build-rhs: r-condition report & rhs equals B in trivial mode") {
  const auto a = write_matrix("a_pd2.mat", "dim 2\ndata\n1.5 0.2\n0.2 1\n");
  const auto b = write_matrix("b_psd.mat", "dim 2\ndata\n1 1\n1 1\n");
  const auto res = run_cli("build-rhs -a " + a + " -b " + b +
                           " --m 1 --n 1 --k 1 --t 0 --r 0 --json");
  CHECK(res.exit_code == 0);
  const json report = json::parse(res.output);
  CHECK(report["r_condition"]["valid"].get<bool>());
  const auto rhs = report["rhs"]["data"];
  CHECK(rhs[0].get<double>() == doctest::Approx(1.0));
  CHECK(rhs[1].get<double>() == doctest::Approx(1.0));

  // indefinite B refused unless explicitly allowed
  const auto indef = write_matrix("b_indef.mat", "dim 2\ndata\n1 0\n0 -1\n");
  CHECK(run_cli("build-rhs -a " + a + " -b " + indef +
                " --m 1 --n 1 --k 1").exit_code == 3);
  CHECK(run_cli("build-rhs -a " + a + " -b " + indef +
                " --m 1 --n 1 --k 1 --allow-indefinite-b").exit_code == 0);
}

TEST_CASE("cli build-rhs --raw --solve reproduces the invalid-r radicals") {
  const auto a = write_matrix("a_12.mat", "dim 2\ndata\n1 0\n0 2\n");
  const auto b = write_matrix("b_ones.mat", "dim 2\ndata\n1 1\n1 1\n");
  const auto res = run_cli("build-rhs -a " + a + " -b " + b +
                           " --m 2 --n 2 --k 2 --t 0.5 --r 0.5 --raw --solve --json");
  CHECK(res.exit_code == 0);
  const json report = json::parse(res.output);
  CHECK(!report["r_condition"]["valid"].get<bool>());
  CHECK(report["r_condition"]["required_r"].get<double>() == doctest::Approx(2.0));
  const double s2 = std::sqrt(2.0);
  CHECK(report["rhs"]["data"][0].get<double>() == doctest::Approx(4.0));
  CHECK(report["rhs"]["data"][1].get<double>() == doctest::Approx(3.0 + 6.0 * s2));
  CHECK(report["rhs"]["data"][3].get<double>() == doctest::Approx(16.0 * s2));
  CHECK(report["x_report"]["verdict"] == "Indefinite");
  CHECK(report["x_eigenvalues"][0].get<double>() ==
        doctest::Approx(-0.0372).epsilon(2e-3));
}

TEST_CASE("cli reproduce: all three golden cases pass") {
  CHECK(run_cli("reproduce remark22 --quiet").exit_code == 0);
  CHECK(run_cli("reproduce remark23 --quiet").exit_code == 0);
  CHECK(run_cli("reproduce example21 --quiet").exit_code == 0);
  CHECK(run_cli("reproduce example21 --eigs 1,2,3 --m 2 --n 3 --k 2 --t 0.5 --r 1 "
                "--quiet")
            .exit_code == 0);
  CHECK(run_cli("reproduce nosuchcase").exit_code == 2);
}

TEST_CASE("cli verify: small suites pass, bad suite id rejected") {
  CHECK(run_cli("verify lh --trials 25 --seed 7 --quiet").exit_code == 0);
  CHECK(run_cli("verify furuta --trials 20 --seed 7 --quiet").exit_code == 0);
  CHECK(run_cli("verify grand-furuta --trials 20 --seed 7 --dims 2..4 --quiet")
            .exit_code == 0);
  CHECK(run_cli("verify proofstep --trials 15 --seed 7 --quiet").exit_code == 0);
  const auto lemma = run_cli("verify lemma --m 5 --trials 20 --seed 7 --json");
  CHECK(lemma.exit_code == 0);
  const json report = json::parse(lemma.output);
  CHECK(report["worst_rel_error"].get<double>() <= 1e-6);
  CHECK(run_cli("verify bogus --trials 5").exit_code == 2);
}

TEST_CASE("cli fuzz: witness discovery, probe, misuse guard") {
  const auto res = run_cli("fuzz lh-alpha2 --trials 1000 --seed 1 --json");
  CHECK(res.exit_code == 0);
  const json report = json::parse(res.output);
  CHECK(report["found"].get<bool>());
  CHECK(report["witness"]["parameters"]["alpha"].get<double>() == 2.0);
  CHECK(report["witness"]["min_eigenvalue"].get<double>() < -1e-6);
  CHECK(report["replay_consistent"].get<bool>());

  const auto probe = run_cli("fuzz theorem21-r --probe remark22 --json");
  CHECK(probe.exit_code == 0);
  const json probe_report = json::parse(probe.output);
  CHECK(probe_report["witness"]["min_eigenvalue"].get<double>() ==
        doctest::Approx(-0.0372).epsilon(2e-3));

  // in-region probe refused: every sampled r would satisfy the condition
  CHECK(run_cli("fuzz grand-furuta --range r=2:3 --trials 10").exit_code == 2);
  // no witness found is still exit 0
  CHECK(run_cli("fuzz grand-furuta --trials 1 --seed 5 --quiet").exit_code == 0);
  CHECK(run_cli("fuzz nosuchtarget").exit_code == 2);
}

TEST_CASE("cli: deterministic structured output and reparsable matrices") {
  const auto first = run_cli("fuzz lh-alpha2 --trials 50 --seed 9 --json");
  const auto second = run_cli("fuzz lh-alpha2 --trials 50 --seed 9 --json");
  json j1 = json::parse(first.output);
  json j2 = json::parse(second.output);
  j1.erase("timing_ms");
  j2.erase("timing_ms");
  CHECK(j1.dump() == j2.dump());

  // human-mode matrices re-parse through the document loader to the same values
  const auto a = write_matrix("a_rt.mat", "dim 2\ndata\n1.25 0.1\n0.1 2\n");
  const auto b = write_matrix("b_rt.mat", "dim 2\ndata\n0.5 0.25\n0.25 3\n");
  const auto human = run_cli("solve -a " + a + " -b " + b + " -n 2");
  CHECK(human.exit_code == 0);
  const auto begin = human.output.find("matrix begin\n");
  const auto end = human.output.find("matrix end");
  REQUIRE(begin != std::string::npos);
  REQUIRE(end != std::string::npos);
  const std::string block = human.output.substr(begin + 13, end - begin - 13);
  const auto doc = opeq::parse_matrix_document(block);
  CHECK(doc.name == "x");
  CHECK(doc.dim == 2);
  // printed at 6 significant digits; reprinting the parsed values is identical
  const auto reprinted = opeq::serialize_matrix_document(doc, 6);
  const auto reparsed = opeq::parse_matrix_document(reprinted);
  CHECK(reparsed.data == doc.data);
}

TEST_CASE("cli: --out writes the same JSON document") {
  const fs::path out = temp_dir() / "report.json";
  const auto res =
      run_cli("reproduce remark23 --quiet --out " + out.string());
  CHECK(res.exit_code == 0);
  std::ifstream in(out);
  REQUIRE(in.good());
  const json report = json::parse(in);
  CHECK(report["passed"].get<bool>());
  CHECK(report["case"] == "remark23");
}
