// opeq: command-line front end for the symmetric operator-equation toolkit.
//
// Subcommands: solve | build-rhs | reproduce | verify | fuzz.
// Reports are line-delimited key/value records; --json emits one machine-
// readable document instead, and --out writes that document to a file.
// Exit codes: 0 success, 1 reproduction/suite failure, 2 input error,
// 3 math precondition failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "opeq/opeq.hpp"

namespace {

using nlohmann::ordered_json;
using opeq::ConstructionParams;
using opeq::EquationInstance;
using opeq::SymMatrix;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitPreconditionError = 3;

struct GlobalOptions {
  double tol_scale = opeq::default_tolerance_scale();
  std::uint64_t seed = 0;
  bool json = false;
  bool quiet = false;
  std::string out_path;
};

int exit_code_for(opeq::ErrorCode code) {
  switch (code) {
    case opeq::ErrorCode::ParseError:
    case opeq::ErrorCode::BadArgument:
    case opeq::ErrorCode::DimMismatch:
    case opeq::ErrorCode::NonFinite:
    case opeq::ErrorCode::DimTooLarge:
      return kExitInputError;
    default:
      return kExitPreconditionError;
  }
}

ordered_json matrix_json(const Eigen::MatrixXd& m, const std::string& name) {
  ordered_json j;
  j["name"] = name;
  j["dim"] = m.rows();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index jx = 0; jx < m.cols(); ++jx) data.push_back(m(i, jx));
  j["data"] = data;
  return j;
}

ordered_json psd_report_json(const opeq::PsdReport<double>& report) {
  return {{"verdict", opeq::to_string(report.verdict)},
          {"min_eigenvalue", report.min_eigenvalue},
          {"tolerance_used", report.tolerance_used}};
}

ordered_json r_condition_json(const opeq::RCondition<double>& rc) {
  ordered_json j;
  j["branch"] = opeq::to_string(rc.branch);
  if (std::isfinite(rc.required_r))
    j["required_r"] = rc.required_r;
  else
    j["required_r"] = nullptr;
  j["valid"] = rc.valid;
  return j;
}

std::vector<double> eigenvalues_of(const SymMatrix<double>& m) {
  const auto es = opeq::spectral_decompose(m);
  return {es.eigenvalues.data(), es.eigenvalues.data() + es.eigenvalues.size()};
}

bool is_matrix_object(const ordered_json& j) {
  return j.is_object() && j.contains("dim") && j.contains("data") &&
         j["data"].is_array();
}

void print_matrix_block(std::ostream& os, const ordered_json& m) {
  os << "matrix begin\n";
  if (m.contains("name")) {
    const auto name = m["name"].get<std::string>();
    if (!name.empty()) os << "name " << name << "\n";
  }
  const auto dim = m["dim"].get<Eigen::Index>();
  os << "dim " << dim << "\n"
     << "data\n";
  for (Eigen::Index i = 0; i < dim; ++i) {
    std::ostringstream row;
    row.precision(6);
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (j > 0) row << ' ';
      row << m["data"][static_cast<std::size_t>(i * dim + j)].get<double>();
    }
    os << row.str() << "\n";
  }
  os << "matrix end\n";
}

void print_human(std::ostream& os, const ordered_json& j, const std::string& prefix) {
  if (is_matrix_object(j)) {
    print_matrix_block(os, j);
    return;
  }
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      print_human(os, value, prefix.empty() ? key : prefix + "." + key);
    }
    return;
  }
  if (j.is_array()) {
    std::size_t index = 0;
    for (const auto& value : j) {
      print_human(os, value, prefix + "[" + std::to_string(index) + "]");
      ++index;
    }
    return;
  }
  if (j.is_string())
    os << prefix << " " << j.get<std::string>() << "\n";
  else
    os << prefix << " " << j.dump() << "\n";
}

ordered_json report_skeleton(const GlobalOptions& g, const std::string& command_echo,
                             const std::string& subcommand) {
  ordered_json report;
  report["tool"] = "opeq";
  report["version"] = opeq::kVersion;
  report["command"] = subcommand;
  report["command_line"] = command_echo;
  report["seed"] = g.seed;
  report["tol_scale"] = g.tol_scale;
  return report;
}

void emit_report(const GlobalOptions& g, ordered_json& report,
                 std::chrono::steady_clock::time_point start) {
  const auto elapsed = std::chrono::steady_clock::now() - start;
  report["timing_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  if (!g.out_path.empty()) {
    std::ofstream out(g.out_path);
    if (!out) opeq::raise(opeq::ErrorCode::ParseError, "cannot write " + g.out_path);
    out << report.dump(2) << "\n";
  }
  if (g.json) {
    std::cout << report.dump(2) << "\n";
  } else if (!g.quiet) {
    print_human(std::cout, report, "");
  }
}

void warn(const GlobalOptions& g, const std::string& message) {
  if (!g.quiet) std::cerr << "warning: " << message << "\n";
}

struct LoadedMatrix {
  opeq::MatrixDocument doc;
  std::string digest;
  std::string path;
};

LoadedMatrix load_input(const GlobalOptions& g, const std::string& path,
                        const std::string& role) {
  const std::string bytes = opeq::read_file(path);
  LoadedMatrix loaded{opeq::parse_matrix_document(bytes), opeq::fnv1a_digest(bytes),
                      path};
  if (loaded.doc.asymmetry_warning)
    warn(g, role + " (" + path + ") is asymmetric by " +
                std::to_string(loaded.doc.max_asymmetry) +
                "; symmetrizing with (M + M^T)/2");
  return loaded;
}

ordered_json input_json(const LoadedMatrix& in, const std::string& role) {
  ordered_json j;
  j["role"] = role;
  j["path"] = in.path;
  j["digest"] = in.digest;
  j["dim"] = in.doc.dim;
  j["max_asymmetry"] = in.doc.max_asymmetry;
  return j;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string a_path;
  std::string b_path;
  int n = 1;
  bool oracle = false;
};

int run_solve(const GlobalOptions& g, const std::string& echo, const SolveArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const LoadedMatrix a_in = load_input(g, args.a_path, "a");
  const LoadedMatrix b_in = load_input(g, args.b_path, "b");
  const SymMatrix<double> a = a_in.doc.to_sym();
  const SymMatrix<double> b = b_in.doc.to_sym();
  opeq::require_same_dim(a, b, "solve");

  const auto a_report = opeq::check_psd(a, g.tol_scale);
  if (!a_report.is_positive_definite())
    opeq::raise(opeq::ErrorCode::NotPsd,
                "solve: A must be positive definite (min eigenvalue " +
                    std::to_string(a_report.min_eigenvalue) + ")");

  ordered_json report = report_skeleton(g, echo, "solve");
  report["inputs"] = {input_json(a_in, "a"), input_json(b_in, "b")};
  report["n"] = args.n;

  const auto solution = opeq::solve_spectral(EquationInstance<double>{a, args.n, b});
  report["x"] = matrix_json(solution.x.mat(), "x");
  report["method"] = opeq::to_string(solution.method);
  report["residual_fro"] = solution.residual_fro;
  report["x_report"] = psd_report_json(opeq::check_psd(solution.x, g.tol_scale));
  report["x_eigenvalues"] = eigenvalues_of(solution.x);

  int exit_code = kExitOk;
  if (args.oracle) {
    const auto oracle = opeq::solve_kronecker(EquationInstance<double>{a, args.n, b});
    const double rel = (solution.x.mat() - oracle.x.mat()).norm() /
                       std::max(1.0, oracle.x.mat().norm());
    const bool agree = rel <= 1e-9;
    report["oracle"] = {{"method", opeq::to_string(oracle.method)},
                        {"residual_fro", oracle.residual_fro},
                        {"rel_fro_difference", rel},
                        {"agree", agree}};
    if (!agree) exit_code = kExitFailure;
  }
  emit_report(g, report, start);
  return exit_code;
}

// ---------------------------------------------------------------------------
// build-rhs

struct BuildRhsArgs {
  std::string a_path;
  std::string b_path;
  int m = 1;
  int n = 1;
  int k = 1;
  double t = 0.0;
  double r = 0.0;
  bool raw = false;
  bool solve = false;
  bool allow_indefinite_b = false;
};

int run_build_rhs(const GlobalOptions& g, const std::string& echo,
                  const BuildRhsArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const LoadedMatrix a_in = load_input(g, args.a_path, "a");
  const LoadedMatrix b_in = load_input(g, args.b_path, "b");
  const SymMatrix<double> a = a_in.doc.to_sym();
  const SymMatrix<double> b = b_in.doc.to_sym();
  opeq::require_same_dim(a, b, "build-rhs");

  if (!opeq::check_psd(a, g.tol_scale).is_positive_definite())
    opeq::raise(opeq::ErrorCode::NotPsd, "build-rhs: A must be positive definite");
  if (!args.allow_indefinite_b && !opeq::check_psd(b, g.tol_scale).is_psd())
    opeq::raise(opeq::ErrorCode::NotPsd,
                "build-rhs: B must be positive semidefinite "
                "(override with --allow-indefinite-b)");

  const ConstructionParams<double> params{args.m, args.n, args.k, args.t, args.r};
  const auto rc = opeq::check_r_condition(params);

  ordered_json report = report_skeleton(g, echo, "build-rhs");
  report["inputs"] = {input_json(a_in, "a"), input_json(b_in, "b")};
  report["params"] = {{"m", args.m}, {"n", args.n}, {"k", args.k},
                      {"t", args.t}, {"r", args.r}};
  report["r_condition"] = r_condition_json(rc);
  if (!rc.valid)
    warn(g,
         "r-condition is NOT satisfied; the solved X may fail to be positive "
         "semidefinite");

  SymMatrix<double> base = a;  // equation base the --solve step uses
  SymMatrix<double> rhs = SymMatrix<double>::zero(a.dim());
  if (args.raw) {
    auto raw = opeq::build_rhs_raw(a, b, params, g.tol_scale);
    report["base"] = matrix_json(raw.base.mat(), "base");
    report["rhs"] = matrix_json(raw.rhs.mat(), "rhs");
    base = std::move(raw.base);
    rhs = std::move(raw.rhs);
  } else {
    rhs = opeq::build_rhs(a, b, params, g.tol_scale);
    report["rhs"] = matrix_json(rhs.mat(), "rhs");
  }
  report["rhs_report"] = psd_report_json(opeq::check_psd(rhs, g.tol_scale));

  if (args.solve) {
    const auto solution =
        opeq::solve_spectral(EquationInstance<double>{base, args.n, rhs});
    report["x"] = matrix_json(solution.x.mat(), "x");
    report["residual_fro"] = solution.residual_fro;
    report["x_report"] = psd_report_json(opeq::check_psd(solution.x, g.tol_scale));
    report["x_eigenvalues"] = eigenvalues_of(solution.x);
  }
  emit_report(g, report, start);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// reproduce

struct ReproduceArgs {
  std::string case_id;
  std::string eigs = "1,1";
  int m = 1;
  int n = 1;
  int k = 1;
  double t = 0.0;
  double r = 0.0;
};

class AssertionLog {
 public:
  void check(const std::string& name, double got, double expected, double tol) {
    const double error = std::abs(got - expected);
    const bool pass = error <= tol;
    all_pass_ &= pass;
    records_.push_back({{"name", name},
                        {"got", got},
                        {"expected", expected},
                        {"abs_error", error},
                        {"tolerance", tol},
                        {"pass", pass}});
  }

  /// Entrywise |got - want| <= tol * max(1, |want|).
  void check_matrix(const std::string& name, const Eigen::MatrixXd& got,
                    const Eigen::MatrixXd& expected, double tol) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < got.rows(); ++i)
      for (Eigen::Index j = 0; j < got.cols(); ++j)
        worst = std::max(worst, std::abs(got(i, j) - expected(i, j)) /
                                    std::max(1.0, std::abs(expected(i, j))));
    const bool pass = worst <= tol;
    all_pass_ &= pass;
    records_.push_back({{"name", name},
                        {"max_rel_entry_error", worst},
                        {"tolerance", tol},
                        {"pass", pass}});
  }

  void check_true(const std::string& name, bool condition) {
    all_pass_ &= condition;
    records_.push_back({{"name", name}, {"pass", condition}});
  }

  bool all_pass() const { return all_pass_; }
  const ordered_json& records() const { return records_; }

 private:
  bool all_pass_ = true;
  ordered_json records_ = ordered_json::array();
};

void reproduce_remark22(const GlobalOptions& g, ordered_json& report,
                        AssertionLog& log) {
  const auto a = SymMatrix<double>::diagonal(Eigen::Vector2d(1.0, 2.0));
  const auto b = SymMatrix<double>::ones(2);
  const ConstructionParams<double> params{2, 2, 2, 0.5, 0.5};

  const auto rc = opeq::check_r_condition(params);
  log.check("required_r", rc.required_r, 2.0, 1e-12);
  log.check_true("r_condition_invalid", !rc.valid);

  const double s2 = std::sqrt(2.0);
  Eigen::Matrix2d expected_rhs;
  expected_rhs << 4.0, 3.0 + 6.0 * s2, 3.0 + 6.0 * s2, 16.0 * s2;
  const auto raw = opeq::build_rhs_raw(a, b, params, g.tol_scale);
  log.check_matrix("raw_rhs_entries", raw.rhs.mat(), expected_rhs, 1e-12);

  Eigen::Matrix2d expected_base;  // A^{7/4}
  expected_base << 1.0, 0.0, 0.0, std::pow(2.0, 1.75);
  log.check_matrix("raw_base_entries", raw.base.mat(), expected_base, 1e-12);

  // Diagonal of the rhs is {4, 16 sqrt(2)}; pinned through trace and det.
  log.check("rhs_trace", raw.rhs.trace(), 4.0 + 16.0 * s2, 1e-10);
  log.check("rhs_det", raw.rhs.mat().determinant(),
            4.0 * 16.0 * s2 - (3.0 + 6.0 * s2) * (3.0 + 6.0 * s2), 1e-10);

  const auto solution =
      opeq::solve_spectral(EquationInstance<double>{raw.base, params.n, raw.rhs});
  const auto eigs = opeq::spectral_decompose(solution.x).eigenvalues;
  log.check("x_eigenvalue_min", eigs(0), -0.0372, 5e-5);
  log.check("x_eigenvalue_max", eigs(1), 5.4007, 5e-5);
  log.check_true("x_indefinite",
                 !opeq::check_psd(solution.x, g.tol_scale).is_psd());

  const double off = (3.0 + 6.0 * s2) / (1.0 + 2.0 * std::pow(2.0, 0.75));
  Eigen::Matrix2d expected_x;
  expected_x << 2.0, off, off, 2.0 * std::pow(2.0, 0.75);
  log.check_matrix("x_entries", solution.x.mat(), expected_x, 1e-10);

  const auto closed = opeq::closed_form_diagonal(
      opeq::DenseVector<double>(Eigen::Vector2d(1.0, 2.0)), params);
  log.check_matrix("closed_form_matches_solver", closed.mat(), solution.x.mat(),
                   1e-10);

  report["x"] = matrix_json(solution.x.mat(), "x");
  report["rhs"] = matrix_json(raw.rhs.mat(), "rhs");
  report["x_eigenvalues"] = {eigs(0), eigs(1)};
}

void reproduce_remark23(const GlobalOptions& g, ordered_json& report,
                        AssertionLog& log) {
  const double a1 = 2.0 * std::pow(2.0, 1.0 / 3.0);
  const auto a = SymMatrix<double>::diagonal(Eigen::Vector2d(1.0, a1));
  const auto b = SymMatrix<double>::ones(2);
  const ConstructionParams<double> params{2, 3, 2, 0.5, 1.0};

  const auto rc = opeq::check_r_condition(params);
  log.check("required_r", rc.required_r, 0.75, 1e-12);
  log.check_true("r_condition_valid", rc.valid);

  const double off = 3.0 * std::pow(2.0, 0.25) + 6.0 * std::pow(2.0, 0.75);
  Eigen::Matrix2d expected_y;
  expected_y << 4.0, off, off, 32.0;
  const auto y = opeq::build_rhs(a, b, params, g.tol_scale);
  log.check_matrix("y_entries", y.mat(), expected_y, 1e-10);

  const auto y_eigs = opeq::spectral_decompose(y).eigenvalues;
  log.check("y_eigenvalue_min", y_eigs(0), -1.5589, 5e-5);
  log.check("y_eigenvalue_max", y_eigs(1), 37.5589, 5e-5);
  log.check_true("y_indefinite", !opeq::check_psd(y, g.tol_scale).is_psd());

  const auto solution = opeq::solve_spectral(EquationInstance<double>{a, params.n, y});
  const auto x_eigs = opeq::spectral_decompose(solution.x).eigenvalues;
  log.check("x_eigenvalue_min", x_eigs(0), 0.1119, 5e-5);
  log.check("x_eigenvalue_max", x_eigs(1), 2.9013, 5e-5);
  log.check_true("x_positive_definite",
                 opeq::check_psd(solution.x, g.tol_scale).is_positive_definite());

  const double x_off =
      off / (1.0 + 2.0 * std::pow(2.0, 1.0 / 3.0) + 4.0 * std::pow(2.0, 2.0 / 3.0));
  Eigen::Matrix2d expected_x;
  expected_x << 4.0 / 3.0, x_off, x_off, 4.0 * std::pow(2.0, 1.0 / 3.0) / 3.0;
  log.check_matrix("x_entries", solution.x.mat(), expected_x, 1e-10);
  log.check_true("residual_small",
                 solution.residual_fro <= 1e-9 * std::max(1.0, y.frobenius_norm()));

  report["y"] = matrix_json(y.mat(), "y");
  report["x"] = matrix_json(solution.x.mat(), "x");
  report["y_eigenvalues"] = {y_eigs(0), y_eigs(1)};
  report["x_eigenvalues"] = {x_eigs(0), x_eigs(1)};
}

void reproduce_example21(const GlobalOptions& g, const ReproduceArgs& args,
                         ordered_json& report, AssertionLog& log) {
  std::vector<double> eig_values;
  std::stringstream stream(args.eigs);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      eig_values.push_back(std::stod(item));
    } catch (const std::exception&) {
      opeq::raise(opeq::ErrorCode::BadArgument, "bad --eigs entry '" + item + "'");
    }
  }
  if (eig_values.empty())
    opeq::raise(opeq::ErrorCode::BadArgument, "--eigs must list at least one value");
  opeq::DenseVector<double> eigs(static_cast<Eigen::Index>(eig_values.size()));
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (!(eig_values[i] > 0))
      opeq::raise(opeq::ErrorCode::NonPositiveEigenvalue,
                  "--eigs entries must be positive");
    eigs(i) = eig_values[i];
  }

  const ConstructionParams<double> params{args.m, args.n, args.k, args.t, args.r};
  const auto closed = opeq::closed_form_diagonal(eigs, params);

  // Same instance through the general machinery: diagonal A, all-ones B,
  // raw pair solved at base G.
  const auto a = SymMatrix<double>::diagonal(eigs);
  const auto b = SymMatrix<double>::ones(eigs.size());
  const auto raw = opeq::build_rhs_raw(a, b, params, g.tol_scale);
  const auto solution =
      opeq::solve_spectral(EquationInstance<double>{raw.base, params.n, raw.rhs});
  log.check_matrix("closed_form_matches_pipeline", closed.mat(), solution.x.mat(),
                   1e-10);

  const auto rc = opeq::check_r_condition(params);
  if (rc.valid)
    log.check_true("x_psd", opeq::check_psd(closed, g.tol_scale).is_psd());

  const bool equal_eigs = (eigs.array() == eigs(0)).all();
  if (equal_eigs) {
    // Scalar reduction: k a^{(m-t)(k-1)} * m a^{m-1} * a^{r-t}
    //                   / (n a^{((m-t)k+r)(n-1)/n}), constant across entries.
    const double av = eigs(0);
    const double mt = args.m - args.t;
    const double w = (mt * args.k + args.r) / args.n;
    const double expected = args.k * std::pow(av, mt * (args.k - 1)) * args.m *
                            std::pow(av, args.m - 1.0) *
                            std::pow(av, args.r - args.t) /
                            (args.n * std::pow(av, w * (args.n - 1)));
    const double worst =
        (closed.mat().array() - expected).abs().maxCoeff();
    log.check("equal_eigs_constant_matrix", expected + worst, expected,
              1e-12 * std::abs(expected));
  }

  report["params"] = {{"m", args.m}, {"n", args.n}, {"k", args.k},
                      {"t", args.t}, {"r", args.r}};
  report["r_condition"] = r_condition_json(rc);
  report["x"] = matrix_json(closed.mat(), "x");
  report["x_eigenvalues"] = eigenvalues_of(closed);
}

int run_reproduce(const GlobalOptions& g, const std::string& echo,
                  const ReproduceArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  ordered_json report = report_skeleton(g, echo, "reproduce");
  report["case"] = args.case_id;
  AssertionLog log;
  if (args.case_id == "remark22") {
    reproduce_remark22(g, report, log);
  } else if (args.case_id == "remark23") {
    reproduce_remark23(g, report, log);
  } else if (args.case_id == "example21") {
    reproduce_example21(g, args, report, log);
  } else {
    opeq::raise(opeq::ErrorCode::BadArgument,
                "unknown case '" + args.case_id +
                    "' (expected remark22 | remark23 | example21)");
  }
  report["assertions"] = log.records();
  report["passed"] = log.all_pass();
  emit_report(g, report, start);
  return log.all_pass() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string suite_id;
  long trials = 100;
  std::string dims = "2..6";
  int lemma_m = 0;  // 0 cycles m through 1..8
};

std::pair<Eigen::Index, Eigen::Index> parse_dims(const std::string& text) {
  Eigen::Index lo = 0;
  Eigen::Index hi = 0;
  const auto sep = text.find("..");
  try {
    if (sep == std::string::npos) {
      lo = hi = std::stol(text);
    } else {
      lo = std::stol(text.substr(0, sep));
      hi = std::stol(text.substr(sep + 2));
    }
  } catch (const std::exception&) {
    opeq::raise(opeq::ErrorCode::BadArgument, "bad --dims '" + text + "'");
  }
  if (lo < 1 || hi < lo || hi > 64)
    opeq::raise(opeq::ErrorCode::BadArgument,
                "--dims must satisfy 1 <= lo <= hi <= 64");
  return {lo, hi};
}

int run_verify(const GlobalOptions& g, const std::string& echo,
               const VerifyArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const auto [dim_lo, dim_hi] = parse_dims(args.dims);
  ordered_json report = report_skeleton(g, echo, "verify");
  report["suite"] = args.suite_id;
  report["trials"] = args.trials;
  report["dims"] = args.dims;

  long failures = 0;
  if (args.suite_id == "lemma") {
    const auto result = opeq::run_lemma_suite<double>(args.trials, g.seed, dim_lo,
                                                      dim_hi, args.lemma_m);
    failures = result.failures;
    report["passed_trials"] = result.trials - result.failures;
    report["failures"] = result.failures;
    report["worst_rel_error"] = result.worst_rel_error;
    report["worst_trial"] = result.worst_trial;
    report["max_rel_error"] = 1e-6;
  } else {
    opeq::SuiteKind kind;
    if (args.suite_id == "lh")
      kind = opeq::SuiteKind::LoewnerHeinz;
    else if (args.suite_id == "furuta")
      kind = opeq::SuiteKind::Furuta;
    else if (args.suite_id == "grand-furuta")
      kind = opeq::SuiteKind::GrandFuruta;
    else if (args.suite_id == "proofstep")
      kind = opeq::SuiteKind::ProofStep;
    else
      opeq::raise(opeq::ErrorCode::BadArgument,
                  "unknown suite '" + args.suite_id +
                      "' (expected lh | furuta | grand-furuta | lemma | proofstep)");
    const auto result =
        opeq::run_inequality_suite<double>(kind, args.trials, g.seed, dim_lo, dim_hi);
    failures = result.failures;
    report["passed_trials"] = result.trials - result.failures;
    report["failures"] = result.failures;
    report["worst_min_eigenvalue_over_scale"] = result.worst_margin;
    report["worst_trial"] = result.worst_trial;
    report["pass_tol_scale"] = 1e-8;
  }
  report["passed"] = (failures == 0);
  emit_report(g, report, start);
  return failures == 0 ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// fuzz

struct FuzzArgs {
  std::string target_id;
  long trials = 1000;
  Eigen::Index dim = 2;
  std::string probe;
  std::vector<std::string> ranges;
};

opeq::InequalityId fuzz_target(const std::string& id) {
  if (id == "lh-alpha2") return opeq::InequalityId::LoewnerHeinz;
  if (id == "furuta") return opeq::InequalityId::Furuta;
  if (id == "grand-furuta") return opeq::InequalityId::GrandFuruta;
  if (id == "theorem21-r") return opeq::InequalityId::Theorem21;
  opeq::raise(opeq::ErrorCode::BadArgument,
              "unknown fuzz target '" + id +
                  "' (expected lh-alpha2 | furuta | grand-furuta | theorem21-r)");
}

void apply_range_overrides(opeq::SearchSpec<double>& spec,
                           const std::vector<std::string>& overrides) {
  for (const std::string& text : overrides) {
    const auto eq = text.find('=');
    const auto colon = text.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos)
      opeq::raise(opeq::ErrorCode::BadArgument,
                  "bad --range '" + text + "' (expected key=lo:hi)");
    const std::string key = text.substr(0, eq);
    if (spec.ranges.find(key) == spec.ranges.end())
      opeq::raise(opeq::ErrorCode::BadArgument,
                  "unknown --range key '" + key + "' for this target");
    try {
      spec.ranges[key] = {std::stod(text.substr(eq + 1, colon - eq - 1)),
                          std::stod(text.substr(colon + 1))};
    } catch (const std::exception&) {
      opeq::raise(opeq::ErrorCode::BadArgument, "bad --range '" + text + "'");
    }
  }
}

ordered_json witness_json(const opeq::InequalityWitness<double>& w) {
  ordered_json params;
  for (const auto& [name, value] : w.parameters) params[name] = value;
  ordered_json j;
  j["inequality"] = opeq::to_string(w.inequality_id);
  j["parameters"] = params;
  j["a"] = matrix_json(w.a.mat(), "a");
  j["b"] = matrix_json(w.b.mat(), "b");
  j["min_eigenvalue"] = w.min_eigenvalue;
  j["seed"] = w.seed;
  j["trial"] = w.trial;
  return j;
}

int run_fuzz(const GlobalOptions& g, const std::string& echo, const FuzzArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const opeq::InequalityId id = fuzz_target(args.target_id);
  ordered_json report = report_skeleton(g, echo, "fuzz");
  report["target"] = args.target_id;

  if (!args.probe.empty()) {
    if (args.probe != "remark22" || id != opeq::InequalityId::Theorem21)
      opeq::raise(opeq::ErrorCode::BadArgument,
                  "--probe remark22 applies to the theorem21-r target only");
    // Fixed probe: the invalid-r instance A=diag(1,2), B=all-ones,
    // (m,n,k,t,r)=(2,2,2,1/2,1/2), evaluated on its raw pair.
    const auto a = SymMatrix<double>::diagonal(Eigen::Vector2d(1.0, 2.0));
    const auto b = SymMatrix<double>::ones(2);
    const ConstructionParams<double> params{2, 2, 2, 0.5, 0.5};
    const auto raw = opeq::build_rhs_raw(a, b, params, g.tol_scale);
    opeq::InequalityWitness<double> witness{
        id,
        {{"m", 2}, {"n", 2}, {"k", 2}, {"t", 0.5}, {"r", 0.5}},
        raw.base,
        b,
        0.0,
        g.seed,
        -1};
    witness.min_eigenvalue = opeq::replay_witness(witness);
    report["probe"] = args.probe;
    report["witness"] = witness_json(witness);
    report["found"] = true;
    emit_report(g, report, start);
    return kExitOk;
  }

  opeq::SearchSpec<double> spec = opeq::default_search_spec<double>(id);
  spec.dim = args.dim;
  apply_range_overrides(spec, args.ranges);
  if (opeq::region_entirely_valid(spec))
    opeq::raise(opeq::ErrorCode::BadArgument,
                "refusing to fuzz: the sampling region lies entirely inside the "
                "validity region");

  ordered_json ranges;
  for (const auto& [key, range] : spec.ranges)
    ranges[key] = {{"lo", range.lo}, {"hi", range.hi}};
  report["dim"] = spec.dim;
  report["ranges"] = ranges;
  report["trials"] = args.trials;

  const auto witness = opeq::counterexample_search(spec, args.trials, g.seed);
  report["found"] = witness.has_value();
  if (witness) {
    report["witness"] = witness_json(*witness);
    const double replayed = opeq::replay_witness(*witness);
    report["replayed_min_eigenvalue"] = replayed;
    report["replay_consistent"] =
        std::abs(replayed - witness->min_eigenvalue) <= 1e-12;
  }
  emit_report(g, report, start);
  return kExitOk;
}

std::string join_args(int argc, char** argv) {
  std::string joined;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) joined += ' ';
    joined += argv[i];
  }
  return joined;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opeq: solve sum_{j=1}^{n} A^{n-j} X A^{j-1} = B for symmetric "
               "matrices, build guaranteed-PSD right-hand sides, and verify the "
               "Loewner-Heinz / Furuta / grand Furuta inequalities"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", opeq::kVersion);

  GlobalOptions g;
  app.add_option("--tol-scale", g.tol_scale,
                 "relative tolerance scale for PSD verdicts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", g.seed, "master seed for randomized commands")
      ->capture_default_str();
  app.add_flag("--json", g.json, "emit one JSON document instead of text records");
  app.add_flag("--quiet", g.quiet, "suppress human-readable output and warnings");
  app.add_option("--out", g.out_path, "also write the JSON report to this path");

  const std::string echo = join_args(argc, argv);
  int exit_code = kExitOk;

  SolveArgs solve_args;
  auto* solve_cmd =
      app.add_subcommand("solve", "solve the operator equation for X");
  solve_cmd->add_option("-a,--a", solve_args.a_path, "matrix file for A (PD)")
      ->required();
  solve_cmd->add_option("-b,--b", solve_args.b_path, "matrix file for B")->required();
  solve_cmd->add_option("-n,--n", solve_args.n, "number of summands")
      ->required()
      ->check(CLI::Range(1, 1 << 20));
  solve_cmd->add_flag("--oracle", solve_args.oracle,
                      "cross-check with the stacked-system solver");
  solve_cmd->callback([&] { exit_code = run_solve(g, echo, solve_args); });

  BuildRhsArgs build_args;
  auto* build_cmd = app.add_subcommand(
      "build-rhs", "build the right-hand side with a guaranteed PSD solution");
  build_cmd->add_option("-a,--a", build_args.a_path, "matrix file for A (PD)")
      ->required();
  build_cmd->add_option("-b,--b", build_args.b_path, "matrix file for B (PSD)")
      ->required();
  build_cmd->add_option("--m", build_args.m)->required()->check(CLI::Range(1, 64));
  build_cmd->add_option("--n", build_args.n)->required()->check(CLI::Range(1, 64));
  build_cmd->add_option("--k", build_args.k)->required()->check(CLI::Range(1, 64));
  build_cmd->add_option("--t", build_args.t, "t in [0, 1]")->capture_default_str();
  build_cmd->add_option("--r", build_args.r, "exponent r")->capture_default_str();
  build_cmd->add_flag("--raw", build_args.raw,
                      "emit the pre-substitution pair (base G, rhs)");
  build_cmd->add_flag("--solve", build_args.solve, "also solve for X and certify it");
  build_cmd->add_flag("--allow-indefinite-b", build_args.allow_indefinite_b,
                      "skip the B PSD precondition");
  build_cmd->callback([&] { exit_code = run_build_rhs(g, echo, build_args); });

  ReproduceArgs repro_args;
  auto* repro_cmd = app.add_subcommand(
      "reproduce", "run a built-in golden case and assert its known values");
  repro_cmd
      ->add_option("case", repro_args.case_id, "remark22 | remark23 | example21")
      ->required();
  repro_cmd->add_option("--eigs", repro_args.eigs,
                        "comma-separated diagonal of A (example21)");
  repro_cmd->add_option("--m", repro_args.m)->check(CLI::Range(1, 64));
  repro_cmd->add_option("--n", repro_args.n)->check(CLI::Range(1, 64));
  repro_cmd->add_option("--k", repro_args.k)->check(CLI::Range(1, 64));
  repro_cmd->add_option("--t", repro_args.t);
  repro_cmd->add_option("--r", repro_args.r);
  repro_cmd->callback([&] { exit_code = run_reproduce(g, echo, repro_args); });

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand(
      "verify", "randomized in-region verification suites (exit 1 on any failure)");
  verify_cmd
      ->add_option("suite", verify_args.suite_id,
                   "lh | furuta | grand-furuta | lemma | proofstep")
      ->required();
  verify_cmd->add_option("--trials", verify_args.trials)
      ->check(CLI::Range(1L, 100000000L))
      ->capture_default_str();
  verify_cmd->add_option("--dims", verify_args.dims, "dimension range, e.g. 2..6")
      ->capture_default_str();
  verify_cmd->add_option("--m", verify_args.lemma_m,
                         "fixed m for the lemma suite (default: cycle 1..8)")
      ->check(CLI::Range(1, 64));
  verify_cmd->callback([&] { exit_code = run_verify(g, echo, verify_args); });

  FuzzArgs fuzz_args;
  auto* fuzz_cmd = app.add_subcommand(
      "fuzz", "search outside validity regions for counterexamples (exit 0 "
              "whether or not one is found)");
  fuzz_cmd
      ->add_option("target", fuzz_args.target_id,
                   "lh-alpha2 | furuta | grand-furuta | theorem21-r")
      ->required();
  fuzz_cmd->add_option("--trials", fuzz_args.trials)
      ->check(CLI::Range(1L, 100000000L))
      ->capture_default_str();
  fuzz_cmd->add_option("--dim", fuzz_args.dim)
      ->check(CLI::Range(1, 32))
      ->capture_default_str();
  fuzz_cmd->add_option("--probe", fuzz_args.probe,
                       "evaluate a fixed named instance instead of sampling");
  fuzz_cmd->add_option("--range", fuzz_args.ranges,
                       "override a sampling range, key=lo:hi (repeatable)");
  fuzz_cmd->callback([&] { exit_code = run_fuzz(g, echo, fuzz_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  } catch (const opeq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return exit_code;
}
