#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <thread>
#include <vector>

#include "opeq/equation.hpp"
#include "opeq/psd.hpp"
#include "opeq/random.hpp"
#include "oracles.hpp"

using opeq::apply_lhs;
using opeq::denominator;
using opeq::EquationInstance;
using opeq::Error;
using opeq::ErrorCode;
using opeq::Rng;
using opeq::solve_kronecker;
using opeq::solve_spectral;
using opeq::SolveMethod;
using opeq::SymMatrix;

namespace {

EquationInstance<double> random_instance(Rng& rng, Eigen::Index dim, int n) {
  auto a = opeq::random_pd<double>(rng, dim, 0.2, 4.0);
  auto b = SymMatrix<double>(opeq::random_gaussian<double>(rng, dim, dim));
  return {std::move(a), n, std::move(b)};
}

}  // namespace

TEST_CASE("denominator: hand values and equal-argument limit") {
  CHECK(denominator(1.0, 2.0, 2) == doctest::Approx(3.0));
  CHECK(denominator(1.0, 2.0, 3) == doctest::Approx(7.0));  // 4 + 2 + 1
  CHECK(denominator(2.0, 1.0, 3) == doctest::Approx(7.0));  // symmetric
  Rng rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const double x = rng.uniform(0.05, 5.0);
    const int n = rng.uniform_int(1, 8);
    CHECK(denominator(x, x, n) ==
          doctest::Approx(n * std::pow(x, n - 1)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(denominator(1.0, 1.0, 0), Error);
}

TEST_CASE("apply_lhs: n=1 and identity base") {
  Rng rng(2);
  const auto x = opeq::random_symmetric<double>(rng, 4);
  const auto a = opeq::random_pd<double>(rng, 4, 0.5, 2.0);
  CHECK((apply_lhs(a, 1, x).mat() - x.mat()).norm() <= 1e-14 * x.frobenius_norm());

  const auto id = SymMatrix<double>::identity(4);
  CHECK((apply_lhs(id, 3, x).mat() - 3.0 * x.mat()).norm() <=
        1e-13 * x.frobenius_norm());
}

TEST_CASE("apply_lhs: known 2x2 instance with radical entries") {
  // A = diag(1, 2*2^{1/3}), n = 3 maps the known X to the known Y.
  const double a1 = 2.0 * std::pow(2.0, 1.0 / 3.0);
  const auto a = SymMatrix<double>::diagonal(Eigen::Vector2d(1.0, a1));
  const double c = (3.0 * std::pow(2.0, 0.25) + 6.0 * std::pow(2.0, 0.75)) /
                   (1.0 + 2.0 * std::pow(2.0, 1.0 / 3.0) +
                    4.0 * std::pow(2.0, 2.0 / 3.0));
  Eigen::Matrix2d x;
  x << 4.0 / 3.0, c, c, 4.0 * std::pow(2.0, 1.0 / 3.0) / 3.0;
  Eigen::Matrix2d y;
  const double off = 3.0 * std::pow(2.0, 0.25) + 6.0 * std::pow(2.0, 0.75);
  y << 4.0, off, off, 32.0;
  const auto got = apply_lhs(a, 3, SymMatrix<double>(x));
  CHECK(oracles::entrywise_rel_error(got.mat(), y) <= 1e-12);
}

TEST_CASE("solve_spectral: identity base and radical instance") {
  Rng rng(3);
  const auto b = SymMatrix<double>(opeq::random_gaussian<double>(rng, 3, 3));
  const auto id = SymMatrix<double>::identity(3);
  const auto sol = solve_spectral(EquationInstance<double>{id, 2, b});
  CHECK(sol.method == SolveMethod::Spectral);
  CHECK((sol.x.mat() - b.mat() / 2.0).norm() <= 1e-13 * b.frobenius_norm());
  CHECK(sol.residual_fro <= 1e-9 * std::max(1.0, b.frobenius_norm()));

  const double a1 = 2.0 * std::pow(2.0, 1.0 / 3.0);
  const auto a = SymMatrix<double>::diagonal(Eigen::Vector2d(1.0, a1));
  const double off = 3.0 * std::pow(2.0, 0.25) + 6.0 * std::pow(2.0, 0.75);
  Eigen::Matrix2d y;
  y << 4.0, off, off, 32.0;
  const auto sol23 = solve_spectral(EquationInstance<double>{a, 3, SymMatrix<double>(y)});
  const auto eigs = opeq::spectral_decompose(sol23.x).eigenvalues;
  CHECK(eigs(0) == doctest::Approx(0.1119).epsilon(1e-3));
  CHECK(eigs(1) == doctest::Approx(2.9013).epsilon(1e-3));
}

TEST_CASE("solve_kronecker: hand instances") {
  Rng rng(4);
  const auto b = SymMatrix<double>(opeq::random_gaussian<double>(rng, 3, 3));
  const auto id = SymMatrix<double>::identity(3);
  const auto sol = solve_kronecker(EquationInstance<double>{id, 5, b});
  CHECK(sol.method == SolveMethod::KroneckerOracle);
  CHECK((sol.x.mat() - b.mat() / 5.0).norm() <= 1e-12 * b.frobenius_norm());

  // n = 2, A = diag(1,2), B = ones: X(p,q) = 1/(a_p + a_q)
  const auto a = SymMatrix<double>::diagonal(Eigen::Vector2d(1.0, 2.0));
  const auto ones = SymMatrix<double>::ones(2);
  const auto sol2 = solve_kronecker(EquationInstance<double>{a, 2, ones});
  Eigen::Matrix2d want;
  want << 0.5, 1.0 / 3.0, 1.0 / 3.0, 0.25;
  CHECK(oracles::entrywise_rel_error(sol2.x.mat(), want) <= 1e-12);
}

TEST_CASE("solve_kronecker: guards") {
  Rng rng(5);
  const auto big = random_instance(rng, 33, 2);
  try {
    solve_kronecker(big);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimTooLarge);
  }

  // near-singular base at high n: stacked condition blows past 1e14
  const auto tiny = SymMatrix<double>::diagonal(Eigen::Vector2d(1e-4, 1.0));
  try {
    solve_kronecker(EquationInstance<double>{tiny, 6, SymMatrix<double>::ones(2)});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NumericallySingular);
  }
}

TEST_CASE("solve_spectral: singular denominator on non-PD base") {
  const auto a = SymMatrix<double>::diagonal(Eigen::Vector2d(0.0, 1.0));
  const auto b = SymMatrix<double>::ones(2);
  try {
    solve_spectral(EquationInstance<double>{a, 2, b});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularDenominator);
  }
}

TEST_CASE("solvers agree on random instances") {
  Rng rng(6);
  for (int rep = 0; rep < 25; ++rep) {
    const Eigen::Index dim = 2 + rep % 5;
    const int n = 1 + rep % 6;
    const auto inst = random_instance(rng, dim, n);
    const auto spectral = solve_spectral(inst);
    const auto kron = solve_kronecker(inst);
    CHECK(oracles::rel_fro_error(spectral.x.mat(), kron.x.mat()) <= 1e-9);
  }
  // the documented cross-check example: dim 5, n = 4
  const auto inst = random_instance(rng, 5, 4);
  CHECK(oracles::rel_fro_error(solve_spectral(inst).x.mat(),
                               solve_kronecker(inst).x.mat()) <= 1e-9);
}

TEST_CASE("round-trip: solve(apply_lhs(X0)) recovers X0") {
  Rng rng(7);
  for (int n = 1; n <= 6; ++n) {
    const Eigen::Index dim = 2 + n % 4;
    const auto a = opeq::random_pd<double>(rng, dim, 0.2, 4.0);
    const auto x0 = opeq::random_symmetric<double>(rng, dim);
    const auto b = apply_lhs(a, n, x0);
    const auto sol = solve_spectral(EquationInstance<double>{a, n, b});
    CHECK(oracles::rel_fro_error(sol.x.mat(), x0.mat()) <= 1e-9);
    CHECK(sol.residual_fro <= 1e-9 * std::max(1.0, b.frobenius_norm()));
  }
}

TEST_CASE("linearity of the solve map") {
  Rng rng(8);
  const auto a = opeq::random_pd<double>(rng, 4, 0.3, 3.0);
  const auto b1 = opeq::random_symmetric<double>(rng, 4);
  const auto b2 = opeq::random_symmetric<double>(rng, 4);
  const double alpha = 0.7;
  const double beta = -1.3;
  for (const int n : {1, 3, 5}) {
    const auto x1 = solve_spectral(EquationInstance<double>{a, n, b1}).x;
    const auto x2 = solve_spectral(EquationInstance<double>{a, n, b2}).x;
    const SymMatrix<double> combo(alpha * b1.mat() + beta * b2.mat());
    const auto x12 = solve_spectral(EquationInstance<double>{a, n, combo}).x;
    CHECK(oracles::rel_fro_error(x12.mat(), alpha * x1.mat() + beta * x2.mat()) <=
          1e-9);
  }
}

TEST_CASE("solvers are safe to run concurrently on shared inputs") {
  Rng rng(10);
  const auto inst = random_instance(rng, 5, 4);
  const auto reference = solve_spectral(inst).x;
  std::vector<SymMatrix<double>> results(8, SymMatrix<double>::zero(5));
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < results.size(); ++i)
    workers.emplace_back([&inst, &results, i] {
      results[i] = (i % 2 == 0 ? solve_spectral(inst) : solve_kronecker(inst)).x;
    });
  for (auto& worker : workers) worker.join();
  for (const auto& x : results)
    CHECK(oracles::rel_fro_error(x.mat(), reference.mat()) <= 1e-9);
}

TEST_CASE("solution is symmetric and PSD transfers from B to X") {
  Rng rng(9);
  for (int rep = 0; rep < 15; ++rep) {
    const Eigen::Index dim = 2 + rep % 5;
    const int n = 1 + rep % 6;
    const auto a = opeq::random_pd<double>(rng, dim, 0.2, 4.0);
    const auto b = opeq::random_psd<double>(rng, dim, 3.0);
    const auto sol = solve_spectral(EquationInstance<double>{a, n, b});
    CHECK(sol.x.mat() == sol.x.mat().transpose());
    CHECK(opeq::check_psd(sol.x, 1e-8).is_psd());
  }
}
