#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <string>
#include <vector>

#include "opeq/errors.hpp"
#include "opeq/spectral.hpp"
#include "opeq/sym_matrix.hpp"

namespace opeq {

/// d(x, y) = sum_{j=1}^{n} x^{n-j} y^{j-1}, the scalar divisor of the
/// eigenbasis solve. Computed by the direct sum; the closed form
/// (x^n - y^n)/(x - y) cancels catastrophically for x near y.
/// Strictly positive for x, y > 0.
template <typename Scalar>
Scalar denominator(Scalar x, Scalar y, int n) {
  if (n < 1) raise(ErrorCode::BadArgument, "denominator: n must be >= 1");
  Scalar sum(0);
  for (int j = 1; j <= n; ++j)
    sum += std::pow(x, Scalar(n - j)) * std::pow(y, Scalar(j - 1));
  return sum;
}

namespace detail {

/// I, A, A^2, ..., A^{n-1} by repeated multiplication.
template <typename Scalar>
std::vector<DenseMatrix<Scalar>> power_table(const DenseMatrix<Scalar>& a, int n) {
  std::vector<DenseMatrix<Scalar>> powers;
  powers.reserve(n);
  powers.push_back(DenseMatrix<Scalar>::Identity(a.rows(), a.cols()));
  for (int j = 1; j < n; ++j) powers.push_back(powers.back() * a);
  return powers;
}

}  // namespace detail

/// Left-hand side of the operator equation: sum_{j=1}^{n} A^{n-j} X A^{j-1}.
/// Symmetric for symmetric A, X since the sum equals its own transpose.
template <typename Scalar>
SymMatrix<Scalar> apply_lhs(const SymMatrix<Scalar>& a, int n,
                            const SymMatrix<Scalar>& x) {
  require_same_dim(a, x, "apply_lhs");
  if (n < 1) raise(ErrorCode::BadArgument, "apply_lhs: n must be >= 1");
  const auto powers = detail::power_table(a.mat(), n);
  DenseMatrix<Scalar> acc = DenseMatrix<Scalar>::Zero(a.dim(), a.dim());
  for (int j = 1; j <= n; ++j) acc += powers[n - j] * x.mat() * powers[j - 1];
  return SymMatrix<Scalar>(acc);
}

/// One equation instance: solve sum_{j=1}^{n} A^{n-j} X A^{j-1} = B for X.
/// A must be positive definite (certify with check_psd before solving).
template <typename Scalar>
struct EquationInstance {
  SymMatrix<Scalar> a;
  int summands;  // n >= 1
  SymMatrix<Scalar> b;
};

enum class SolveMethod { Spectral, KroneckerOracle };

inline const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::Spectral: return "Spectral";
    case SolveMethod::KroneckerOracle: return "KroneckerOracle";
  }
  return "Unknown";
}

template <typename Scalar>
struct Solution {
  SymMatrix<Scalar> x;
  Scalar residual_fro;  // |LHS(X) - B|_F, always evaluated
  SolveMethod method;
};

namespace detail {

template <typename Scalar>
Scalar solve_residual(const SymMatrix<Scalar>& a, int n, const SymMatrix<Scalar>& x,
                      const SymMatrix<Scalar>& b) {
  return (apply_lhs(a, n, x).mat() - b.mat()).norm();
}

template <typename Scalar>
void validate_instance(const EquationInstance<Scalar>& inst, const char* where) {
  require_same_dim(inst.a, inst.b, where);
  if (inst.summands < 1)
    raise(ErrorCode::BadArgument, std::string(where) + ": summands must be >= 1");
}

}  // namespace detail

/// Exact solver: in A's eigenbasis the equation decouples entrywise,
/// X~(p,q) = B~(p,q) / d(a_p, a_q). Unique solution for positive definite A
/// since d(x, y) > 0 for x, y > 0.
template <typename Scalar>
Solution<Scalar> solve_spectral(const EquationInstance<Scalar>& inst) {
  detail::validate_instance(inst, "solve_spectral");
  const int n = inst.summands;
  const auto es = spectral_decompose(inst.a);
  const DenseMatrix<Scalar> b_tilde =
      es.eigenvectors.transpose() * inst.b.mat() * es.eigenvectors;
  DenseMatrix<Scalar> x_tilde(inst.a.dim(), inst.a.dim());
  for (Eigen::Index p = 0; p < inst.a.dim(); ++p) {
    for (Eigen::Index q = 0; q < inst.a.dim(); ++q) {
      const Scalar d = denominator(es.eigenvalues(p), es.eigenvalues(q), n);
      if (!(d > Scalar(1e-300)))
        raise(ErrorCode::SingularDenominator,
              "solve_spectral: vanishing denominator; A is not positive definite");
      x_tilde(p, q) = b_tilde(p, q) / d;
    }
  }
  SymMatrix<Scalar> x(es.eigenvectors * x_tilde * es.eigenvectors.transpose());
  const Scalar residual = detail::solve_residual(inst.a, n, x, inst.b);
  return {std::move(x), residual, SolveMethod::Spectral};
}

/// Independent oracle: stack the equation into a dim^2 x dim^2 dense linear
/// system sum_j A^{j-1} (x) A^{n-j} and solve by LU. Kept in the library (not
/// just tests) so every result is checkable by two unrelated paths.
template <typename Scalar>
Solution<Scalar> solve_kronecker(const EquationInstance<Scalar>& inst) {
  detail::validate_instance(inst, "solve_kronecker");
  const Eigen::Index dim = inst.a.dim();
  if (dim > 32)
    raise(ErrorCode::DimTooLarge,
          "solve_kronecker: dim " + std::to_string(dim) + " exceeds 32");
  const int n = inst.summands;
  const auto powers = detail::power_table(inst.a.mat(), n);
  DenseMatrix<Scalar> stacked = DenseMatrix<Scalar>::Zero(dim * dim, dim * dim);
  for (int j = 1; j <= n; ++j) {
    // vec(A^{n-j} X A^{j-1}) = (A^{j-1} (x) A^{n-j}) vec(X), A symmetric.
    stacked += Eigen::kroneckerProduct(powers[j - 1], powers[n - j]).eval();
  }
  Eigen::PartialPivLU<DenseMatrix<Scalar>> lu(stacked);
  const Scalar rcond = lu.rcond();
  if (!(rcond > Scalar(1e-14)))
    raise(ErrorCode::NumericallySingular,
          "solve_kronecker: stacked system condition estimate exceeds 1e14");
  const DenseVector<Scalar> vec_b = inst.b.mat().reshaped();
  const DenseVector<Scalar> vec_x = lu.solve(vec_b);
  SymMatrix<Scalar> x(DenseMatrix<Scalar>(vec_x.reshaped(dim, dim)));
  const Scalar residual = detail::solve_residual(inst.a, n, x, inst.b);
  return {std::move(x), residual, SolveMethod::KroneckerOracle};
}

}  // namespace opeq
