#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "opeq/errors.hpp"
#include "opeq/sym_matrix.hpp"
#include "opeq/tolerance.hpp"

namespace opeq {

/// Eigendecomposition of a SymMatrix: M = V diag(eigenvalues) V^T with
/// eigenvalues in nondecreasing order and orthonormal eigenvector columns.
/// All fractional powers and the fast equation solver run through this.
template <typename Scalar>
struct SpectralDecomposition {
  DenseVector<Scalar> eigenvalues;
  DenseMatrix<Scalar> eigenvectors;

  Eigen::Index dim() const { return eigenvalues.size(); }
  Scalar min_eigenvalue() const { return eigenvalues(0); }
  Scalar max_eigenvalue() const { return eigenvalues(dim() - 1); }

  Scalar spectral_norm() const {
    return std::max(std::abs(min_eigenvalue()), std::abs(max_eigenvalue()));
  }

  DenseMatrix<Scalar> reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  }

  /// Spectral function: V diag(f(eigenvalues)) V^T, re-symmetrized.
  template <typename F>
  SymMatrix<Scalar> map_eigenvalues(F&& f) const {
    DenseVector<Scalar> mapped(eigenvalues.size());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) mapped(i) = f(eigenvalues(i));
    return SymMatrix<Scalar>(eigenvectors * mapped.asDiagonal() *
                             eigenvectors.transpose());
  }
};

template <typename Scalar>
SpectralDecomposition<Scalar> spectral_decompose(const SymMatrix<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(m.mat());
  if (solver.info() != Eigen::Success)
    raise(ErrorCode::ConvergenceFailure,
          "spectral_decompose: eigensolver did not converge (dim " +
              std::to_string(m.dim()) + ")");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// M^alpha as the spectral function lambda -> lambda^alpha.
///
/// Integer alpha accepts any symmetric input. Non-integer alpha >= 0 requires
/// eigenvalues >= -tol; values in [-tol, 0] are treated as round-off and
/// clamped to zero. alpha < 0 requires a positive definite input
/// (min eigenvalue > tol). tol = tol_scale * max(1, |M|_2).
template <typename Scalar>
SymMatrix<Scalar> matrix_power(const SpectralDecomposition<Scalar>& es, Scalar alpha,
                               Scalar tol_scale = Scalar(default_tolerance_scale())) {
  if (!(tol_scale > Scalar(0)))
    raise(ErrorCode::BadArgument, "matrix_power: tol_scale must be > 0");
  const Scalar tol = tol_scale * std::max(Scalar(1), es.spectral_norm());
  const bool integer_exponent = (alpha == std::floor(alpha));
  if (alpha < Scalar(0) && es.min_eigenvalue() <= tol)
    raise(ErrorCode::NegativePowerOfSingular,
          "matrix_power: negative power requires a positive definite matrix "
          "(min eigenvalue " +
              std::to_string(static_cast<double>(es.min_eigenvalue())) + ")");
  if (!integer_exponent && es.min_eigenvalue() < -tol)
    raise(ErrorCode::FractionalPowerOfIndefinite,
          "matrix_power: fractional power of an indefinite matrix "
          "(min eigenvalue " +
              std::to_string(static_cast<double>(es.min_eigenvalue())) + ")");
  return es.map_eigenvalues([&](Scalar lambda) {
    if (!integer_exponent && alpha >= Scalar(0) && lambda < Scalar(0))
      lambda = Scalar(0);  // round-off on a PSD input
    return std::pow(lambda, alpha);
  });
}

template <typename Scalar>
SymMatrix<Scalar> matrix_power(const SymMatrix<Scalar>& m, Scalar alpha,
                               Scalar tol_scale = Scalar(default_tolerance_scale())) {
  return matrix_power(spectral_decompose(m), alpha, tol_scale);
}

}  // namespace opeq
