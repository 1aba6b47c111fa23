#pragma once

#include <Eigen/Dense>

#include <string>
#include <type_traits>
#include <utility>

#include "opeq/errors.hpp"

namespace opeq {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Dense real symmetric matrix, the carrier type for all operators here.
/// Construction symmetrizes ((M + M^T)/2), so the stored entries satisfy
/// m(i,j) == m(j,i) exactly, and rejects non-square, empty or non-finite input.
template <typename Scalar>
class SymMatrix {
 public:
  using Matrix = DenseMatrix<Scalar>;

  template <typename Derived>
  explicit SymMatrix(const Eigen::MatrixBase<Derived>& m) {
    static_assert(std::is_same_v<typename Derived::Scalar, Scalar>,
                  "SymMatrix: scalar type mismatch");
    if (m.rows() != m.cols())
      raise(ErrorCode::DimMismatch, "SymMatrix: input must be square");
    if (m.rows() < 1) raise(ErrorCode::BadArgument, "SymMatrix: dim must be >= 1");
    mat_ = (m + m.transpose()) / Scalar(2);
    if (!mat_.allFinite())
      raise(ErrorCode::NonFinite, "SymMatrix: input has NaN or Inf entries");
  }

  static SymMatrix identity(Eigen::Index dim) {
    return SymMatrix(Matrix::Identity(dim, dim));
  }
  static SymMatrix zero(Eigen::Index dim) { return SymMatrix(Matrix::Zero(dim, dim)); }
  static SymMatrix ones(Eigen::Index dim) { return SymMatrix(Matrix::Ones(dim, dim)); }

  template <typename Derived>
  static SymMatrix diagonal(const Eigen::MatrixBase<Derived>& diag_entries) {
    return SymMatrix(Matrix(diag_entries.asDiagonal()));
  }

  Eigen::Index dim() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }

  Scalar frobenius_norm() const { return mat_.norm(); }
  Scalar max_abs() const { return mat_.cwiseAbs().maxCoeff(); }
  Scalar trace() const { return mat_.trace(); }

 private:
  Matrix mat_;
};

template <typename Scalar>
void require_same_dim(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b,
                      const char* where) {
  if (a.dim() != b.dim())
    raise(ErrorCode::DimMismatch, std::string(where) + ": dimension mismatch (" +
                                      std::to_string(a.dim()) + " vs " +
                                      std::to_string(b.dim()) + ")");
}

template <typename Scalar>
SymMatrix<Scalar> operator+(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b) {
  require_same_dim(a, b, "operator+");
  return SymMatrix<Scalar>(a.mat() + b.mat());
}

template <typename Scalar>
SymMatrix<Scalar> operator-(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b) {
  require_same_dim(a, b, "operator-");
  return SymMatrix<Scalar>(a.mat() - b.mat());
}

template <typename Scalar>
SymMatrix<Scalar> operator*(Scalar c, const SymMatrix<Scalar>& m) {
  return SymMatrix<Scalar>(c * m.mat());
}

template <typename Scalar>
SymMatrix<Scalar> operator*(const SymMatrix<Scalar>& m, Scalar c) {
  return c * m;
}

}  // namespace opeq
