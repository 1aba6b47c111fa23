#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

#include "opeq/sym_matrix.hpp"

namespace opeq {

/// Deterministic random source. Uses mt19937_64 with fully specified value
/// transforms (std:: distributions are implementation-defined), so fixed seeds
/// reproduce identical streams across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one call consumes two uniforms).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 sub-seed derivation: independent per-index streams from one master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <typename Scalar>
DenseMatrix<Scalar> random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  DenseMatrix<Scalar> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Scalar(rng.normal());
  return m;
}

/// Haar-ish random orthogonal matrix: QR of a Gaussian matrix with the sign of
/// diag(R) folded into Q.
template <typename Scalar>
DenseMatrix<Scalar> random_orthogonal(Rng& rng, Eigen::Index dim) {
  const DenseMatrix<Scalar> g = random_gaussian<Scalar>(rng, dim, dim);
  Eigen::HouseholderQR<DenseMatrix<Scalar>> qr(g);
  DenseMatrix<Scalar> q = qr.householderQ();
  const DenseMatrix<Scalar> r =
      qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j)
    if (r(j, j) < Scalar(0)) q.col(j) = -q.col(j);
  return q;
}

template <typename Scalar>
SymMatrix<Scalar> random_symmetric(Rng& rng, Eigen::Index dim) {
  return SymMatrix<Scalar>(random_gaussian<Scalar>(rng, dim, dim));
}

/// Random positive definite matrix with spectrum uniform in [lo, hi].
template <typename Scalar>
SymMatrix<Scalar> random_pd(Rng& rng, Eigen::Index dim, Scalar lo, Scalar hi) {
  if (!(lo > Scalar(0)) || !(hi >= lo))
    raise(ErrorCode::BadArgument, "random_pd: need 0 < lo <= hi");
  const DenseMatrix<Scalar> q = random_orthogonal<Scalar>(rng, dim);
  DenseVector<Scalar> eigs(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    eigs(i) = Scalar(rng.uniform(static_cast<double>(lo), static_cast<double>(hi)));
  return SymMatrix<Scalar>(q * eigs.asDiagonal() * q.transpose());
}

/// Random positive semidefinite matrix with spectrum uniform in [0, hi].
template <typename Scalar>
SymMatrix<Scalar> random_psd(Rng& rng, Eigen::Index dim, Scalar hi) {
  if (!(hi >= Scalar(0))) raise(ErrorCode::BadArgument, "random_psd: need hi >= 0");
  const DenseMatrix<Scalar> q = random_orthogonal<Scalar>(rng, dim);
  DenseVector<Scalar> eigs(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    eigs(i) = Scalar(rng.uniform(0.0, static_cast<double>(hi)));
  return SymMatrix<Scalar>(q * eigs.asDiagonal() * q.transpose());
}

template <typename Scalar>
struct LoewnerPair {
  SymMatrix<Scalar> a;
  SymMatrix<Scalar> b;
};

/// Test-input generator for A >= B >= 0 with A > 0:
/// B = C^T C, A = B + D^T D + 0.01 I for Gaussian C, D.
template <typename Scalar = double>
LoewnerPair<Scalar> gen_loewner_pair(Rng& rng, Eigen::Index dim) {
  if (dim < 1) raise(ErrorCode::BadArgument, "gen_loewner_pair: dim must be >= 1");
  const DenseMatrix<Scalar> c = random_gaussian<Scalar>(rng, dim, dim);
  const DenseMatrix<Scalar> d = random_gaussian<Scalar>(rng, dim, dim);
  SymMatrix<Scalar> b(c.transpose() * c);
  SymMatrix<Scalar> a(b.mat() + d.transpose() * d +
                      Scalar(0.01) * DenseMatrix<Scalar>::Identity(dim, dim));
  return {std::move(a), std::move(b)};
}

template <typename Scalar = double>
LoewnerPair<Scalar> gen_loewner_pair(std::uint64_t seed, Eigen::Index dim) {
  Rng rng(seed);
  return gen_loewner_pair<Scalar>(rng, dim);
}

}  // namespace opeq
