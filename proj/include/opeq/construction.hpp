#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "opeq/equation.hpp"
#include "opeq/errors.hpp"
#include "opeq/psd.hpp"
#include "opeq/spectral.hpp"
#include "opeq/sym_matrix.hpp"
#include "opeq/tolerance.hpp"

namespace opeq {

/// Parameters (m, n, k, t, r) of the special right-hand-side construction.
/// m, n, k are positive integers, t in [0, 1], r any real.
template <typename Scalar>
struct ConstructionParams {
  int m = 1;
  int n = 1;
  int k = 1;
  Scalar t = Scalar(0);
  Scalar r = Scalar(0);
};

template <typename Scalar>
void validate(const ConstructionParams<Scalar>& p) {
  if (p.m < 1 || p.n < 1 || p.k < 1)
    raise(ErrorCode::BadArgument, "ConstructionParams: m, n, k must be >= 1");
  if (!(p.t >= Scalar(0) && p.t <= Scalar(1)))
    raise(ErrorCode::BadArgument, "ConstructionParams: t must be in [0, 1]");
  if (!std::isfinite(static_cast<double>(p.r)))
    raise(ErrorCode::BadArgument, "ConstructionParams: r must be finite");
}

/// Which branch of the r-condition applies. NGeq: (1-t)n >= (m-t)k, bound t.
/// MGeq: (m-t)k >= (1-t)n with n >= 2, bound max(((m-t)k-(1-t)n)/(n-1), t).
/// Boundary: both sides equal (the bounds coincide at t). Undefined: n = 1
/// with (m-t)k > 1-t, where no bound is available.
enum class RBranch { NGeq, MGeq, Boundary, Undefined };

inline const char* to_string(RBranch b) {
  switch (b) {
    case RBranch::NGeq: return "NGeq";
    case RBranch::MGeq: return "MGeq";
    case RBranch::Boundary: return "Boundary";
    case RBranch::Undefined: return "Undefined";
  }
  return "Unknown";
}

template <typename Scalar>
struct RCondition {
  RBranch branch;
  Scalar required_r;  // NaN on the Undefined branch
  bool valid;         // r >= required_r (false when Undefined)
};

template <typename Scalar>
RCondition<Scalar> check_r_condition(const ConstructionParams<Scalar>& p) {
  validate(p);
  const Scalar lhs = (Scalar(1) - p.t) * Scalar(p.n);
  const Scalar rhs = (Scalar(p.m) - p.t) * Scalar(p.k);
  if (lhs == rhs) return {RBranch::Boundary, p.t, p.r >= p.t};
  if (lhs > rhs) return {RBranch::NGeq, p.t, p.r >= p.t};
  if (p.n >= 2) {
    const Scalar required = std::max((rhs - lhs) / Scalar(p.n - 1), p.t);
    return {RBranch::MGeq, required, p.r >= required};
  }
  return {RBranch::Undefined, std::numeric_limits<Scalar>::quiet_NaN(), false};
}

namespace detail {

/// Shared core of both right-hand-side forms. In A's eigenbasis every A-power
/// is diagonal, so the whole expression
///   A^{rs/2} { sum_{i=1}^{k} A^{(m-t)s(k-i)}
///       [ A^{-ts/2} ( sum_{j=1}^{m} A^{s(m-j)} B A^{s(j-1)} ) A^{-ts/2} ]
///     A^{(m-t)s(i-1)} } A^{rs/2}
/// reduces to diagonal scalings of B~ = V^T B V; one eigendecomposition total.
/// s = n/((m-t)k + r) yields the substituted form, s = 1 the raw form.
template <typename Scalar>
SymMatrix<Scalar> scaled_rhs(const SpectralDecomposition<Scalar>& ea,
                             const DenseMatrix<Scalar>& b_tilde,
                             const ConstructionParams<Scalar>& p, Scalar s) {
  const Eigen::Index dim = ea.dim();
  const Scalar m_minus_t = Scalar(p.m) - p.t;
  const auto diag_power = [&](Scalar e) {
    return DenseVector<Scalar>(ea.eigenvalues.array().pow(e).matrix());
  };

  DenseMatrix<Scalar> inner = DenseMatrix<Scalar>::Zero(dim, dim);
  for (int j = 1; j <= p.m; ++j)
    inner += diag_power(s * Scalar(p.m - j)).asDiagonal() * b_tilde *
             diag_power(s * Scalar(j - 1)).asDiagonal();

  const DenseVector<Scalar> dt = diag_power(-p.t * s / Scalar(2));
  const DenseMatrix<Scalar> mid = dt.asDiagonal() * inner * dt.asDiagonal();

  DenseMatrix<Scalar> outer = DenseMatrix<Scalar>::Zero(dim, dim);
  for (int i = 1; i <= p.k; ++i)
    outer += diag_power(m_minus_t * s * Scalar(p.k - i)).asDiagonal() * mid *
             diag_power(m_minus_t * s * Scalar(i - 1)).asDiagonal();

  const DenseVector<Scalar> dr = diag_power(p.r * s / Scalar(2));
  const DenseMatrix<Scalar> scaled = dr.asDiagonal() * outer * dr.asDiagonal();
  return SymMatrix<Scalar>(ea.eigenvectors * scaled * ea.eigenvectors.transpose());
}

/// Common prologue: validates, decomposes A, enforces positive definiteness
/// (the construction takes negative powers of A), rotates B into A's basis.
template <typename Scalar>
struct RhsSetup {
  SpectralDecomposition<Scalar> ea;
  DenseMatrix<Scalar> b_tilde;
  Scalar exponent_denominator;  // (m-t)k + r
};

template <typename Scalar>
RhsSetup<Scalar> prepare_rhs(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b,
                             const ConstructionParams<Scalar>& p, Scalar tol_scale) {
  validate(p);
  require_same_dim(a, b, "build_rhs");
  const Scalar denom = (Scalar(p.m) - p.t) * Scalar(p.k) + p.r;
  if (!(denom > Scalar(0)))
    raise(ErrorCode::DegenerateExponent, "build_rhs: (m-t)k + r must be positive");
  auto ea = spectral_decompose(a);
  const Scalar tol = tol_scale * std::max(Scalar(1), ea.spectral_norm());
  if (ea.min_eigenvalue() <= tol)
    raise(ErrorCode::NegativePowerOfSingular,
          "build_rhs: A must be positive definite");
  DenseMatrix<Scalar> b_tilde = ea.eigenvectors.transpose() * b.mat() * ea.eigenvectors;
  return {std::move(ea), std::move(b_tilde), denom};
}

}  // namespace detail

/// Right-hand side in substituted form: the equation
/// sum_{j=1}^{n} A^{n-j} X A^{j-1} = build_rhs(A, B, p) has a positive
/// semidefinite solution X whenever check_r_condition(p) holds. Deliberately
/// does not require a valid r; validity is reported out of band.
template <typename Scalar>
SymMatrix<Scalar> build_rhs(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b,
                            const ConstructionParams<Scalar>& p,
                            Scalar tol_scale = Scalar(default_tolerance_scale())) {
  const auto setup = detail::prepare_rhs(a, b, p, tol_scale);
  return detail::scaled_rhs(setup.ea, setup.b_tilde, p,
                            Scalar(p.n) / setup.exponent_denominator);
}

template <typename Scalar>
struct RawRhs {
  SymMatrix<Scalar> base;  // G = A^{((m-t)k+r)/n}
  SymMatrix<Scalar> rhs;
};

/// Pre-substitution form: the pair (G, rhs) with G = A^{((m-t)k+r)/n} and rhs
/// built with unscaled exponents. Solving sum_j G^{n-j} X G^{j-1} = rhs yields
/// the same X as the substituted form taken at base G, since
/// build_rhs(G, B, p) == rhs entrywise (G^{s e} = A^e for every exponent e).
template <typename Scalar>
RawRhs<Scalar> build_rhs_raw(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b,
                             const ConstructionParams<Scalar>& p,
                             Scalar tol_scale = Scalar(default_tolerance_scale())) {
  const auto setup = detail::prepare_rhs(a, b, p, tol_scale);
  SymMatrix<Scalar> base =
      matrix_power(setup.ea, setup.exponent_denominator / Scalar(p.n), tol_scale);
  SymMatrix<Scalar> rhs = detail::scaled_rhs(setup.ea, setup.b_tilde, p, Scalar(1));
  return {std::move(base), std::move(rhs)};
}

/// Closed-form solution of the raw equation for A = diag(eigs), B = all-ones:
/// X(p,q) = a_p^{(r-t)/2} a_q^{(r-t)/2}
///          * d_k(a_p^{m-t}, a_q^{m-t}) * d_m(a_p, a_q)
///          / d_n(a_p^{w}, a_q^{w}),   w = ((m-t)k + r)/n,
/// where d_n(x, y) = sum_{j=1}^{n} x^{n-j} y^{j-1}.
template <typename Scalar>
SymMatrix<Scalar> closed_form_diagonal(const DenseVector<Scalar>& eigs,
                                       const ConstructionParams<Scalar>& p) {
  validate(p);
  if (eigs.size() < 1)
    raise(ErrorCode::BadArgument, "closed_form_diagonal: need at least one eigenvalue");
  for (Eigen::Index i = 0; i < eigs.size(); ++i)
    if (!(eigs(i) > Scalar(0)))
      raise(ErrorCode::NonPositiveEigenvalue,
            "closed_form_diagonal: eigenvalues must be positive");
  const Scalar m_minus_t = Scalar(p.m) - p.t;
  const Scalar w = (m_minus_t * Scalar(p.k) + p.r) / Scalar(p.n);
  const Scalar half_rt = (p.r - p.t) / Scalar(2);
  DenseMatrix<Scalar> x(eigs.size(), eigs.size());
  for (Eigen::Index pi = 0; pi < eigs.size(); ++pi) {
    for (Eigen::Index qi = 0; qi < eigs.size(); ++qi) {
      const Scalar ap = eigs(pi);
      const Scalar aq = eigs(qi);
      const Scalar numerator =
          std::pow(ap, half_rt) * std::pow(aq, half_rt) *
          denominator(std::pow(ap, m_minus_t), std::pow(aq, m_minus_t), p.k) *
          denominator(ap, aq, p.m);
      x(pi, qi) = numerator / denominator(std::pow(ap, w), std::pow(aq, w), p.n);
    }
  }
  return SymMatrix<Scalar>(x);
}

template <typename Scalar>
struct ConstructionResult {
  Solution<Scalar> solution;
  PsdReport<Scalar> x_report;
  RCondition<Scalar> r_condition;
};

/// End-to-end: build the substituted right-hand side, solve with base A and
/// summand count n, certify X, and report the r-condition. When the condition
/// is valid the verdict is guaranteed PSD (or PD); when invalid any verdict
/// may come back.
template <typename Scalar>
ConstructionResult<Scalar> solve_construction(
    const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b,
    const ConstructionParams<Scalar>& p,
    Scalar tol_scale = Scalar(default_tolerance_scale())) {
  if (!check_psd(b, tol_scale).is_psd())
    raise(ErrorCode::NotPsd, "solve_construction: B must be positive semidefinite");
  SymMatrix<Scalar> rhs = build_rhs(a, b, p, tol_scale);
  Solution<Scalar> solution = solve_spectral(EquationInstance<Scalar>{a, p.n, rhs});
  PsdReport<Scalar> x_report = check_psd(solution.x, tol_scale);
  return {std::move(solution), x_report, check_r_condition(p)};
}

}  // namespace opeq
