#pragma once

#include <cmath>
#include <string>

#include "opeq/construction.hpp"
#include "opeq/equation.hpp"
#include "opeq/errors.hpp"
#include "opeq/psd.hpp"
#include "opeq/spectral.hpp"
#include "opeq/sym_matrix.hpp"
#include "opeq/tolerance.hpp"

namespace opeq {

/// Exponents of the Furuta inequality. The guaranteed regime is
/// p >= 0, q >= 1, r >= 0 with (1+r)q >= p+r; checkers accept out-of-range
/// values so the counterexample search can reuse them.
template <typename Scalar>
struct FurutaParams {
  Scalar p = Scalar(1);
  Scalar q = Scalar(1);
  Scalar r = Scalar(0);

  bool in_validity_region() const {
    return p >= Scalar(0) && q >= Scalar(1) && r >= Scalar(0) &&
           (Scalar(1) + r) * q >= p + r;
  }
};

/// Exponents of the grand Furuta inequality; guaranteed regime is
/// t in [0, 1], p >= 1, s >= 1, r >= t.
template <typename Scalar>
struct GrandFurutaParams {
  Scalar t = Scalar(0);
  Scalar p = Scalar(1);
  Scalar s = Scalar(1);
  Scalar r = Scalar(0);

  bool in_validity_region() const {
    return t >= Scalar(0) && t <= Scalar(1) && p >= Scalar(1) && s >= Scalar(1) &&
           r >= t;
  }
};

enum class FurutaSide { BSide, ASide };

inline const char* to_string(FurutaSide s) {
  return s == FurutaSide::BSide ? "BSide" : "ASide";
}

/// Loewner-Heinz check: verdict of A^alpha - B^alpha. For A >= B >= 0 this is
/// PSD whenever alpha in [0, 1]; out-of-range alpha is allowed (and generically
/// violated) for the search.
template <typename Scalar>
PsdReport<Scalar> check_loewner_heinz(
    const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b, Scalar alpha,
    Scalar tol_scale = Scalar(default_tolerance_scale())) {
  require_same_dim(a, b, "check_loewner_heinz");
  return check_psd(matrix_power(a, alpha, tol_scale) - matrix_power(b, alpha, tol_scale),
                   tol_scale);
}

namespace detail {

/// (W^T W)^e through the singular values of W. The Gram matrix is never
/// formed: its small eigenvalues are only accurate to eps * |W|^2 absolute,
/// while the singular values of W carry eps * |W| and survive the halved
/// exponent. Requires e >= 0 unless W has full rank.
template <typename Scalar>
SymMatrix<Scalar> gram_power(const DenseMatrix<Scalar>& w, Scalar e) {
  Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(w, Eigen::ComputeFullV);
  DenseVector<Scalar> powered(svd.singularValues().size());
  for (Eigen::Index i = 0; i < powered.size(); ++i)
    powered(i) = std::pow(svd.singularValues()(i), Scalar(2) * e);
  return SymMatrix<Scalar>(svd.matrixV() * powered.asDiagonal() *
                           svd.matrixV().transpose());
}

}  // namespace detail

/// Furuta check for A >= B >= 0.
///   BSide: (B^{r/2} A^p B^{r/2})^{1/q} >= B^{(p+r)/q}
///   ASide: A^{(p+r)/q} >= (A^{r/2} B^p A^{r/2})^{1/q}
/// using (B^{r/2} B^p B^{r/2})^{1/q} = B^{(p+r)/q} by functional calculus.
/// Composite powers go through gram_power, so near-kernel directions of B
/// (where both sides vanish together) are resolved to relative accuracy.
template <typename Scalar>
PsdReport<Scalar> check_furuta(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b,
                               const FurutaParams<Scalar>& fp, FurutaSide side,
                               Scalar tol_scale = Scalar(default_tolerance_scale())) {
  require_same_dim(a, b, "check_furuta");
  if (!(fp.q > Scalar(0)))
    raise(ErrorCode::BadArgument, "check_furuta: q must be positive");
  const auto es_a = spectral_decompose(a);
  const auto es_b = spectral_decompose(b);
  if (side == FurutaSide::BSide) {
    // B^{r/2} A^p B^{r/2} = W^T W with W = A^{p/2} B^{r/2}
    const DenseMatrix<Scalar> w = matrix_power(es_a, fp.p / Scalar(2), tol_scale).mat() *
                                  matrix_power(es_b, fp.r / Scalar(2), tol_scale).mat();
    return check_psd(detail::gram_power(w, Scalar(1) / fp.q) -
                         matrix_power(es_b, (fp.p + fp.r) / fp.q, tol_scale),
                     tol_scale);
  }
  // A^{r/2} B^p A^{r/2} = W^T W with W = B^{p/2} A^{r/2}
  const DenseMatrix<Scalar> w = matrix_power(es_b, fp.p / Scalar(2), tol_scale).mat() *
                                matrix_power(es_a, fp.r / Scalar(2), tol_scale).mat();
  return check_psd(matrix_power(es_a, (fp.p + fp.r) / fp.q, tol_scale) -
                       detail::gram_power(w, Scalar(1) / fp.q),
                   tol_scale);
}

/// Grand Furuta check for A >= B >= 0 with A > 0:
///   A^{1-t+r} >= { A^{r/2} (A^{-t/2} B^p A^{-t/2})^s A^{r/2} }^{(1-t+r)/((p-t)s+r)}
/// Both composite powers go through gram_power; at t=0, s=1 this evaluates the
/// same expression as check_furuta's ASide with q = (p+r)/(1+r).
template <typename Scalar>
PsdReport<Scalar> check_grand_furuta(
    const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b,
    const GrandFurutaParams<Scalar>& gp,
    Scalar tol_scale = Scalar(default_tolerance_scale())) {
  require_same_dim(a, b, "check_grand_furuta");
  const Scalar exponent_denom = (gp.p - gp.t) * gp.s + gp.r;
  if (!(exponent_denom > tol_scale))
    raise(ErrorCode::DegenerateExponent,
          "check_grand_furuta: (p-t)s + r must exceed the tolerance");
  const auto es_a = spectral_decompose(a);
  // A^{-t/2} B^p A^{-t/2} = W1^T W1 with W1 = B^{p/2} A^{-t/2}; its s-th power
  // has square root V1 S1^s V1^T, taken from the same SVD.
  const DenseMatrix<Scalar> w1 = matrix_power(b, gp.p / Scalar(2), tol_scale).mat() *
                                 matrix_power(es_a, -gp.t / Scalar(2), tol_scale).mat();
  Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(w1, Eigen::ComputeFullV);
  DenseVector<Scalar> sigma_s(svd.singularValues().size());
  for (Eigen::Index i = 0; i < sigma_s.size(); ++i)
    sigma_s(i) = std::pow(svd.singularValues()(i), gp.s);
  const DenseMatrix<Scalar> inner_half =
      svd.matrixV() * sigma_s.asDiagonal() * svd.matrixV().transpose();
  // A^{r/2} (W1^T W1)^s A^{r/2} = Z^T Z with Z = (W1^T W1)^{s/2} A^{r/2}
  const DenseMatrix<Scalar> z =
      inner_half * matrix_power(es_a, gp.r / Scalar(2), tol_scale).mat();
  const Scalar outer_exponent = (Scalar(1) - gp.t + gp.r) / exponent_denom;
  return check_psd(matrix_power(es_a, Scalar(1) - gp.t + gp.r, tol_scale) -
                       detail::gram_power(z, outer_exponent),
                   tol_scale);
}

/// d/dx[(A + xB)^m] at x = 0, which equals sum_{j=1}^{m} A^{m-j} B A^{j-1} --
/// the same sum the equation's left-hand side applies to X.
template <typename Scalar>
SymMatrix<Scalar> lemma_derivative(const SymMatrix<Scalar>& a,
                                   const SymMatrix<Scalar>& b, int m) {
  require_same_dim(a, b, "lemma_derivative");
  if (m < 1) raise(ErrorCode::BadArgument, "lemma_derivative: m must be >= 1");
  return apply_lhs(a, m, b);
}

namespace detail {

template <typename Scalar>
DenseMatrix<Scalar> integer_power(const DenseMatrix<Scalar>& m, int k) {
  DenseMatrix<Scalar> acc = DenseMatrix<Scalar>::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) acc = acc * m;
  return acc;
}

}  // namespace detail

/// Proof-step inequality: for A > 0, B >= 0, x >= 0 and a valid r-condition,
///   ( A^{r/2} (A^{-t/2} (A+xB)^m A^{-t/2})^k A^{r/2} )^{1/n} >= A^{((m-t)k+r)/n}
/// with equality at x = 0. Raises RConditionInvalid outside the valid region,
/// where the inequality is not claimed.
template <typename Scalar>
PsdReport<Scalar> verify_proof_step(
    const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b, Scalar x,
    const ConstructionParams<Scalar>& p,
    Scalar tol_scale = Scalar(default_tolerance_scale())) {
  require_same_dim(a, b, "verify_proof_step");
  if (!(x >= Scalar(0)))
    raise(ErrorCode::BadArgument, "verify_proof_step: x must be >= 0");
  const RCondition<Scalar> rc = check_r_condition(p);
  if (!rc.valid)
    raise(ErrorCode::RConditionInvalid,
          "verify_proof_step: r-condition does not hold (branch " +
              std::string(to_string(rc.branch)) + ")");
  const auto es_a = spectral_decompose(a);
  const DenseMatrix<Scalar> shifted_m =
      detail::integer_power(DenseMatrix<Scalar>(a.mat() + x * b.mat()), p.m);
  const SymMatrix<Scalar> a_neg_t = matrix_power(es_a, -p.t / Scalar(2), tol_scale);
  const SymMatrix<Scalar> inner(a_neg_t.mat() * shifted_m * a_neg_t.mat());
  const DenseMatrix<Scalar> inner_k = detail::integer_power(inner.mat(), p.k);
  const SymMatrix<Scalar> a_half_r = matrix_power(es_a, p.r / Scalar(2), tol_scale);
  const SymMatrix<Scalar> wrapped(a_half_r.mat() * inner_k * a_half_r.mat());
  const SymMatrix<Scalar> lhs =
      matrix_power(wrapped, Scalar(1) / Scalar(p.n), tol_scale);
  const Scalar rhs_exponent =
      ((Scalar(p.m) - p.t) * Scalar(p.k) + p.r) / Scalar(p.n);
  const SymMatrix<Scalar> rhs = matrix_power(es_a, rhs_exponent, tol_scale);
  return check_psd(lhs - rhs, tol_scale);
}

}  // namespace opeq
