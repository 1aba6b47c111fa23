#pragma once

#include <algorithm>

#include "opeq/spectral.hpp"
#include "opeq/sym_matrix.hpp"
#include "opeq/tolerance.hpp"

namespace opeq {

enum class PsdVerdict { PositiveDefinite, PositiveSemidefinite, Indefinite };

inline const char* to_string(PsdVerdict v) {
  switch (v) {
    case PsdVerdict::PositiveDefinite: return "PositiveDefinite";
    case PsdVerdict::PositiveSemidefinite: return "PositiveSemidefinite";
    case PsdVerdict::Indefinite: return "Indefinite";
  }
  return "Unknown";
}

/// Verdict of a positive-semidefiniteness test.
/// PositiveDefinite iff min_eigenvalue > tolerance_used,
/// PositiveSemidefinite iff min_eigenvalue >= -tolerance_used, else Indefinite.
template <typename Scalar>
struct PsdReport {
  PsdVerdict verdict;
  Scalar min_eigenvalue;
  Scalar tolerance_used;

  bool is_psd() const { return verdict != PsdVerdict::Indefinite; }
  bool is_positive_definite() const { return verdict == PsdVerdict::PositiveDefinite; }
};

template <typename Scalar>
PsdReport<Scalar> check_psd(const SpectralDecomposition<Scalar>& es,
                            Scalar tol_scale = Scalar(default_tolerance_scale())) {
  if (!(tol_scale > Scalar(0)))
    raise(ErrorCode::BadArgument, "check_psd: tol_scale must be > 0");
  const Scalar tol = tol_scale * std::max(Scalar(1), es.spectral_norm());
  const Scalar min_eig = es.min_eigenvalue();
  PsdVerdict verdict = PsdVerdict::Indefinite;
  if (min_eig > tol)
    verdict = PsdVerdict::PositiveDefinite;
  else if (min_eig >= -tol)
    verdict = PsdVerdict::PositiveSemidefinite;
  return {verdict, min_eig, tol};
}

template <typename Scalar>
PsdReport<Scalar> check_psd(const SymMatrix<Scalar>& m,
                            Scalar tol_scale = Scalar(default_tolerance_scale())) {
  return check_psd(spectral_decompose(m), tol_scale);
}

/// Loewner order test: A >= B iff A - B is positive semidefinite.
template <typename Scalar>
PsdReport<Scalar> loewner_ge(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b,
                             Scalar tol_scale = Scalar(default_tolerance_scale())) {
  require_same_dim(a, b, "loewner_ge");
  return check_psd(a - b, tol_scale);
}

}  // namespace opeq
