#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "opeq/construction.hpp"
#include "opeq/inequalities.hpp"
#include "opeq/random.hpp"

namespace opeq {

/// Randomized in-region verification suites. Each trial draws parameters
/// inside an inequality's validity region plus matrices satisfying its
/// hypotheses, evaluates the check, and counts a failure when the difference
/// dips below -pass_tol_scale * max(1, |difference|_2). Trials are sub-seeded
/// from one master seed, so results are reproducible.

enum class SuiteKind { LoewnerHeinz, Furuta, GrandFuruta, ProofStep };

inline const char* to_string(SuiteKind k) {
  switch (k) {
    case SuiteKind::LoewnerHeinz: return "loewner-heinz";
    case SuiteKind::Furuta: return "furuta";
    case SuiteKind::GrandFuruta: return "grand-furuta";
    case SuiteKind::ProofStep: return "proof-step";
  }
  return "unknown";
}

template <typename Scalar>
struct SuiteResult {
  long trials = 0;
  long failures = 0;
  /// Smallest min_eigenvalue / max(1, |diff|_2) seen across trials.
  Scalar worst_margin = std::numeric_limits<Scalar>::infinity();
  long worst_trial = -1;

  void record(Scalar margin, long trial, Scalar pass_tol_scale) {
    ++trials;
    if (margin < worst_margin) {
      worst_margin = margin;
      worst_trial = trial;
    }
    if (margin < -pass_tol_scale) ++failures;
  }
};

namespace detail {

/// min_eigenvalue measured against the size of the compared operands, not of
/// their difference: round-off in LHS - RHS is relative to |LHS|, |RHS|, so a
/// nearly-tight inequality on large matrices must not read as a violation.
template <typename Scalar>
Scalar operand_margin(const PsdReport<Scalar>& report, Scalar operand_scale) {
  return report.min_eigenvalue / std::max(Scalar(1), operand_scale);
}

inline const double kTGrid[] = {0.0, 0.25, 0.5, 0.75, 1.0};

}  // namespace detail

template <typename Scalar>
SuiteResult<Scalar> run_inequality_suite(SuiteKind kind, long trials,
                                         std::uint64_t seed, Eigen::Index dim_lo,
                                         Eigen::Index dim_hi,
                                         Scalar pass_tol_scale = Scalar(1e-8)) {
  if (trials < 1) raise(ErrorCode::BadArgument, "suite: trials must be >= 1");
  if (dim_lo < 1 || dim_hi < dim_lo)
    raise(ErrorCode::BadArgument, "suite: need 1 <= dim_lo <= dim_hi");
  SuiteResult<Scalar> result;
  for (long trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    const Eigen::Index dim = dim_lo + trial % (dim_hi - dim_lo + 1);
    switch (kind) {
      case SuiteKind::LoewnerHeinz: {
        const Scalar alpha = Scalar(rng.uniform(0.0, 1.0));
        const auto pair = gen_loewner_pair<Scalar>(rng, dim);
        const auto report =
            check_loewner_heinz(pair.a, pair.b, alpha, pass_tol_scale);
        const Scalar scale =
            std::pow(spectral_decompose(pair.a).spectral_norm(), alpha);
        result.record(detail::operand_margin(report, scale), trial,
                      pass_tol_scale);
        break;
      }
      case SuiteKind::Furuta: {
        FurutaParams<Scalar> fp;
        fp.p = Scalar(rng.uniform(0.0, 3.0));
        fp.r = Scalar(rng.uniform(0.0, 3.0));
        const Scalar q_min =
            std::max(Scalar(1), (fp.p + fp.r) / (Scalar(1) + fp.r));
        fp.q = q_min + Scalar(rng.uniform(0.0, 2.0));
        const auto pair = gen_loewner_pair<Scalar>(rng, dim);
        // both sides are homogeneous of degree (p+r)/q and bounded by |A|^that
        const Scalar scale = std::pow(spectral_decompose(pair.a).spectral_norm(),
                                      (fp.p + fp.r) / fp.q);
        Scalar margin = std::numeric_limits<Scalar>::infinity();
        for (const FurutaSide side : {FurutaSide::BSide, FurutaSide::ASide}) {
          const auto report = check_furuta(pair.a, pair.b, fp, side, pass_tol_scale);
          margin = std::min(margin, detail::operand_margin(report, scale));
        }
        result.record(margin, trial, pass_tol_scale);
        break;
      }
      case SuiteKind::GrandFuruta: {
        GrandFurutaParams<Scalar> gp;
        gp.t = Scalar(rng.uniform(0.0, 1.0));
        gp.p = Scalar(rng.uniform(1.0, 3.0));
        gp.s = Scalar(rng.uniform(1.0, 3.0));
        gp.r = gp.t + Scalar(rng.uniform(0.0, 2.0));
        const auto pair = gen_loewner_pair<Scalar>(rng, dim);
        const auto report = check_grand_furuta(pair.a, pair.b, gp, pass_tol_scale);
        const Scalar scale = std::pow(spectral_decompose(pair.a).spectral_norm(),
                                      Scalar(1) - gp.t + gp.r);
        result.record(detail::operand_margin(report, scale), trial,
                      pass_tol_scale);
        break;
      }
      case SuiteKind::ProofStep: {
        // Narrow spectra keep cond(...)^{mk} from swamping double precision;
        // the composite inequality amplifies conditioning multiplicatively.
        ConstructionParams<Scalar> params;
        params.m = rng.uniform_int(1, 3);
        params.n = rng.uniform_int(2, 4);
        params.k = rng.uniform_int(1, 3);
        params.t = Scalar(detail::kTGrid[rng.uniform_int(0, 4)]);
        params.r = Scalar(0);
        const auto rc = check_r_condition(params);
        params.r = rc.required_r + Scalar(rng.uniform(0.0, 1.0));
        const SymMatrix<Scalar> a =
            random_pd<Scalar>(rng, dim, Scalar(0.8), Scalar(1.25));
        const SymMatrix<Scalar> b = random_psd<Scalar>(rng, dim, Scalar(0.5));
        const Scalar x = Scalar(rng.uniform(0.0, 5.0));
        const auto report = verify_proof_step(a, b, x, params, pass_tol_scale);
        // upper bound on the left operand's norm:
        //   |A|^{r/n} * lambda_min(A)^{-tk/n} * |A + xB|^{mk/n}
        const auto es_a = spectral_decompose(a);
        const Scalar shifted_norm =
            es_a.spectral_norm() + x * spectral_decompose(b).spectral_norm();
        const Scalar inv_n = Scalar(1) / Scalar(params.n);
        const Scalar scale =
            std::pow(es_a.spectral_norm(), params.r * inv_n) *
            std::pow(es_a.min_eigenvalue(),
                     -params.t * Scalar(params.k) * inv_n) *
            std::pow(shifted_norm, Scalar(params.m) * Scalar(params.k) * inv_n);
        result.record(detail::operand_margin(report, scale), trial,
                      pass_tol_scale);
        break;
      }
    }
  }
  return result;
}

template <typename Scalar>
struct LemmaSuiteResult {
  long trials = 0;
  long failures = 0;
  Scalar worst_rel_error = Scalar(0);
  long worst_trial = -1;
};

/// Central finite difference of x -> (A + xB)^m at 0, by plain matrix products.
template <typename Scalar>
DenseMatrix<Scalar> central_difference_derivative(const SymMatrix<Scalar>& a,
                                                  const SymMatrix<Scalar>& b, int m,
                                                  Scalar h) {
  const DenseMatrix<Scalar> plus =
      detail::integer_power(DenseMatrix<Scalar>(a.mat() + h * b.mat()), m);
  const DenseMatrix<Scalar> minus =
      detail::integer_power(DenseMatrix<Scalar>(a.mat() - h * b.mat()), m);
  return (plus - minus) / (Scalar(2) * h);
}

/// Checks lemma_derivative against central finite differences on random
/// (A, B) pairs. fixed_m = 0 cycles m through 1..8.
template <typename Scalar>
LemmaSuiteResult<Scalar> run_lemma_suite(long trials, std::uint64_t seed,
                                         Eigen::Index dim_lo, Eigen::Index dim_hi,
                                         int fixed_m = 0, Scalar h = Scalar(1e-5),
                                         Scalar max_rel_error = Scalar(1e-6)) {
  if (trials < 1) raise(ErrorCode::BadArgument, "lemma suite: trials must be >= 1");
  if (fixed_m < 0 || fixed_m > 64)
    raise(ErrorCode::BadArgument, "lemma suite: m out of range");
  LemmaSuiteResult<Scalar> result;
  for (long trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    const Eigen::Index dim = dim_lo + trial % (dim_hi - dim_lo + 1);
    const int m = fixed_m > 0 ? fixed_m : 1 + static_cast<int>(trial % 8);
    const SymMatrix<Scalar> a = random_pd<Scalar>(rng, dim, Scalar(0.2), Scalar(4));
    const SymMatrix<Scalar> b = random_psd<Scalar>(rng, dim, Scalar(3));
    const DenseMatrix<Scalar> fd = central_difference_derivative(a, b, m, h);
    const DenseMatrix<Scalar> exact = lemma_derivative(a, b, m).mat();
    const Scalar rel =
        (fd - exact).norm() / std::max(Scalar(1), exact.norm());
    ++result.trials;
    if (rel > result.worst_rel_error) {
      result.worst_rel_error = rel;
      result.worst_trial = trial;
    }
    if (rel > max_rel_error) ++result.failures;
  }
  return result;
}

template <typename Scalar>
struct ConstructionSuiteResult {
  long trials = 0;
  long failures = 0;
  Scalar worst_margin = std::numeric_limits<Scalar>::infinity();
  long worst_trial = -1;
};

/// Randomized check of the PSD-solution guarantee: valid parameters
/// (m,n,k <= 4, t on the quarter grid, r = required_r + |noise|), random
/// positive definite A and PSD B, solve and certify X.
template <typename Scalar>
ConstructionSuiteResult<Scalar> run_construction_suite(
    long trials, std::uint64_t seed, Eigen::Index dim_lo = 2,
    Eigen::Index dim_hi = 6, Scalar pass_tol_scale = Scalar(1e-8)) {
  if (trials < 1) raise(ErrorCode::BadArgument, "construction suite: trials >= 1");
  ConstructionSuiteResult<Scalar> result;
  for (long trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    const Eigen::Index dim = dim_lo + trial % (dim_hi - dim_lo + 1);
    ConstructionParams<Scalar> params;
    RCondition<Scalar> rc{RBranch::Undefined, Scalar(0), false};
    while (rc.branch == RBranch::Undefined) {
      params.m = rng.uniform_int(1, 4);
      params.n = rng.uniform_int(1, 4);
      params.k = rng.uniform_int(1, 4);
      params.t = Scalar(detail::kTGrid[rng.uniform_int(0, 4)]);
      params.r = Scalar(0);
      rc = check_r_condition(params);
    }
    params.r = rc.required_r + Scalar(std::abs(rng.uniform(0.0, 2.0)));
    const SymMatrix<Scalar> a = random_pd<Scalar>(rng, dim, Scalar(0.2), Scalar(4));
    const SymMatrix<Scalar> b = random_psd<Scalar>(rng, dim, Scalar(3));
    const auto outcome = solve_construction(a, b, params, pass_tol_scale);
    // here the checked object is X itself, so its own norm is the operand scale
    const Scalar margin = detail::operand_margin(
        outcome.x_report, outcome.x_report.tolerance_used / pass_tol_scale);
    ++result.trials;
    if (margin < result.worst_margin) {
      result.worst_margin = margin;
      result.worst_trial = trial;
    }
    if (!outcome.x_report.is_psd()) ++result.failures;
  }
  return result;
}

}  // namespace opeq
