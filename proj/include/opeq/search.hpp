#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opeq/construction.hpp"
#include "opeq/inequalities.hpp"
#include "opeq/random.hpp"
#include "opeq/sym_matrix.hpp"

namespace opeq {

enum class InequalityId { LoewnerHeinz, Furuta, GrandFuruta, Theorem21 };

inline const char* to_string(InequalityId id) {
  switch (id) {
    case InequalityId::LoewnerHeinz: return "LoewnerHeinz";
    case InequalityId::Furuta: return "Furuta";
    case InequalityId::GrandFuruta: return "GrandFuruta";
    case InequalityId::Theorem21: return "Theorem21";
  }
  return "Unknown";
}

template <typename Scalar>
struct ParamRange {
  Scalar lo = Scalar(0);
  Scalar hi = Scalar(0);
};

/// What to sample and where. Parameters are drawn uniformly from the named
/// ranges; samples that land inside the validity region are rejected, so the
/// search only ever evaluates where no guarantee applies.
template <typename Scalar>
struct SearchSpec {
  InequalityId inequality_id = InequalityId::LoewnerHeinz;
  Eigen::Index dim = 2;
  std::map<std::string, ParamRange<Scalar>> ranges;
};

/// Out-of-region default boxes per inequality.
///   LoewnerHeinz: alpha fixed at 2.
///   Furuta:       p in [3,6], q in [1,1.3], r in [0,1]  ((1+r)q < p+r throughout).
///   GrandFuruta:  t in [0.5,1], p,s in [1,3], r in [0,0.45]  (r < t throughout).
///   Theorem21:    integer m in [1,4], n in [2,4], k in [1,3], t in [0,1],
///                 r = required_r - r_deficit with r_deficit in [0.05,1.5].
template <typename Scalar>
SearchSpec<Scalar> default_search_spec(InequalityId id) {
  SearchSpec<Scalar> spec;
  spec.inequality_id = id;
  switch (id) {
    case InequalityId::LoewnerHeinz:
      spec.ranges = {{"alpha", {Scalar(2), Scalar(2)}}};
      break;
    case InequalityId::Furuta:
      spec.ranges = {{"p", {Scalar(3), Scalar(6)}},
                     {"q", {Scalar(1), Scalar(1.3)}},
                     {"r", {Scalar(0), Scalar(1)}}};
      break;
    case InequalityId::GrandFuruta:
      spec.ranges = {{"t", {Scalar(0.5), Scalar(1)}},
                     {"p", {Scalar(1), Scalar(3)}},
                     {"s", {Scalar(1), Scalar(3)}},
                     {"r", {Scalar(0), Scalar(0.45)}}};
      break;
    case InequalityId::Theorem21:
      spec.ranges = {{"m", {Scalar(1), Scalar(4)}},
                     {"n", {Scalar(2), Scalar(4)}},
                     {"k", {Scalar(1), Scalar(3)}},
                     {"t", {Scalar(0), Scalar(1)}},
                     {"r_deficit", {Scalar(0.05), Scalar(1.5)}}};
      break;
  }
  return spec;
}

namespace detail {

template <typename Scalar>
const ParamRange<Scalar>& range_of(const SearchSpec<Scalar>& spec,
                                   const std::string& key) {
  const auto it = spec.ranges.find(key);
  if (it == spec.ranges.end())
    raise(ErrorCode::BadArgument, "search spec is missing the range '" + key + "'");
  if (!(it->second.lo <= it->second.hi))
    raise(ErrorCode::BadArgument, "search range '" + key + "' has lo > hi");
  return it->second;
}

template <typename Scalar>
Scalar sample(const SearchSpec<Scalar>& spec, const std::string& key, Rng& rng) {
  const auto& r = range_of(spec, key);
  return Scalar(rng.uniform(static_cast<double>(r.lo), static_cast<double>(r.hi)));
}

template <typename Scalar>
int sample_int(const SearchSpec<Scalar>& spec, const std::string& key, Rng& rng) {
  const auto& r = range_of(spec, key);
  return rng.uniform_int(static_cast<int>(std::lround(static_cast<double>(r.lo))),
                         static_cast<int>(std::lround(static_cast<double>(r.hi))));
}

}  // namespace detail

/// True when every point of the spec's box satisfies the inequality's validity
/// conditions, i.e. searching it cannot produce a legitimate witness. Used as
/// the CLI misuse guard.
template <typename Scalar>
bool region_entirely_valid(const SearchSpec<Scalar>& spec) {
  switch (spec.inequality_id) {
    case InequalityId::LoewnerHeinz: {
      const auto& alpha = detail::range_of(spec, "alpha");
      return alpha.lo >= Scalar(0) && alpha.hi <= Scalar(1);
    }
    case InequalityId::Furuta: {
      const auto& p = detail::range_of(spec, "p");
      const auto& q = detail::range_of(spec, "q");
      const auto& r = detail::range_of(spec, "r");
      // (1+r)q - (p+r) = q + r(q-1) - p is monotone in each variable on q >= 1.
      const Scalar worst_margin = q.lo + r.lo * (q.lo - Scalar(1)) - p.hi;
      return p.lo >= Scalar(0) && q.lo >= Scalar(1) && r.lo >= Scalar(0) &&
             worst_margin >= Scalar(0);
    }
    case InequalityId::GrandFuruta: {
      const auto& t = detail::range_of(spec, "t");
      const auto& p = detail::range_of(spec, "p");
      const auto& s = detail::range_of(spec, "s");
      const auto& r = detail::range_of(spec, "r");
      return t.lo >= Scalar(0) && t.hi <= Scalar(1) && p.lo >= Scalar(1) &&
             s.lo >= Scalar(1) && r.lo >= t.hi;
    }
    case InequalityId::Theorem21: {
      const auto& deficit = detail::range_of(spec, "r_deficit");
      return deficit.hi <= Scalar(0);  // r >= required_r everywhere
    }
  }
  return false;
}

/// A certified violation: parameters plus the matrices they were evaluated on.
/// min_eigenvalue < -tolerance of the corresponding check (witness tolerance
/// scale, stricter than verdict tolerance, so round-off never counts).
template <typename Scalar>
struct InequalityWitness {
  InequalityId inequality_id;
  std::vector<std::pair<std::string, Scalar>> parameters;
  SymMatrix<Scalar> a;
  SymMatrix<Scalar> b;
  Scalar min_eigenvalue;
  std::uint64_t seed;  // master seed of the search that found it
  long trial;          // index of the producing trial

  Scalar parameter(const std::string& key) const {
    for (const auto& [name, value] : parameters)
      if (name == key) return value;
    raise(ErrorCode::BadArgument, "witness has no parameter '" + key + "'");
  }
};

/// Threshold below which a negative eigenvalue counts as a genuine violation
/// rather than round-off.
inline constexpr double kWitnessToleranceScale = 1e-6;

namespace detail {

/// Raises BadArgument if any range the inequality needs is absent or inverted.
template <typename Scalar>
void validate_spec(const SearchSpec<Scalar>& spec) {
  switch (spec.inequality_id) {
    case InequalityId::LoewnerHeinz:
      range_of(spec, "alpha");
      break;
    case InequalityId::Furuta:
      range_of(spec, "p");
      range_of(spec, "q");
      range_of(spec, "r");
      break;
    case InequalityId::GrandFuruta:
      range_of(spec, "t");
      range_of(spec, "p");
      range_of(spec, "s");
      range_of(spec, "r");
      break;
    case InequalityId::Theorem21:
      range_of(spec, "m");
      range_of(spec, "n");
      range_of(spec, "k");
      range_of(spec, "t");
      range_of(spec, "r_deficit");
      break;
  }
}

template <typename Scalar>
std::optional<InequalityWitness<Scalar>> evaluate_trial(
    const SearchSpec<Scalar>& spec, Rng& rng, Scalar witness_tol) {
  constexpr int kMaxSampleAttempts = 64;
  switch (spec.inequality_id) {
    case InequalityId::LoewnerHeinz: {
      Scalar alpha{};
      bool outside = false;
      for (int i = 0; i < kMaxSampleAttempts && !outside; ++i) {
        alpha = sample(spec, "alpha", rng);
        outside = !(alpha >= Scalar(0) && alpha <= Scalar(1));
      }
      if (!outside) return std::nullopt;
      auto pair = gen_loewner_pair<Scalar>(rng, spec.dim);
      const auto report = check_loewner_heinz(pair.a, pair.b, alpha, witness_tol);
      if (report.is_psd()) return std::nullopt;
      return InequalityWitness<Scalar>{spec.inequality_id,
                                       {{"alpha", alpha}},
                                       std::move(pair.a),
                                       std::move(pair.b),
                                       report.min_eigenvalue,
                                       0,
                                       0};
    }
    case InequalityId::Furuta: {
      FurutaParams<Scalar> fp;
      bool outside = false;
      for (int i = 0; i < kMaxSampleAttempts && !outside; ++i) {
        fp.p = sample(spec, "p", rng);
        fp.q = sample(spec, "q", rng);
        fp.r = sample(spec, "r", rng);
        outside = !fp.in_validity_region() && fp.q > Scalar(0);
      }
      if (!outside) return std::nullopt;
      auto pair = gen_loewner_pair<Scalar>(rng, spec.dim);
      for (const FurutaSide side : {FurutaSide::BSide, FurutaSide::ASide}) {
        const auto report = check_furuta(pair.a, pair.b, fp, side, witness_tol);
        if (!report.is_psd()) {
          return InequalityWitness<Scalar>{
              spec.inequality_id,
              {{"p", fp.p},
               {"q", fp.q},
               {"r", fp.r},
               {"side", side == FurutaSide::BSide ? Scalar(0) : Scalar(1)}},
              std::move(pair.a),
              std::move(pair.b),
              report.min_eigenvalue,
              0,
              0};
        }
      }
      return std::nullopt;
    }
    case InequalityId::GrandFuruta: {
      GrandFurutaParams<Scalar> gp;
      bool outside = false;
      for (int i = 0; i < kMaxSampleAttempts && !outside; ++i) {
        gp.t = sample(spec, "t", rng);
        gp.p = sample(spec, "p", rng);
        gp.s = sample(spec, "s", rng);
        gp.r = sample(spec, "r", rng);
        outside = !gp.in_validity_region() &&
                  (gp.p - gp.t) * gp.s + gp.r > Scalar(0.01);
      }
      if (!outside) return std::nullopt;
      auto pair = gen_loewner_pair<Scalar>(rng, spec.dim);
      const auto report = check_grand_furuta(pair.a, pair.b, gp, witness_tol);
      if (report.is_psd()) return std::nullopt;
      return InequalityWitness<Scalar>{
          spec.inequality_id,
          {{"t", gp.t}, {"p", gp.p}, {"s", gp.s}, {"r", gp.r}},
          std::move(pair.a),
          std::move(pair.b),
          report.min_eigenvalue,
          0,
          0};
    }
    case InequalityId::Theorem21: {
      ConstructionParams<Scalar> params;
      bool usable = false;
      for (int i = 0; i < kMaxSampleAttempts && !usable; ++i) {
        params.m = sample_int(spec, "m", rng);
        params.n = sample_int(spec, "n", rng);
        params.k = sample_int(spec, "k", rng);
        params.t = sample(spec, "t", rng);
        const Scalar deficit = sample(spec, "r_deficit", rng);
        params.r = Scalar(0);
        const auto rc = check_r_condition(params);
        if (rc.branch == RBranch::Undefined) continue;
        params.r = rc.required_r - deficit;
        usable = deficit > Scalar(0) &&
                 (Scalar(params.m) - params.t) * Scalar(params.k) + params.r >
                     Scalar(0.01);
      }
      if (!usable) return std::nullopt;
      const SymMatrix<Scalar> a = random_pd<Scalar>(rng, spec.dim, Scalar(0.3), Scalar(3));
      const SymMatrix<Scalar> b = random_psd<Scalar>(rng, spec.dim, Scalar(2));
      const auto result = solve_construction(a, b, params, witness_tol);
      if (result.x_report.is_psd()) return std::nullopt;
      return InequalityWitness<Scalar>{spec.inequality_id,
                                       {{"m", Scalar(params.m)},
                                        {"n", Scalar(params.n)},
                                        {"k", Scalar(params.k)},
                                        {"t", params.t},
                                        {"r", params.r}},
                                       a,
                                       b,
                                       result.x_report.min_eigenvalue,
                                       0,
                                       0};
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Deterministic search for violations outside the validity region. Trials are
/// independently sub-seeded, so the result is a pure function of
/// (spec, trials, seed); the first (lowest-index) witness is returned.
/// Absence of a witness is an in-band outcome, not an error.
template <typename Scalar>
std::optional<InequalityWitness<Scalar>> counterexample_search(
    const SearchSpec<Scalar>& spec, long trials, std::uint64_t seed,
    Scalar witness_tol_scale = Scalar(kWitnessToleranceScale)) {
  if (trials < 1) raise(ErrorCode::BadArgument, "counterexample_search: trials >= 1");
  if (spec.dim < 1) raise(ErrorCode::BadArgument, "counterexample_search: dim >= 1");
  detail::validate_spec(spec);
  for (long trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    std::optional<InequalityWitness<Scalar>> witness;
    try {
      witness = detail::evaluate_trial(spec, rng, witness_tol_scale);
    } catch (const Error&) {
      continue;  // degenerate sample (e.g. vanishing exponent); skip the trial
    }
    if (witness) {
      witness->seed = seed;
      witness->trial = trial;
      return witness;
    }
  }
  return std::nullopt;
}

/// Re-evaluates the witness's check on its stored matrices and parameters,
/// returning the (re)computed minimum eigenvalue of the violated difference.
template <typename Scalar>
Scalar replay_witness(const InequalityWitness<Scalar>& w,
                      Scalar witness_tol_scale = Scalar(kWitnessToleranceScale)) {
  switch (w.inequality_id) {
    case InequalityId::LoewnerHeinz:
      return check_loewner_heinz(w.a, w.b, w.parameter("alpha"), witness_tol_scale)
          .min_eigenvalue;
    case InequalityId::Furuta: {
      const FurutaParams<Scalar> fp{w.parameter("p"), w.parameter("q"),
                                    w.parameter("r")};
      const FurutaSide side = w.parameter("side") == Scalar(0) ? FurutaSide::BSide
                                                               : FurutaSide::ASide;
      return check_furuta(w.a, w.b, fp, side, witness_tol_scale).min_eigenvalue;
    }
    case InequalityId::GrandFuruta: {
      const GrandFurutaParams<Scalar> gp{w.parameter("t"), w.parameter("p"),
                                         w.parameter("s"), w.parameter("r")};
      return check_grand_furuta(w.a, w.b, gp, witness_tol_scale).min_eigenvalue;
    }
    case InequalityId::Theorem21: {
      ConstructionParams<Scalar> params;
      params.m = static_cast<int>(w.parameter("m"));
      params.n = static_cast<int>(w.parameter("n"));
      params.k = static_cast<int>(w.parameter("k"));
      params.t = w.parameter("t");
      params.r = w.parameter("r");
      return solve_construction(w.a, w.b, params, witness_tol_scale)
          .x_report.min_eigenvalue;
    }
  }
  raise(ErrorCode::BadArgument, "replay_witness: unknown inequality id");
}

}  // namespace opeq
