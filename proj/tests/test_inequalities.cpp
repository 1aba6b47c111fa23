#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "opeq/inequalities.hpp"
#include "opeq/random.hpp"
#include "opeq/suites.hpp"
#include "oracles.hpp"

using opeq::check_furuta;
using opeq::check_grand_furuta;
using opeq::check_loewner_heinz;
using opeq::check_psd;
using opeq::ConstructionParams;
using opeq::Error;
using opeq::ErrorCode;
using opeq::FurutaParams;
using opeq::FurutaSide;
using opeq::gen_loewner_pair;
using opeq::GrandFurutaParams;
using opeq::lemma_derivative;
using opeq::loewner_ge;
using opeq::Rng;
using opeq::SymMatrix;
using opeq::verify_proof_step;

TEST_CASE("check_loewner_heinz: endpoint exponents") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pair = gen_loewner_pair(seed, 4);
    // alpha = 1 restates the hypothesis
    const auto at_one = check_loewner_heinz(pair.a, pair.b, 1.0);
    const auto direct = loewner_ge(pair.a, pair.b);
    CHECK(at_one.verdict == direct.verdict);
    // alpha = 0: both sides are the identity
    const auto at_zero = check_loewner_heinz(pair.a, pair.b, 0.0);
    CHECK(at_zero.is_psd());
    CHECK(std::abs(at_zero.min_eigenvalue) <= at_zero.tolerance_used);
  }
}

TEST_CASE("check_loewner_heinz: in-region seeds all pass") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto pair = gen_loewner_pair(seed, 2 + seed % 5);
    for (const double alpha : {0.25, 0.5, 0.75})
      CHECK(check_loewner_heinz(pair.a, pair.b, alpha, 1e-8).is_psd());
  }
}

TEST_CASE("check_furuta: equality and reduction cases") {
  Rng rng(20);
  const auto a = opeq::random_pd<double>(rng, 4, 0.5, 3.0);
  const FurutaParams<double> fp{2.0, 1.5, 1.0};
  for (const auto side : {FurutaSide::BSide, FurutaSide::ASide}) {
    const auto rep = check_furuta(a, a, fp, side);
    CHECK(rep.is_psd());
    CHECK(std::abs(rep.min_eigenvalue) <= rep.tolerance_used);
  }

  // r = 0, q = 1, p = 1 restates A >= B on either side
  const auto pair = gen_loewner_pair(77, 3);
  const FurutaParams<double> trivial{1.0, 1.0, 0.0};
  const auto b_side = check_furuta(pair.a, pair.b, trivial, FurutaSide::BSide);
  const auto a_side = check_furuta(pair.a, pair.b, trivial, FurutaSide::ASide);
  const auto direct = loewner_ge(pair.a, pair.b);
  CHECK(b_side.verdict == direct.verdict);
  CHECK(a_side.verdict == direct.verdict);
  CHECK(b_side.min_eigenvalue == doctest::Approx(direct.min_eigenvalue));

  CHECK(trivial.in_validity_region());
  CHECK(!FurutaParams<double>{4.0, 1.0, 0.5}.in_validity_region());
  CHECK_THROWS_AS(check_furuta(pair.a, pair.b, FurutaParams<double>{1.0, 0.0, 0.0},
                               FurutaSide::BSide),
                  Error);
}

TEST_CASE("check_furuta: in-region randomized trials") {
  Rng rng(21);
  for (int rep = 0; rep < 30; ++rep) {
    const auto pair = gen_loewner_pair(rng.raw(), 2 + rep % 5);
    FurutaParams<double> fp;
    fp.p = rng.uniform(0.0, 3.0);
    fp.r = rng.uniform(0.0, 3.0);
    fp.q = std::max(1.0, (fp.p + fp.r) / (1.0 + fp.r)) + rng.uniform(0.0, 2.0);
    REQUIRE(fp.in_validity_region());
    CHECK(check_furuta(pair.a, pair.b, fp, FurutaSide::BSide, 1e-8).is_psd());
    CHECK(check_furuta(pair.a, pair.b, fp, FurutaSide::ASide, 1e-8).is_psd());
  }
}

TEST_CASE("check_grand_furuta: identity case and degenerate exponent") {
  const auto id = SymMatrix<double>::identity(3);
  const auto rep = check_grand_furuta(id, id, GrandFurutaParams<double>{0.5, 2.0, 1.5, 1.0});
  CHECK(rep.is_psd());
  CHECK(std::abs(rep.min_eigenvalue) <= rep.tolerance_used);

  try {
    // (p - t)s + r == 0
    check_grand_furuta(id, id, GrandFurutaParams<double>{1.0, 1.0, 1.0, 0.0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateExponent);
  }
}

TEST_CASE("check_grand_furuta reduces to Furuta ASide at t=0, s=1") {
  Rng rng(22);
  for (int rep = 0; rep < 15; ++rep) {
    const auto pair = gen_loewner_pair(rng.raw(), 2 + rep % 4);
    const double p = rng.uniform(1.0, 3.0);
    const double r = rng.uniform(0.0, 2.0);
    const GrandFurutaParams<double> gp{0.0, p, 1.0, r};
    const FurutaParams<double> fp{p, (p + r) / (1.0 + r), r};

    // same difference through both code paths
    const auto es_a = opeq::spectral_decompose(pair.a);
    const auto a_half = opeq::matrix_power(es_a, r / 2.0);
    const SymMatrix<double> mid(a_half.mat() * opeq::matrix_power(pair.b, p).mat() *
                                a_half.mat());
    const Eigen::MatrixXd gf_diff =
        opeq::matrix_power(es_a, 1.0 + r).mat() -
        opeq::matrix_power(mid, (1.0 + r) / (p + r)).mat();
    const Eigen::MatrixXd furuta_diff =
        opeq::matrix_power(es_a, (fp.p + fp.r) / fp.q).mat() -
        opeq::matrix_power(mid, 1.0 / fp.q).mat();
    CHECK(oracles::rel_fro_error(gf_diff, furuta_diff) <= 1e-10);

    const auto gf = check_grand_furuta(pair.a, pair.b, gp);
    const auto fu = check_furuta(pair.a, pair.b, fp, FurutaSide::ASide);
    CHECK(gf.verdict == fu.verdict);
    CHECK(gf.min_eigenvalue == doctest::Approx(fu.min_eigenvalue).epsilon(1e-8));
  }
}

TEST_CASE("check_grand_furuta: in-region randomized trials") {
  Rng rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    const auto pair = gen_loewner_pair(rng.raw(), 2 + rep % 5);
    GrandFurutaParams<double> gp;
    gp.t = rng.uniform(0.0, 1.0);
    gp.p = rng.uniform(1.0, 3.0);
    gp.s = rng.uniform(1.0, 3.0);
    gp.r = gp.t + rng.uniform(0.0, 2.0);
    REQUIRE(gp.in_validity_region());
    CHECK(check_grand_furuta(pair.a, pair.b, gp, 1e-8).is_psd());
  }
}

TEST_CASE("lemma_derivative: m=1, m=2 closed forms") {
  Rng rng(24);
  const auto a = opeq::random_pd<double>(rng, 4, 0.3, 3.0);
  const auto b = opeq::random_psd<double>(rng, 4, 2.0);
  CHECK((lemma_derivative(a, b, 1).mat() - b.mat()).norm() <= 1e-14);
  const Eigen::MatrixXd want2 = a.mat() * b.mat() + b.mat() * a.mat();
  CHECK((lemma_derivative(a, b, 2).mat() - want2).norm() <= 1e-12 * want2.norm());
  CHECK_THROWS_AS(lemma_derivative(a, b, 0), Error);
}

TEST_CASE("lemma_derivative matches central finite differences") {
  Rng rng(25);
  for (int m = 1; m <= 8; ++m) {
    const auto a = opeq::random_pd<double>(rng, 2 + m % 5, 0.2, 4.0);
    const auto b = opeq::random_psd<double>(rng, a.dim(), 3.0);
    const Eigen::MatrixXd fd = oracles::derivative_fd(a.mat(), b.mat(), m);
    CHECK(oracles::rel_fro_error(fd, lemma_derivative(a, b, m).mat()) <= 1e-6);
  }
}

TEST_CASE("verify_proof_step: equality at x = 0") {
  Rng rng(26);
  const ConstructionParams<double> p{2, 3, 2, 0.5, 1.0};
  const auto a = opeq::random_pd<double>(rng, 4, 0.8, 1.25);
  const auto b = opeq::random_psd<double>(rng, 4, 0.5);
  const auto rep = verify_proof_step(a, b, 0.0, p);
  CHECK(rep.is_psd());
  const double scale = rep.tolerance_used / opeq::default_tolerance_scale();
  CHECK(std::abs(rep.min_eigenvalue) <= 1e-9 * scale);
}

TEST_CASE("verify_proof_step: radical 2x2 instance at several x") {
  const double a1 = 2.0 * std::pow(2.0, 1.0 / 3.0);
  const auto a = SymMatrix<double>::diagonal(Eigen::Vector2d(1.0, a1));
  const auto b = SymMatrix<double>::ones(2);
  const ConstructionParams<double> p{2, 3, 2, 0.5, 1.0};
  for (const double x : {0.1, 1.0, 10.0})
    CHECK(verify_proof_step(a, b, x, p, 1e-8).is_psd());
}

TEST_CASE("verify_proof_step: rejects invalid r-condition and negative x") {
  const auto a = SymMatrix<double>::diagonal(Eigen::Vector2d(1.0, 2.0));
  const auto b = SymMatrix<double>::ones(2);
  try {
    verify_proof_step(a, b, 1.0, ConstructionParams<double>{2, 2, 2, 0.5, 0.5});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RConditionInvalid);
  }
  CHECK_THROWS_AS(
      verify_proof_step(a, b, -1.0, ConstructionParams<double>{2, 3, 2, 0.5, 1.0}),
      Error);
}

TEST_CASE("suite runners: small deterministic smoke runs") {
  using opeq::SuiteKind;
  for (const auto kind : {SuiteKind::LoewnerHeinz, SuiteKind::Furuta,
                          SuiteKind::GrandFuruta, SuiteKind::ProofStep}) {
    const auto result = opeq::run_inequality_suite<double>(kind, 40, 7, 2, 6);
    CHECK(result.trials == 40);
    CHECK(result.failures == 0);
    CHECK(result.worst_margin >= -1e-8);
  }
  const auto again = opeq::run_inequality_suite<double>(SuiteKind::Furuta, 40, 7, 2, 6);
  const auto once = opeq::run_inequality_suite<double>(SuiteKind::Furuta, 40, 7, 2, 6);
  CHECK(again.worst_margin == once.worst_margin);

  const auto lemma = opeq::run_lemma_suite<double>(40, 7, 2, 6);
  CHECK(lemma.failures == 0);
  CHECK(lemma.worst_rel_error <= 1e-6);
  const auto lemma_fixed = opeq::run_lemma_suite<double>(20, 7, 2, 6, 5);
  CHECK(lemma_fixed.failures == 0);

  const auto construction = opeq::run_construction_suite<double>(40, 7);
  CHECK(construction.failures == 0);
  CHECK(construction.worst_margin >= -1e-8);
}
