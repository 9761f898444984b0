#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "muntz/embedding.hpp"
#include "muntz/expr.hpp"
#include "muntz/measure.hpp"
#include "pencil_oracle.hpp"

using namespace muntz;
using namespace muntz::embedding;
using exponents::ExponentSequence;
using exprdsl::Expr;
using measure::Measure;

namespace {
ExponentSequence powers_of_two(int n) {
  return ExponentSequence::geometric(2.0, n);
}
}  // namespace

TEST_CASE("monomial Gram matrices") {
  auto seq = ExponentSequence::from_values({1.0, 2.0});
  auto B = lebesgue_gram(seq, 2);
  CHECK(B(0, 0) == 1.0 / 3);
  CHECK(B(0, 1) == 1.0 / 4);
  CHECK(B(1, 0) == 1.0 / 4);
  CHECK(B(1, 1) == 1.0 / 5);

  auto zero = ExponentSequence::from_values({0.0});
  CHECK(lebesgue_gram(zero, 1)(0, 0) == 1.0);

  auto big = powers_of_two(8);
  auto Bb = lebesgue_gram(big, 8);
  for (std::size_t i = 0; i < 8; ++i)
    CHECK(Bb(i, i) == 1.0 / (2.0 * big[i] + 1.0));

  CHECK_THROWS(lebesgue_gram(seq, 3));   // beyond the prefix
  CHECK_THROWS(lebesgue_gram(seq, 0));
}

TEST_CASE("measure Gram matrices") {
  auto seq = ExponentSequence::from_values({1.0, 2.0});

  auto A = mu_gram(seq, 2, Measure::lebesgue());
  auto B = lebesgue_gram(seq, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(A(i, j) == doctest::Approx(B(i, j)).epsilon(1e-12));

  auto atom = Measure::from_atoms({{0.5, 1.0}});
  auto Aa = mu_gram(seq, 2, atom);
  CHECK(Aa(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(Aa(0, 1) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(Aa(1, 1) == doctest::Approx(0.0625).epsilon(1e-14));

  auto sq = Measure::pullback(Expr::parse("x^2"));
  auto one = ExponentSequence::from_values({1.0});
  CHECK(mu_gram(one, 1, sq)(0, 0) ==
        doctest::Approx(0.2).epsilon(1e-9));  // moment 2 of x^2 pullback
}

TEST_CASE("identity embedding has unit spectrum") {
  auto seq = powers_of_two(12);
  auto spec = embedding_svals(seq, 12, Measure::lebesgue());
  REQUIRE(spec.values.size() == 12);
  for (double s : spec.values) CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(spec.b_condition < 1e14);

  // scaling the measure scales every singular value by sqrt(c)
  auto scaled = Measure::scaled(Measure::lebesgue(), 4.0);
  auto spec4 = embedding_svals(seq, 8, scaled);
  for (double s : spec4.values) CHECK(s == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("scale equivariance for a nontrivial measure") {
  auto seq = powers_of_two(8);
  auto mu = Measure::from_density(Expr::parse("1 - x"));
  auto base = embedding_svals(seq, 6, mu);
  auto four = embedding_svals(seq, 6, Measure::scaled(mu, 4.0));
  REQUIRE(base.values.size() == four.values.size());
  for (std::size_t k = 0; k < base.values.size(); ++k)
    CHECK(four.values[k] ==
          doctest::Approx(2.0 * base.values[k]).epsilon(1e-8));
}

TEST_CASE("spectra are invariant under basis normalization") {
  auto seq = powers_of_two(8);
  auto mu = Measure::from_density(Expr::parse("1 - x"));
  auto raw = embedding_svals(seq, 4, mu, Normalization::Raw);
  auto nrm = embedding_svals(seq, 4, mu, Normalization::NormalizedMonomials);
  auto rsz = embedding_svals(seq, 4, mu, Normalization::RieszScaled);
  REQUIRE(raw.b_condition < 1e12);  // raw must still be solvable at n = 4
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(nrm.values[k] ==
          doctest::Approx(raw.values[k]).epsilon(1e-6));
    CHECK(rsz.values[k] ==
          doctest::Approx(nrm.values[k]).epsilon(1e-6));
  }

  auto zeroseq = ExponentSequence::from_values({0.0, 1.0});
  CHECK_THROWS(embedding_svals(zeroseq, 2, mu, Normalization::RieszScaled));
}

TEST_CASE("raw basis is refused when catastrophically conditioned") {
  // 1, x, x^2, ...: the raw Gram matrix is the Hilbert matrix, whose
  // condition passes 1e14 around n = 13
  std::vector<double> lam;
  for (int k = 0; k < 14; ++k) lam.push_back(k);
  auto seq = ExponentSequence::from_values(lam);
  CHECK_THROWS_WITH_AS(
      embedding_svals(seq, 14, Measure::lebesgue(), Normalization::Raw),
      doctest::Contains("normalized or Riesz"), std::runtime_error);
}

TEST_CASE("interlacing: singular values grow with the section") {
  auto seq = powers_of_two(10);
  for (const Measure& mu :
       {Measure::from_density(Expr::parse("1 - x")),
        Measure::pullback(Expr::parse("x^2"))}) {
    std::vector<std::vector<double>> spectra;
    for (std::size_t n = 1; n <= 10; ++n)
      spectra.push_back(embedding_svals(seq, n, mu).values);
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t n = k + 1; n + 1 < spectra.size(); ++n)
        CHECK(spectra[n + 1][k] >= spectra[n][k] - 1e-10);
  }
}

TEST_CASE("pencil spectra match the exact characteristic-polynomial oracle") {
  using pencil_oracle::Rational;
  auto seq = ExponentSequence::from_values({1.0, 2.0, 4.0, 8.0, 16.0});

  // exact Gram entries for the three test measures at integer exponent sums
  auto leb_entry = [](long s) { return Rational(1, s + 1); };
  auto ramp_entry = [](long s) {  // density (1 - x)
    return Rational(1, (s + 1) * (s + 2));
  };
  auto atom_entry = [](long s) {  // unit atom at 1/2
    Rational r(1);
    for (long k = 0; k < s; ++k) r /= 2;
    return r;
  };
  auto half_entry = [&](long s) {  // pullback of x/2: density 2 on [0, 1/2]
    return atom_entry(s) / (s + 1);
  };

  auto ramp = Measure::from_density(Expr::parse("1 - x"));
  auto atom = Measure::from_atoms({{0.5, 1.0}});
  auto half = Measure::pullback(Expr::parse("x/2"));
  struct Case {
    const Measure* mu;
    std::function<Rational(long)> entry;
  };
  auto leb = Measure::lebesgue();
  std::vector<Case> cases = {{&leb, leb_entry},
                             {&ramp, ramp_entry},
                             {&atom, atom_entry},
                             {&half, half_entry}};

  for (const auto& c : cases) {
    for (std::size_t n = 2; n <= 5; ++n) {
      std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n));
      std::vector<std::vector<Rational>> B(n, std::vector<Rational>(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const long s = static_cast<long>(seq[i] + seq[j]);
          A[i][j] = c.entry(s);
          B[i][j] = Rational(1, s + 1);
        }
      auto spec = embedding_svals(seq, n, *c.mu);
      std::vector<double> guesses;
      for (double s : spec.values) guesses.push_back(s * s);
      auto nu = pencil_oracle::refine_spectrum(A, B, guesses);
      for (std::size_t k = 0; k < n; ++k) {
        // Eigenvalues of the pencil agree directly.  Singular values only
        // agree above the square-root noise floor: near nu = 0 an eigenvalue
        // perturbation eps moves the singular value by eps / (2 s), so a
        // 1e-12 quadrature-level error can show up as ~1e-7 in s itself.
        CHECK(std::fabs(spec.values[k] * spec.values[k] - nu[k]) <= 1e-8);
        const double s_oracle = std::sqrt(std::max(0.0, nu[k]));
        if (s_oracle > 1e-4) {
          CHECK(std::fabs(spec.values[k] - s_oracle) <=
                1e-8 * (1.0 + s_oracle));
        } else {
          CHECK(std::fabs(spec.values[k] - s_oracle) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("operator norm trend: plateau vs divergence") {
  auto seq = powers_of_two(10);
  std::vector<std::size_t> sections{2, 3, 4, 6, 8, 10};

  auto leb = operator_norm_estimate(seq, Measure::lebesgue(), sections);
  CHECK(leb.verdict == NormTrend::Verdict::Plateau);
  CHECK(leb.last == doctest::Approx(1.0).epsilon(1e-8));

  // s1 climbs toward its limit like 1/n here, so the plateau detector needs
  // unit steps at the end of the section grid to see the increments flatten.
  auto seq12 = powers_of_two(12);
  auto ramp = operator_norm_estimate(
      seq12, Measure::from_density(Expr::parse("1 - x")),
      {2, 3, 4, 6, 8, 10, 11, 12});
  CHECK(ramp.verdict == NormTrend::Verdict::Plateau);
  CHECK(ramp.last < 1.0);

  std::vector<std::size_t> small{2, 3, 4, 5, 6, 7, 8};
  auto spike = operator_norm_estimate(seq, Measure::from_atoms({{1.0, 1.0}}),
                                      small);
  CHECK(spike.verdict == NormTrend::Verdict::Divergence);
  // the point mass at 1 sees every normalized monomial at full height
  CHECK(spike.last > 10.0);

  CHECK_THROWS(operator_norm_estimate(seq, Measure::lebesgue(), {}));
  CHECK_THROWS(operator_norm_estimate(seq, Measure::lebesgue(), {4, 2}));
}

TEST_CASE("essential norm proxy via tail sections") {
  auto seq = powers_of_two(12);

  auto leb = essential_norm_estimate(seq, Measure::lebesgue(), 12, {2, 4, 6});
  for (auto& [n0, e] : leb) CHECK(e == doctest::Approx(1.0).epsilon(1e-8));

  // absolutely continuous near 1 with density -> 1/2: tails approach
  // sqrt(1/2)
  auto sq = Measure::pullback(Expr::parse("x^2"));
  auto tails = essential_norm_estimate(seq, sq, 12, {2, 3, 4, 5, 6, 7, 8});
  for (auto& [n0, e] : tails) {
    CHECK(e > 0.65);
    CHECK(e < 0.76);
  }
  CHECK(tails.back().second == doctest::Approx(std::sqrt(0.5)).epsilon(2e-3));

  // compactly supported measure: tails die
  auto half = Measure::from_density(Expr::parse("piecewise((x <= 0.5, 1), 0)"));
  auto dead = essential_norm_estimate(seq, half, 12, {2, 4, 6, 8});
  for (std::size_t k = 1; k < dead.size(); ++k)
    CHECK(dead[k].second < dead[k - 1].second);
  CHECK(dead.back().second < 0.05);

  CHECK_THROWS(essential_norm_estimate(seq, Measure::lebesgue(), 4, {4}));
}

TEST_CASE("Schatten partial sums") {
  SingularSpectrum one;
  one.values = {1.0, 0.0, 0.0};
  one.section = 3;
  auto s2 = schatten_qnorm(one, 2.0);
  CHECK(s2.value == doctest::Approx(1.0));
  CHECK(s2.converged);

  SingularSpectrum geo;
  for (int k = 1; k <= 40; ++k) geo.values.push_back(std::ldexp(1.0, -k));
  geo.section = 40;
  auto s1 = schatten_qnorm(geo, 1.0);
  CHECK(s1.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s1.converged);

  // truncating early must report non-convergence
  SingularSpectrum stub;
  for (int k = 1; k <= 8; ++k) stub.values.push_back(std::ldexp(1.0, -k));
  stub.section = 8;
  CHECK_FALSE(schatten_qnorm(stub, 1.0).converged);

  CHECK_THROWS(schatten_qnorm(one, 0.0));
  CHECK_THROWS(schatten_qnorm(one, -1.0));
}

TEST_CASE("Schatten norms decrease in q") {
  auto seq = powers_of_two(8);
  auto spec = embedding_svals(seq, 8, Measure::pullback(Expr::parse("x/2")));
  double prev = -1.0;
  for (double q : {0.5, 1.0, 2.0, 4.0}) {
    const double v = schatten_qnorm(spec, q).value;
    if (prev >= 0.0) CHECK(v <= prev * (1.0 + 1e-12));
    prev = v;
  }
}

TEST_CASE("contractive composition symbol: fast singular value decay") {
  auto seq = powers_of_two(6);
  auto spec = embedding_svals(seq, 6, Measure::pullback(Expr::parse("x/2")));
  // The pullback of Lebesgue under x/2 has density 2 on [0, 1/2], so any
  // combination carrying more than half of its mass into [0, 1/2] pushes the
  // quotient past 1: the top singular value exceeds 1 even though the symbol
  // is a strict contraction.  (The exact-arithmetic oracle above pins the
  // n = 5 section at s1 = 1.2349231697...)
  CHECK(spec.values.front() > 1.0);
  CHECK(spec.values.front() < 1.3);
  // decay faster than geometric: successive ratios shrink
  for (std::size_t k = 2; k < spec.values.size(); ++k)
    CHECK(spec.values[k] / spec.values[k - 1] <
          spec.values[k - 1] / spec.values[k - 2] + 1e-12);
}

TEST_CASE("tail-mass ratio scan at scales 1/lambda") {
  auto seq = powers_of_two(10);

  auto leb = liminf_test(seq, Measure::lebesgue());
  REQUIRE(leb.size() == 10);
  for (auto& [lam, ratio] : leb)
    CHECK(ratio == doctest::Approx(1.0).epsilon(1e-9));

  // density 2(1-x): mu(J_delta) = delta^2, ratios 1/lambda -> 0
  auto ramp2 = Measure::from_density(Expr::parse("2*(1 - x)"));
  auto v = liminf_test(seq, ramp2);
  CHECK(v.back().second ==
        doctest::Approx(1.0 / seq.back()).epsilon(1e-6));
  CHECK(v.back().second < 0.01 * v.front().second);

  // a smooth interior maximum of the symbol: mu(J_delta) ~ 2 sqrt(delta),
  // ratios 2 sqrt(lambda) grow without bound
  auto bump = Measure::pullback(Expr::parse("1 - (x - 1/2)^2"));
  auto w = liminf_test(seq, bump);
  CHECK(w.back().second >
        5.0 * w[2].second);  // lambda 8 -> 1024 grows ~ sqrt(128)
  CHECK(w.back().second ==
        doctest::Approx(2.0 * std::sqrt(seq.back())).epsilon(1e-2));

  // exponents below 1 are skipped
  auto tiny = ExponentSequence::from_values({0.25, 2.0});
  CHECK(liminf_test(tiny, Measure::lebesgue()).size() == 1);
}

TEST_CASE("classifier: Lebesgue is bounded, never compact") {
  auto seq = powers_of_two(10);
  auto r = classify_embedding(seq, Measure::lebesgue());
  CHECK(r.bounded.value == Verdict::Yes);
  CHECK(r.bounded.rule.find("sublinear") != std::string::npos);
  CHECK(r.compact.value == Verdict::No);
  CHECK(r.compact.rule.find("floor") != std::string::npos);
  CHECK(r.schatten_all_q.value == Verdict::No);
  CHECK(r.lambda2_embedding.value == Verdict::Yes);
  CHECK(r.norm_trend.verdict == NormTrend::Verdict::Plateau);
}

TEST_CASE("classifier: compactly supported measure lands in every class") {
  auto seq = powers_of_two(10);
  auto half = Measure::from_density(Expr::parse("piecewise((x <= 0.5, 1), 0)"));
  auto r = classify_embedding(seq, half);
  CHECK(r.schatten_all_q.value == Verdict::Yes);
  CHECK(r.schatten_all_q.rule.find("support") != std::string::npos);
  CHECK(r.compact.value == Verdict::Yes);
  CHECK(r.bounded.value == Verdict::Yes);
}

TEST_CASE("classifier: point mass at 1 excludes the embedding") {
  auto seq = powers_of_two(8);
  auto r = classify_embedding(seq, Measure::from_atoms({{1.0, 1.0}}));
  CHECK(r.bounded.value == Verdict::No);
  CHECK(r.bounded.rule.find("mass") != std::string::npos);
  CHECK(r.compact.value == Verdict::No);
  CHECK(r.schatten_all_q.value == Verdict::No);
  CHECK(r.lambda2_embedding.value == Verdict::No);

  // a mixed measure with a hidden atom at 1 is just as dead
  auto mixed = Measure::literal(Expr::parse("1"), {{1.0, 0.125}});
  auto rm = classify_embedding(seq, mixed);
  CHECK(rm.bounded.value == Verdict::No);
}

TEST_CASE("classifier: vanishing sublinear density gets all three yes") {
  auto seq = powers_of_two(10);
  auto r = classify_embedding(seq, Measure::from_density(Expr::parse("1 - x")));
  CHECK(r.bounded.value == Verdict::Yes);
  CHECK(r.compact.value == Verdict::Yes);
  CHECK(r.compact.rule.find("vanishing") != std::string::npos);
  CHECK(r.schatten_all_q.value == Verdict::Yes);
  CHECK(r.schatten_all_q.rule.find("alpha") != std::string::npos);
  CHECK(r.profile.alpha > 1.9);
  CHECK(r.profile.alpha < 2.1);
}

TEST_CASE("classifier: interior-maximum pullback is excluded by ratios") {
  auto seq = powers_of_two(10);
  auto bump = Measure::pullback(Expr::parse("1 - (x - 1/2)^2"));
  auto r = classify_embedding(seq, bump);
  CHECK(r.bounded.value == Verdict::No);
  CHECK(r.bounded.rule.find("grow") != std::string::npos);
  CHECK(r.compact.value == Verdict::No);
}
