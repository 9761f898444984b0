#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "muntz/compop.hpp"
#include "muntz/embedding.hpp"
#include "muntz/expr.hpp"
#include "muntz/measure.hpp"

using namespace muntz;
using namespace muntz::compop;
using doctest::Approx;
using exponents::ExponentSequence;
using exprdsl::Expr;
using measure::Measure;

namespace {
ExponentSequence powers_of_two(int n) {
  return ExponentSequence::geometric(2.0, n);
}
const double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_CASE("composition Gram assembly") {
  auto seq = ExponentSequence::from_values({1.0, 2.0, 4.0});

  // composing with the identity reproduces the monomial Gram matrix
  auto G = compop_gram(Expr::parse("x"), seq, 3);
  auto B = embedding::lebesgue_gram(seq, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(G(i, j) == Approx(B(i, j)).epsilon(1e-12));

  // phi = x^2 at lambda_i = lambda_j = 1: integral of x^4
  auto one = ExponentSequence::from_values({1.0});
  CHECK(compop_gram(Expr::parse("x^2"), one, 1)(0, 0) ==
        Approx(0.2).epsilon(1e-12));

  // weight psi = x shifts every exponent sum by 2
  auto W = compop_gram(Expr::parse("x"), seq, 3, Expr::parse("x"));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(W(i, j) == Approx(1.0 / (seq[i] + seq[j] + 3.0)).epsilon(1e-12));

  CHECK_THROWS_AS(compop_gram(Expr::parse("2*x"), seq, 3), std::domain_error);
  CHECK_THROWS_AS(compop_gram(Expr::parse("x"), seq, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(compop_gram(Expr::parse("x"), seq, 0),
                  std::invalid_argument);
}

TEST_CASE("identity symbol: both routes give unit spectra") {
  auto seq = powers_of_two(8);
  for (Route route : {Route::Direct, Route::Pullback}) {
    auto spec = compop_svals(Expr::parse("x"), seq, 8, route);
    REQUIRE(spec.values.size() == 8);
    for (double s : spec.values) CHECK(s == Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("route agreement for the tent symbol") {
  auto seq = powers_of_two(8);
  auto tent = Expr::parse("1 - abs(2*x - 1)");
  auto direct = compop_svals(tent, seq, 8, Route::Direct);
  auto pulled = compop_svals(tent, seq, 8, Route::Pullback);
  REQUIRE(direct.values.size() == pulled.values.size());
  for (std::size_t k = 0; k < direct.values.size(); ++k)
    CHECK(std::fabs(direct.values[k] - pulled.values[k]) <= 1e-5);

  // the tent redistributes Lebesgue measure onto itself, so the spectrum is
  // the identity one
  for (double s : pulled.values) CHECK(s == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("essential maximum detection") {
  auto id = ess_max_points(Expr::parse("x"));
  CHECK(id.alpha == Approx(1.0).epsilon(1e-12));
  REQUIRE(id.points.size() == 1);
  CHECK(id.points[0] == Approx(1.0).epsilon(1e-9));
  CHECK(id.intervals.empty());

  auto tent = ess_max_points(Expr::parse("1 - abs(x - 1/2)"));
  CHECK(tent.alpha == Approx(1.0).epsilon(1e-12));
  REQUIRE(tent.points.size() == 1);
  CHECK(tent.points[0] == Approx(0.5).epsilon(1e-6));

  auto clip = ess_max_points(Expr::parse("min(2*x, 1)"));
  CHECK(clip.alpha == Approx(1.0).epsilon(1e-12));
  CHECK(clip.points.empty());
  REQUIRE(clip.intervals.size() == 1);
  CHECK(clip.intervals[0].first == Approx(0.5).epsilon(1e-6));
  CHECK(clip.intervals[0].second == Approx(1.0).epsilon(1e-12));

  auto half = ess_max_points(Expr::parse("x/2"));
  CHECK(half.alpha == Approx(0.5).epsilon(1e-12));
  REQUIRE(half.points.size() == 1);
  CHECK(half.points[0] == Approx(1.0).epsilon(1e-9));

  auto twin =
      ess_max_points(Expr::parse("max(1 - abs(4*x - 1), 1 - abs(4*x - 3))"));
  REQUIRE(twin.points.size() == 2);
  CHECK(twin.points[0] == Approx(0.25).epsilon(1e-6));
  CHECK(twin.points[1] == Approx(0.75).epsilon(1e-6));
}

TEST_CASE("one-sided difference quotients") {
  auto tent2 = Expr::parse("1 - abs(2*x - 1)");
  auto d = dini(tent2, 0.5);
  CHECK(d.has_left);
  CHECK(d.has_right);
  CHECK(d.d_minus_inf == Approx(2.0).epsilon(1e-9));
  CHECK(d.d_minus_sup == Approx(2.0).epsilon(1e-9));
  CHECK(d.d_plus_inf == Approx(-2.0).epsilon(1e-9));
  CHECK(d.d_plus_sup == Approx(-2.0).epsilon(1e-9));

  auto tent1 = dini(Expr::parse("1 - abs(x - 1/2)"), 0.5);
  CHECK(tent1.d_minus_inf == Approx(1.0).epsilon(1e-9));
  CHECK(tent1.d_plus_sup == Approx(-1.0).epsilon(1e-9));

  // square-root cusp: quotients ~ |h|^{-1/2} blow up on both sides
  auto cusp = dini(Expr::parse("1 - sqrt(abs(x - 1/2))"), 0.5);
  CHECK(cusp.d_minus_inf == kInf);
  CHECK(cusp.d_minus_sup == kInf);
  CHECK(cusp.d_plus_inf == -kInf);
  CHECK(cusp.d_plus_sup == -kInf);

  // smooth interior maximum: quotients vanish linearly
  auto flat = dini(Expr::parse("1 - (x - 1/2)^2"), 0.5);
  CHECK(std::fabs(flat.d_minus_sup) <= 1e-4);
  CHECK(std::fabs(flat.d_plus_inf) <= 1e-4);
  CHECK(flat.d_minus_sup >= 0.0);
  CHECK(flat.d_plus_inf <= 0.0);

  // endpoints expose a single side
  auto at1 = dini(Expr::parse("x"), 1.0);
  CHECK(at1.has_left);
  CHECK_FALSE(at1.has_right);
  CHECK(at1.d_minus_inf == Approx(1.0).epsilon(1e-9));
  auto at0 = dini(Expr::parse("x"), 0.0);
  CHECK_FALSE(at0.has_left);
  CHECK(at0.has_right);
  CHECK(at0.d_plus_inf == Approx(1.0).epsilon(1e-9));

  CHECK_THROWS(dini(Expr::parse("x"), -0.5));
  CHECK_THROWS(dini(Expr::parse("x"), 1.5));
}

TEST_CASE("Holder contact fits at the maximum") {
  // |x - 1/2| = |phi - 1| exactly: slope 1, intercept ~1 with safety factor
  auto flat1 = holder_contact(Expr::parse("1 - abs(x - 1/2)"), 0.5, 0.01);
  CHECK(flat1.s == Approx(1.0).epsilon(1e-6));
  CHECK(flat1.c == Approx(1.05).epsilon(1e-6));
  CHECK(flat1.holds);
  CHECK(flat1.residual < 1e-6);

  auto steep = holder_contact(Expr::parse("1 - abs(2*x - 1)"), 0.5, 0.01);
  CHECK(steep.s == Approx(1.0).epsilon(1e-6));
  CHECK(steep.c == Approx(0.525).epsilon(1e-6));

  // |x - 1/2| = |phi - 1|^2: the Schatten-grade contact
  auto cusp = holder_contact(Expr::parse("1 - sqrt(abs(x - 1/2))"), 0.5, 0.01);
  CHECK(cusp.s == Approx(2.0).epsilon(1e-6));
  CHECK(cusp.holds);

  // smooth maximum fits s = 1/2 < 1: the contact the Schatten rule needs
  // cannot exist there
  auto para = holder_contact(Expr::parse("1 - (x - 1/2)^2"), 0.5, 0.01);
  CHECK(para.s == Approx(0.5).epsilon(1e-3));
  CHECK(para.s < 1.0);

  CHECK_THROWS_AS(holder_contact(Expr::parse("x"), 0.5, 0.01),
                  std::invalid_argument);
  CHECK_THROWS_AS(holder_contact(Expr::parse("x"), 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("symbol classification: contraction, tent, cusp, parabola, shelf") {
  using embedding::Verdict;
  auto seq = powers_of_two(10);

  auto half = classify_compop(Expr::parse("x/2"), seq);
  CHECK(half.classification.schatten_all_q.value == Verdict::Yes);
  CHECK(half.classification.compact.value == Verdict::Yes);
  CHECK(half.classification.bounded.value == Verdict::Yes);
  CHECK(half.classification.schatten_all_q.rule.find("below 1") !=
        std::string::npos);

  auto tent = classify_compop(Expr::parse("1 - abs(2*x - 1)"), seq);
  CHECK(tent.classification.bounded.value == Verdict::Yes);
  CHECK(tent.classification.bounded.rule.find("bounded away from 0") !=
        std::string::npos);
  CHECK(tent.classification.compact.value == Verdict::No);
  CHECK(tent.classification.schatten_all_q.value == Verdict::No);
  REQUIRE(tent.points.size() == 1);
  CHECK(tent.points[0].holder_fitted);

  auto cusp = classify_compop(Expr::parse("1 - sqrt(abs(x - 1/2))"), seq);
  CHECK(cusp.classification.bounded.value == Verdict::Yes);
  CHECK(cusp.classification.compact.value == Verdict::Yes);
  CHECK(cusp.classification.schatten_all_q.value == Verdict::Yes);
  REQUIRE(cusp.points.size() == 1);
  CHECK(cusp.points[0].holder.s > 1.9);
  CHECK(cusp.points[0].holder.s < 2.1);

  auto para = classify_compop(Expr::parse("1 - (x - 1/2)^2"), seq);
  CHECK(para.classification.bounded.value == Verdict::No);
  CHECK(para.classification.bounded.rule.find("vanishing one-sided") !=
        std::string::npos);
  CHECK(para.classification.compact.value == Verdict::No);
  CHECK(para.classification.schatten_all_q.value == Verdict::No);

  auto shelf = classify_compop(Expr::parse("min(2*x, 1)"), seq);
  CHECK(shelf.classification.bounded.value == Verdict::No);
  CHECK(shelf.classification.bounded.rule.find("interval") !=
        std::string::npos);
  CHECK(shelf.classification.compact.value == Verdict::No);

  // a zero exponent blocks the lacunarity gate: direct rules are skipped,
  // the converse still lands
  auto zeros = ExponentSequence::from_values({0.0, 1.0, 2.0, 4.0});
  auto gated = classify_compop(Expr::parse("1 - abs(2*x - 1)"), zeros);
  CHECK_FALSE(gated.direct_rules_applicable);
  CHECK(gated.classification.bounded.value == Verdict::Inconclusive);
  CHECK(gated.classification.compact.value == Verdict::No);
}

TEST_CASE("classification verdicts agree with the spectra") {
  auto seq = powers_of_two(12);

  // compact symbol: tail sections fall monotonically
  auto mucusp = Measure::pullback(Expr::parse("1 - sqrt(abs(x - 1/2))"));
  auto tails =
      embedding::essential_norm_estimate(seq, mucusp, 12, {2, 3, 4, 5, 6, 7, 8});
  for (std::size_t k = 1; k < tails.size(); ++k)
    CHECK(tails[k].second < tails[k - 1].second);
  CHECK(tails.back().second < 0.13);

  // bounded non-compact symbol: tail sections sit at the essential norm
  auto mutent = Measure::pullback(Expr::parse("1 - abs(2*x - 1)"));
  auto flat =
      embedding::essential_norm_estimate(seq, mutent, 12, {2, 4, 6, 8});
  for (auto& [n0, e] : flat) {
    CHECK(e > 0.9);
    CHECK(e < 1.1);
  }

  // unbounded symbol: s_1(n) grows with the section
  auto para = classify_compop(Expr::parse("1 - (x - 1/2)^2"), powers_of_two(10));
  const auto& s1 = para.classification.norm_trend.s1;
  REQUIRE(s1.size() >= 4);
  for (std::size_t k = 1; k < s1.size(); ++k)
    CHECK(s1[k].second > s1[k - 1].second);
  CHECK(para.classification.norm_trend.verdict ==
        embedding::NormTrend::Verdict::Divergence);
}

TEST_CASE("essential norm formula") {
  auto tent = essential_norm_formula(Expr::parse("1 - abs(2*x - 1)"));
  REQUIRE(tent.terms.size() == 1);
  CHECK(tent.terms[0].left_slope == Approx(2.0).epsilon(1e-9));
  CHECK(tent.terms[0].right_slope == Approx(-2.0).epsilon(1e-9));
  CHECK(tent.sum == Approx(1.0).epsilon(1e-9));
  CHECK(tent.root_of_sum == Approx(1.0).epsilon(1e-9));

  auto id = essential_norm_formula(Expr::parse("x"));
  REQUIRE(id.terms.size() == 1);
  CHECK(id.sum == Approx(1.0).epsilon(1e-6));

  auto sq = essential_norm_formula(Expr::parse("x^2"));
  CHECK(sq.sum == Approx(0.5).epsilon(1e-4));
  CHECK(sq.root_of_sum == Approx(std::sqrt(0.5)).epsilon(1e-4));

  // two peaks with slopes +-4 contribute 1/4 + 1/4 each
  auto twin = essential_norm_formula(
      Expr::parse("max(1 - abs(4*x - 1), 1 - abs(4*x - 3))"));
  REQUIRE(twin.terms.size() == 2);
  CHECK(twin.terms[0].L == Approx(0.5).epsilon(1e-6));
  CHECK(twin.terms[1].L == Approx(0.5).epsilon(1e-6));
  CHECK(twin.sum == Approx(1.0).epsilon(1e-6));

  // infinite slopes contribute nothing: the cusp operator has essential
  // norm 0 through the formula as well
  auto cusp = essential_norm_formula(Expr::parse("1 - sqrt(abs(x - 1/2))"));
  CHECK(cusp.sum == 0.0);

  CHECK_THROWS_AS(essential_norm_formula(Expr::parse("1 - (x - 1/2)^2")),
                  std::invalid_argument);
  CHECK_THROWS_AS(essential_norm_formula(Expr::parse("x/2")),
                  std::invalid_argument);
  CHECK_THROWS_AS(essential_norm_formula(Expr::parse("min(2*x, 1)")),
                  std::invalid_argument);
}

TEST_CASE("tail-mass bounds around the maximum") {
  // flat approach from the left at x0 = 1/2: quotients stay below
  // eta = 0.01 on a window of width eps = 0.01, so the pullback tail mass
  // dominates delta / eta below delta = eta * eps
  auto mupar = Measure::pullback(Expr::parse("1 - (x - 1/2)^2"));
  const double eta = 0.01;
  for (double delta : {1e-5, 3e-5, 9e-5}) {
    const double tm = mupar.tail_mass(delta);
    CHECK(tm >= delta / eta);
    CHECK(tm == Approx(2.0 * std::sqrt(delta)).epsilon(1e-6));
  }

  // contact upper bound: mu(J_delta) <= 2 k c delta^s with the fitted pair
  auto cusp = Expr::parse("1 - sqrt(abs(x - 1/2))");
  auto hc = holder_contact(cusp, 0.5, 0.01);
  auto mucusp = Measure::pullback(cusp);
  for (double delta : {1e-4, 1e-3, 1e-2}) {
    CHECK(mucusp.tail_mass(delta) <=
          2.0 * hc.c * std::pow(delta, hc.s) * (1.0 + 1e-9));
  }
  auto tent = Expr::parse("1 - abs(2*x - 1)");
  auto ht = holder_contact(tent, 0.5, 0.01);
  auto mutent = Measure::pullback(tent);
  for (double delta : {1e-4, 1e-3, 1e-2}) {
    CHECK(mutent.tail_mass(delta) <=
          2.0 * ht.c * std::pow(delta, ht.s) * (1.0 + 1e-9));
  }
}
