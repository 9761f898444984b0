#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "muntz/expr.hpp"
#include "muntz/measure.hpp"
#include "muntz/quadrature.hpp"

using namespace muntz;
using namespace muntz::measure;
using exprdsl::Expr;

TEST_CASE("adaptive quadrature on smooth integrands") {
  auto sq = [](double x) { return x * x; };
  CHECK(quad::integrate(sq, 0.0, 1.0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(quad::integrate(sq, 1.0, 0.0) ==
        doctest::Approx(-1.0 / 3).epsilon(1e-12));
  CHECK(quad::integrate(sq, 0.5, 0.5) == 0.0);

  auto osc = [](double x) { return std::sin(20.0 * x); };
  CHECK(quad::integrate(osc, 0.0, 1.0) ==
        doctest::Approx((1.0 - std::cos(20.0)) / 20.0).epsilon(1e-10));
}

TEST_CASE("quadrature grades into integrable endpoint singularities") {
  auto left = [](double x) { return 1.0 / std::sqrt(x); };
  CHECK(quad::integrate(left, 0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-6));

  auto right = [](double x) { return 1.0 / std::sqrt(1.0 - x); };
  CHECK(quad::integrate(right, 0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("breakpoints split kinks exactly") {
  auto f = [](double x) { return std::fabs(x - 1.0 / 3); };
  double v = quad::integrate(f, 0.0, 1.0, {1.0 / 3});
  CHECK(v == doctest::Approx(5.0 / 18).epsilon(1e-12));
}

TEST_CASE("quadrature tolerance env override") {
  CHECK(quad::default_tolerance() == 1e-10);
  setenv("MUNTZ_QUAD_TOL", "1e-5", 1);
  CHECK(quad::default_tolerance() == 1e-5);
  unsetenv("MUNTZ_QUAD_TOL");
  CHECK(quad::default_tolerance() == 1e-10);
}

TEST_CASE("literal measure moments") {
  CHECK(Measure::lebesgue().moment(2.0) ==
        doctest::Approx(1.0 / 3).epsilon(1e-10));
  CHECK(Measure::from_atoms({{0.5, 1.0}}).moment(2.0) == 0.25);
  CHECK(Measure::from_density("x").moment(1.0) ==
        doctest::Approx(1.0 / 3).epsilon(1e-10));
  CHECK(Measure::lebesgue().moment(0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(Measure::lebesgue().moment(-1.0), std::invalid_argument);
}

TEST_CASE("measure construction validates") {
  CHECK_THROWS_AS(Measure::from_density("x - 1"), std::invalid_argument);
  CHECK_THROWS_AS(Measure::from_atoms({{1.5, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Measure::from_atoms({{0.5, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Measure::from_atoms({{0.5, 1.0}, {0.5, 2.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Measure::literal(std::nullopt, {}), std::invalid_argument);
  CHECK_THROWS_AS(Measure::scaled(Measure::lebesgue(), 0.0),
                  std::invalid_argument);
}

TEST_CASE("tail masses") {
  CHECK(Measure::lebesgue().tail_mass(0.1) == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(Measure::from_density("1 - x").tail_mass(0.2) ==
        doctest::Approx(0.02).epsilon(1e-9));
  auto mu = Measure::pullback(Expr::parse("x^2"));
  CHECK(mu.tail_mass(0.19) == doctest::Approx(0.1).epsilon(1e-9));

  // nondecreasing in eps, and eps = 1 gives the total mass
  auto nu = Measure::literal(Expr::parse("1 - x"), {{0.25, 0.5}});
  double prev = 0.0;
  for (double e : {0.05, 0.1, 0.2, 0.4, 0.8, 1.0}) {
    double t = nu.tail_mass(e);
    CHECK(t >= prev - 1e-12);
    prev = t;
  }
  CHECK(nu.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(nu.tail_mass(0.0), std::invalid_argument);
}

TEST_CASE("pullback of the identity is Lebesgue") {
  auto mu = Measure::pullback(Expr::parse("x"));
  REQUIRE(mu.partition().pieces.size() == 1);
  CHECK(mu.partition().pieces[0].kind == PieceKind::Increasing);
  CHECK(mu.atoms().empty());
  for (double y : {0.1, 0.3, 0.5, 0.7, 0.9})
    CHECK(mu.density(y) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mu.moment(2.0) == doctest::Approx(1.0 / 3).epsilon(1e-8));
}

TEST_CASE("pullback under the squaring map") {
  auto mu = Measure::pullback(Expr::parse("x^2"));
  REQUIRE(mu.partition().pieces.size() == 1);
  CHECK(mu.density(0.25) == doctest::Approx(1.0).epsilon(1e-7));
  // change of variables: density is y^(-1/2)/2, moments 1/(2s+1)
  for (double s : {0.0, 1.0, 2.0, 3.5})
    CHECK(mu.moment(s) == doctest::Approx(1.0 / (2 * s + 1)).epsilon(1e-7));
}

TEST_CASE("pullback of a power map matches the closed-form density") {
  auto mu = Measure::pullback(Expr::parse("x^3"));
  for (double y : {0.2, 0.5, 0.8}) {
    double want = std::pow(y, 1.0 / 3 - 1.0) / 3.0;
    CHECK(mu.density(y) == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("pullback with a constant piece produces an atom") {
  auto mu = Measure::pullback(Expr::parse("min(2*x, 1)"));
  REQUIRE(mu.partition().pieces.size() == 2);
  CHECK(mu.partition().pieces[0].kind == PieceKind::Increasing);
  CHECK(mu.partition().pieces[1].kind == PieceKind::Constant);
  CHECK(mu.partition().pieces[0].b == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(mu.atoms().size() == 1);
  CHECK(mu.atoms()[0].pos == doctest::Approx(1.0));
  CHECK(mu.atoms()[0].mass == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(mu.mass_at_one() == doctest::Approx(0.5).epsilon(1e-9));
  for (double y : {0.2, 0.5, 0.8})
    CHECK(mu.density(y) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(mu.moment(2.0) == doctest::Approx(2.0 / 3).epsilon(1e-8));
}

TEST_CASE("pullback of the tent map is Lebesgue") {
  auto mu = Measure::pullback(Expr::parse("1 - abs(2*x - 1)"));
  REQUIRE(mu.partition().pieces.size() == 2);
  CHECK(mu.partition().pieces[0].b == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mu.atoms().empty());
  for (double y : {0.1, 0.4, 0.6, 0.9})
    CHECK(mu.density(y) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mu.moment(3.0) == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(mu.tail_mass(0.3) == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("pullback of a square-root cusp") {
  auto mu = Measure::pullback(Expr::parse("1 - sqrt(abs(x - 0.5))"));
  CHECK(mu.atoms().empty());
  double y0 = 1.0 - std::sqrt(0.5);
  // both branches contribute 2(1-y): density 4(1-y) above the image floor
  for (double y : {0.5, 0.7, 0.8, 0.95}) {
    if (y < y0) continue;
    CHECK(mu.density(y) == doctest::Approx(4.0 * (1.0 - y)).epsilon(1e-6));
  }
  CHECK(mu.tail_mass(0.1) == doctest::Approx(0.02).epsilon(1e-7));  // 2*eps^2
  CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("pullback of a smooth interior maximum") {
  auto mu = Measure::pullback(Expr::parse("1 - (x - 0.5)^2"));
  REQUIRE(mu.partition().pieces.size() == 2);
  // density 1/sqrt(1-y) on (3/4, 1), singular but integrable at 1
  CHECK(mu.density(0.9375) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(mu.density(0.5) == 0.0);
  CHECK(mu.tail_mass(0.01) == doctest::Approx(0.2).epsilon(1e-9));  // 2*sqrt(eps)
  CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mu.moment(1.0) ==
        doctest::Approx(quad::integrate(
            [](double x) { return 1.0 - (x - 0.5) * (x - 0.5); }, 0.0, 1.0))
            .epsilon(1e-6));
}

TEST_CASE("pullback rejects out-of-range symbols") {
  CHECK_THROWS_AS(Measure::pullback(Expr::parse("2*x")), std::domain_error);
  CHECK_THROWS_AS(Measure::pullback(Expr::parse("x^2 - x")), std::domain_error);
}

TEST_CASE("scaling acts linearly") {
  auto mu = Measure::scaled(Measure::lebesgue(), 4.0);
  CHECK(mu.moment(2.0) == doctest::Approx(4.0 / 3).epsilon(1e-9));
  CHECK(mu.tail_mass(0.5) == doctest::Approx(2.0).epsilon(1e-9));
  auto at = Measure::scaled(Measure::from_atoms({{1.0, 0.3}}), 2.0);
  CHECK(at.mass_at_one() == doctest::Approx(0.6));
  CHECK(at.atoms()[0].mass == doctest::Approx(0.6));
}

TEST_CASE("sublinearity profiles") {
  SUBCASE("Lebesgue: ratios pinned at one") {
    auto tp = sublinearity_profile(Measure::lebesgue());
    for (double r : tp.ratio) CHECK(r == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(tp.sublinear);
    CHECK(!tp.vanishing);
    CHECK(tp.alpha == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(!tp.alpha_sublinear);
  }
  SUBCASE("linearly vanishing density") {
    auto tp = sublinearity_profile(Measure::from_density("1 - x"));
    CHECK(tp.sublinear);
    CHECK(tp.vanishing);
    CHECK(tp.alpha > 1.9);
    CHECK(tp.alpha < 2.1);
    CHECK(tp.alpha_sublinear);
  }
  SUBCASE("atom at the right endpoint") {
    auto tp = sublinearity_profile(Measure::from_atoms({{1.0, 1.0}}));
    CHECK(!tp.sublinear);
    CHECK(!tp.vanishing);
    CHECK(tp.ratio.back() > 1e4);
  }
  SUBCASE("compactly supported: every tail empty") {
    auto tp = sublinearity_profile(
        Measure::from_density("piecewise((x <= 0.5, 1), 0)"));
    CHECK(tp.sublinear);
    CHECK(tp.vanishing);
    CHECK(tp.alpha_sublinear);
    CHECK(tp.mass.back() == 0.0);
  }
  CHECK_THROWS_AS(
      sublinearity_profile(Measure::lebesgue(), {0.5, 0.25, 0.125}),
      std::invalid_argument);
}

TEST_CASE("pushforward identity") {
  auto chk = pushforward_identity_check(Expr::parse("x^2"), Expr::parse("x"));
  CHECK(chk.lhs == doctest::Approx(1.0 / 3).epsilon(1e-9));
  CHECK(chk.rhs == doctest::Approx(1.0 / 3).epsilon(1e-7));
  CHECK(chk.gap <= 1e-6 * (1.0 + std::fabs(chk.lhs)));

  auto cap = pushforward_identity_check(Expr::parse("min(2*x, 1)"),
                                        Expr::parse("x^2"));
  CHECK(cap.lhs == doctest::Approx(2.0 / 3).epsilon(1e-9));
  CHECK(cap.gap <= 1e-6 * (1.0 + std::fabs(cap.lhs)));

  auto idn = pushforward_identity_check(Expr::parse("x"),
                                        Expr::parse("1 + x^3"));
  CHECK(idn.gap <= 1e-8);

  CHECK_THROWS_AS(
      pushforward_identity_check(Expr::parse("x"), Expr::parse("x - 1")),
      std::invalid_argument);
}

TEST_CASE("Monte Carlo replication of the pushforward integral") {
  auto chk = pushforward_identity_check(Expr::parse("1 - (x - 0.5)^2"),
                                        Expr::parse("x^2"), 1000000);
  CHECK(std::isfinite(chk.mc));
  CHECK(std::fabs(chk.mc - chk.lhs) < 3e-3);
}

TEST_CASE("piecewise breakpoints feed the quadrature") {
  auto e = Expr::parse("piecewise((x < 0.25, 1), (x in [0.25, 0.75], 2), 1)");
  auto cuts = expr_breakpoints(e);
  REQUIRE(cuts.size() == 2);
  CHECK(cuts[0] == 0.25);
  CHECK(cuts[1] == 0.75);
  auto mu = Measure::from_density(e);
  CHECK(mu.total_mass() == doctest::Approx(1.5).epsilon(1e-10));
}
