// Composition operators f -> f(phi) from a monomial span into L^2: Gram
// assembly straight from the symbol (optionally weighted), spectra through
// either the direct or the pullback route, essential points of maximum,
// one-sided Dini derivative estimates, Holder-type contact fits at the
// maximum, the symbol-side classifier, and the essential-norm formula for
// regular symbols.  The symbol phi must map [0,1] into [0,1]; values are
// clamped to [0,1], with excursions beyond 1e-9 reported as errors.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "muntz/embedding.hpp"
#include "muntz/exponents.hpp"
#include "muntz/expr.hpp"
#include "muntz/linalg.hpp"
#include "muntz/measure.hpp"

namespace muntz::compop {

struct EssentialMaxReport {
  double alpha = 0.0;           // ess sup of phi over [0,1]
  std::vector<double> points;   // isolated maximum points, ascending
  std::vector<std::pair<double, double>> intervals;  // constant-at-max runs
  double cluster_eps = 0.0;     // neighborhood scale used to merge points
};

// One-sided difference quotients (phi(x0) - phi(t)) / (x0 - t) on the
// geometric grid |x0 - t| = 2^{-j}, j = 8..40.  Finite liminf/limsup come
// from the window j in [16, 26], below the truncation error of the coarse
// quotients and above the cancellation noise of the finest ones; a tail of
// quotients growing monotonically through 1e6 in magnitude is flagged as the
// matching signed infinity instead.
struct DiniEstimate {
  double x0 = 0.0;
  bool has_left = false;   // false at x0 = 0 (no quotients on that side)
  bool has_right = false;  // false at x0 = 1
  double d_minus_inf = 0.0, d_minus_sup = 0.0;  // liminf/limsup, t -> x0-
  double d_plus_inf = 0.0, d_plus_sup = 0.0;    // liminf/limsup, t -> x0+
};

// Fitted contact |x - x0| <= c |phi(x) - 1|^s near a point where phi reaches
// 1.  s is the least-squares slope of log|x - x0| against log|phi(x) - 1|;
// c carries a 5% safety factor on top of the fitted intercept.  `holds`
// records whether the inequality itself survives on every sample; whether
// the fitted s clears the exponent the Schatten rule needs is the
// classifier's business, not this fit's.
struct HolderContact {
  double x0 = 0.0;
  double c = 0.0;
  double s = 0.0;
  double eps = 0.0;       // sampling window |x - x0| < eps
  double residual = 0.0;  // max absolute log-log fit residual
  bool holds = false;
};

// Entries integral_0^1 psi(x)^2 phi(x)^{lambda_i + lambda_j} dx over the
// first n exponents (psi absent means the plain composition operator).
linalg::Matrix compop_gram(const exprdsl::Expr& phi,
                           const exponents::ExponentSequence& seq,
                           std::size_t n,
                           const std::optional<exprdsl::Expr>& weight = {});

// Two computations of the same spectrum: Direct integrates the symbol
// powers, Pullback pushes Lebesgue measure through phi first and runs the
// embedding pencil.  Their agreement is the working form of the fact that
// composition by phi and embedding into L^2(pullback measure) are the same
// operator up to an isometry.
enum class Route { Direct, Pullback };
embedding::SingularSpectrum compop_svals(
    const exprdsl::Expr& phi, const exponents::ExponentSequence& seq,
    std::size_t n, Route route = Route::Direct,
    embedding::Normalization norm =
        embedding::Normalization::NormalizedMonomials);

// Maximum points of the symbol from its monotone partition: the partition
// already carries every interior extremum refined to machine precision, so
// alpha is the largest piece image and the points/intervals are wherever
// that value is attained.  grid_n is the sampling density handed to the
// partition scan.
EssentialMaxReport ess_max_points(const exprdsl::Expr& phi, int grid_n = 4096);

DiniEstimate dini(const exprdsl::Expr& phi, double x0);

// Requires phi(x0) within 1e-9 of 1; samples both sides of x0 inside the
// window and fits the contact exponent.
HolderContact holder_contact(const exprdsl::Expr& phi, double x0, double eps);

// Per-maximum-point evidence gathered by the classifier.
struct PointAnalysis {
  DiniEstimate dini;
  HolderContact holder;  // meaningful only when holder_fitted
  bool holder_fitted = false;
};

struct CompositionReport {
  embedding::ClassificationReport classification;
  EssentialMaxReport max_report;
  std::vector<PointAnalysis> points;  // aligned with max_report.points
  bool direct_rules_applicable = false;  // exponent prefix lacunary?
};

// Symbol-side rules, first decision per verdict wins, implications
// propagated both ways:
//   (0)  alpha < 1: the pullback has compact support, Schatten for all q.
//   (0') maximum attained on an interval at level 1: the pullback puts an
//        atom at 1, not bounded.
//   (1)  finitely many maximum points, lacunary prefix: steep two-sided
//        approach at every point gives bounded; infinite one-sided quotients
//        give compact; a contact exponent above 1 at every point gives
//        Schatten for all q.
//   (2)  converses, no lacunarity needed: a vanishing one-sided quotient at
//        a point where phi reaches 1 refutes boundedness; a bounded
//        one-sided quotient there refutes compactness.
//   (3)  real-exponent polynomial symbols reaching 1 are never compact, and
//        reaching 1 at an interior point refutes boundedness.
// Tail profile, liminf ratios, and the norm trend of the pullback measure
// ride along as evidence.
CompositionReport classify_compop(const exprdsl::Expr& phi,
                                  const exponents::ExponentSequence& seq);

// The essential-norm formula for symbols with finitely many maximum points,
// one-sided derivatives there, and a strictly positive/negative slope pair:
// L(x0) = 1/phi'_-(x0) + 1/|phi'_+(x0)| at interior points, one term at the
// endpoints, with 1/infinity contributing 0.  `sum` is the displayed sum of
// the L values; `root_of_sum` is its square root, which is what the
// essential norm of the underlying embedding forces at p = 2.  The two
// readings disagree in general and are reported side by side; for symbols
// with L-sum 1 (tent with slopes +-2) they coincide.
struct EssentialNormFormula {
  struct PointTerm {
    double x0 = 0.0;
    double left_slope = 0.0;   // phi'_-; +infinity allowed; unset if no left
    double right_slope = 0.0;  // phi'_+; -infinity allowed; unset if no right
    double L = 0.0;
  };
  std::vector<PointTerm> terms;
  double sum = 0.0;
  double root_of_sum = 0.0;
};

// Throws when the symbol never reaches 1, attains it on an interval, is not
// one-sidedly differentiable at a maximum point (Dini inf and sup disagree
// beyond 1e-4), or approaches it flatly (slope of the wrong sign or zero).
EssentialNormFormula essential_norm_formula(const exprdsl::Expr& phi);

}  // namespace muntz::compop
