// Finite-section analysis of the embedding of a monomial span
// span{x^{lambda_1}, ..., x^{lambda_n}} into L^2(mu): Gram pencils, singular
// values, operator/essential norm trends, Schatten partial sums, and the
// measure-side classifier.  Finite sections only ever provide evidence about
// the infinite-dimensional operator; every yes/no verdict here comes from
// the measure-side rules, with spectra attached as diagnostics.
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "muntz/exponents.hpp"
#include "muntz/linalg.hpp"
#include "muntz/measure.hpp"

namespace muntz::embedding {

// B[i][j] = 1/(lambda_i + lambda_j + 1), the monomial Gram matrix in L^2(dx).
linalg::Matrix lebesgue_gram(const exponents::ExponentSequence& seq,
                             std::size_t n);

// A[i][j] = integral of x^{lambda_i + lambda_j} d(mu); moments are cached per
// distinct exponent sum.
linalg::Matrix mu_gram(const exponents::ExponentSequence& seq, std::size_t n,
                       const measure::Measure& mu);

// Basis scaling applied as a congruence to both pencil matrices.  The pencil
// spectrum is invariant; the point is conditioning.  Raw monomials produce a
// Cauchy-type B that degrades catastrophically with n.
enum class Normalization { Raw, NormalizedMonomials, RieszScaled };

// The per-monomial scale factors d_i realizing a Normalization for the first
// n exponents.
std::vector<double> basis_scales(const exponents::ExponentSequence& seq,
                                 std::size_t n, Normalization norm);

struct SingularSpectrum {
  std::vector<double> values;   // descending, >= 0
  std::size_t section = 0;      // number of exponents used
  std::size_t tail_offset = 0;  // leading exponents dropped (0 = none)
  double b_condition = 0.0;     // condition of the scaled B block
};

// sqrt of the eigenvalues of A v = nu B v after the congruence by
// diag(scales), clamped at zero.  Shared back end for the measure-driven
// spectra below and for composition-operator spectra, which only differ in
// how A is assembled.
SingularSpectrum pencil_svals(linalg::Matrix A, linalg::Matrix B,
                              const std::vector<double>& scales);

// Singular values of the embedding restricted to the first n monomials.
SingularSpectrum embedding_svals(
    const exponents::ExponentSequence& seq, std::size_t n,
    const measure::Measure& mu,
    Normalization norm = Normalization::NormalizedMonomials);

struct NormTrend {
  std::vector<std::pair<std::size_t, double>> s1;  // (n, s_1(n)), n ascending
  enum class Verdict { Plateau, Divergence, Indeterminate } verdict =
      Verdict::Indeterminate;
  double last = 0.0;  // s_1 at the largest section
};

// s_1(n) over increasing section sizes.  Plateau: the last two relative
// increments are below 1e-3.  Divergence: s_1 strictly increasing with
// non-shrinking increments per unit log n and at least doubling overall.
NormTrend operator_norm_estimate(const exponents::ExponentSequence& seq,
                                 const measure::Measure& mu,
                                 const std::vector<std::size_t>& n_list,
                                 Normalization norm = Normalization::NormalizedMonomials);

// e(n0) = top singular value of the section spanned by the exponents after
// the first n0 (a tail-section proxy for the essential norm; a trend, not a
// certified number).
std::vector<std::pair<std::size_t, double>> essential_norm_estimate(
    const exponents::ExponentSequence& seq, const measure::Measure& mu,
    std::size_t n, const std::vector<std::size_t>& n0_list,
    Normalization norm = Normalization::NormalizedMonomials);

struct SchattenSum {
  double value = 0.0;    // (sum s_k^q)^{1/q} over the section
  bool converged = false;  // last-quarter terms < 1e-6 of the total sum
};
SchattenSum schatten_qnorm(const SingularSpectrum& spec, double q);

// ratio mu(J_{1/lambda_n}) * lambda_n per exponent with lambda_n >= 1;
// divergence is unboundedness evidence, a positive floor is
// non-compactness evidence.
std::vector<std::pair<double, double>> liminf_test(
    const exponents::ExponentSequence& seq, const measure::Measure& mu);

enum class Verdict { Yes, No, Inconclusive };
const char* to_string(Verdict v);

struct RuledVerdict {
  Verdict value = Verdict::Inconclusive;
  std::string rule;  // nonempty whenever value != Inconclusive
};

struct ClassificationReport {
  RuledVerdict bounded;
  RuledVerdict compact;
  RuledVerdict schatten_all_q;
  RuledVerdict lambda2_embedding;  // mirrors bounded
  measure::TailProfile profile;
  std::vector<std::pair<double, double>> liminf_ratios;
  NormTrend norm_trend;            // spectral evidence, never a rule
  std::string norm_trend_error;    // set when the pencil refused to solve
  std::vector<std::string> notes;
};

// Applies the measure-side rules in priority order (mass at 1, compact
// support, sublinear, vanishing sublinear, alpha-sublinear, ratio
// divergence, ratio floor); the first rule to decide a verdict wins, and
// yes/no verdicts propagate along Schatten => compact => bounded and its
// contrapositive.
ClassificationReport classify_embedding(const exponents::ExponentSequence& seq,
                                        const measure::Measure& mu);

}  // namespace muntz::embedding
