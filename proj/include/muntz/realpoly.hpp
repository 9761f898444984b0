// Polynomials with real exponents drawn from a Q-linear lattice over a fixed
// set of positive generators (e.g. {1, sqrt2}). Coefficients and exponent
// coordinates are exact rationals, so products and powers cancel exactly and
// term counts are trustworthy. Supports the lower bound on the number of
// terms of a power, integer basis reduction, exponent membership against a
// sequence prefix, invariance sweeps, and the fractional binomial series with
// its convergence diagnostics.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "muntz/exponents.hpp"
#include "muntz/expr.hpp"
#include "muntz/rational.hpp"

namespace muntz::realpoly {

struct GeneratorSet {
  std::vector<std::string> names;
  std::vector<double> values;  // > 0, Q-linearly independent by assumption

  static GeneratorSet unit();  // just "1" -> 1.0
  int index_of(const std::string& name) const;  // -1 when absent
  int add(const std::string& name, double value);
  std::size_t size() const { return names.size(); }
};

struct ExponentVector {
  std::vector<Rational> coords;  // one per generator; shorter vectors mean 0

  double numeric(const GeneratorSet& gens) const;
  static ExponentVector rational(const Rational& r);          // r * "1"
  static ExponentVector unitgen(std::size_t idx, std::size_t ngens);
};

bool same_exponent(const ExponentVector& a, const ExponentVector& b);

struct Term {
  Rational coeff;
  ExponentVector exp;
};

class RealExpPolynomial {
 public:
  RealExpPolynomial() = default;  // zero polynomial over {1}
  RealExpPolynomial(GeneratorSet gens, std::vector<Term> terms);

  const GeneratorSet& gens() const { return gens_; }
  const std::vector<Term>& terms() const { return terms_; }  // canonical order
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  double eval(double x) const;
  std::string str() const;

  // exponent values in canonical (ascending numeric) order
  std::vector<double> exponent_values() const;
  bool integer_exponents() const;  // classical polynomial?

  // literal syntax: "2*x^(3/2) - x^(s:sqrt2)", "(x + x^2)/2"; s:name refers
  // to a generator, resolved against `gens` plus a builtin table (sqrt2, ...)
  static RealExpPolynomial parse(const std::string& text);
  static RealExpPolynomial parse_with(const std::string& text, GeneratorSet gens);

  // lift an expression tree that happens to be polynomial; throws
  // std::invalid_argument otherwise
  static RealExpPolynomial from_expr(const exprdsl::Expr& e);

 private:
  GeneratorSet gens_ = GeneratorSet::unit();
  std::vector<Term> terms_;
  std::vector<double> numeric_;  // cached exponent numerics, aligned to terms_
  void canonicalize();
};

RealExpPolynomial add(const RealExpPolynomial& a, const RealExpPolynomial& b);
RealExpPolynomial sub(const RealExpPolynomial& a, const RealExpPolynomial& b);
RealExpPolynomial multiply(const RealExpPolynomial& a, const RealExpPolynomial& b);
RealExpPolynomial power(const RealExpPolynomial& p, unsigned k);

struct SchinzelReport {
  std::size_t terms = 0;   // term count of p^lam
  std::size_t bound = 0;   // lam + 1
  bool holds = false;      // terms >= bound
};
// p must have at least two terms; lam >= 1
SchinzelReport schinzel_check(const RealExpPolynomial& p, unsigned lam);

struct BasisReduction {
  GeneratorSet scaled_gens;                    // r_j / L_j
  std::vector<Integer> scales;                 // L_j (lcm of denominators)
  std::vector<std::vector<Integer>> coords;    // integer coordinates per input
  std::vector<Integer> shift;                  // b_j > max_i |a_ij|
  double shift_numeric = 0.0;                  // value of the shift exponent
};
BasisReduction rational_basis_reduction(const GeneratorSet& gens,
                                        const std::vector<ExponentVector>& exps);

struct MembershipReport {
  bool contained = true;
  std::vector<double> missing;  // exponents with no close sequence member
};
MembershipReport membership_check(const RealExpPolynomial& p,
                                  const exponents::ExponentSequence& seq,
                                  double tol = 1e-9);

struct InvarianceEntry {
  double lambda = 0.0;
  bool tested = false;      // lambda must sit in the prefix and be an integer
  bool holds = false;
  double first_violation = 0.0;  // defined when !holds
};
struct InvarianceReport {
  std::vector<InvarianceEntry> entries;
  bool invariant_on_prefix = true;  // over the tested lambdas
};
InvarianceReport invariance_test(const RealExpPolynomial& phi,
                                 const exponents::ExponentSequence& seq,
                                 const std::vector<double>& lambdas,
                                 double tol = 1e-9);

struct BinomialSeries {
  double prefactor = 1.0;          // alpha^lam
  std::vector<double> coeffs;      // a_0..a_K of (1 + (beta/alpha) t)^lam
  std::vector<double> exponents;   // lam*zeta1 + k*(zeta2 - zeta1)
  double radius = 0.0;             // |alpha/beta|^{1/(zeta2-zeta1)}
  double eval(double x) const;     // truncated series value
};
// series for (alpha x^zeta1 + beta x^zeta2)^lam, lam real and not a
// nonnegative integer (use power() for those)
BinomialSeries binomial_expand(double alpha, double zeta1, double beta,
                               double zeta2, double lam, int K);

struct ConvergenceReport {
  double L = 0.0;       // max of |a_k|^(1/s_k) over the trailing half
  double radius = 0.0;  // 1/L, infinity when L == 0
};
ConvergenceReport convergence_exponent(const std::vector<double>& coeffs,
                                       const std::vector<double>& exps);

// indices k with |b_k| * (p*lambda_k + 1)^(-1/p) > (1+eps)^lambda_k * f_norm
std::vector<std::size_t> clarkson_erdos_check(
    const std::vector<double>& coeffs, const exponents::ExponentSequence& seq,
    double f_norm, double eps, double p = 2.0);

}  // namespace muntz::realpoly
