// Exponent sequences (finite strictly increasing prefixes of a Muntz class
// exponent set) and the structural checks the classifiers consume:
// summability partial sums, gap condition, lacunarity, quasilacunarity,
// closure under multiplication by a fixed eta.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace muntz::exponents {

enum class TailModel { None, Geometric, AssertedSummable };

struct ExponentSequence {
  std::vector<double> values;  // strictly increasing, >= 0
  TailModel tail = TailModel::None;
  double tail_ratio = 0.0;  // Geometric: asserted ratio > 1 past the prefix

  static ExponentSequence from_values(std::vector<double> v,
                                      TailModel tail = TailModel::None,
                                      double tail_ratio = 0.0);
  // base^1, base^2, ..., base^n with a geometric tail model attached
  static ExponentSequence geometric(double base, int n);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double back() const { return values.back(); }
};

struct PartialSumReport {
  double partial_sum = 0.0;  // sum of 1/lambda over positive entries
  int skipped_zeros = 0;     // lambda == 0 entries excluded
  enum class Verdict { Summable, AssertedSummable, Inconclusive } verdict =
      Verdict::Inconclusive;
  double tail_bound = 0.0;  // geometric model: partial_sum + bound on the rest
};
PartialSumReport muntz_partial_sum(const ExponentSequence& seq);

struct GapReport {
  double min_gap = 0.0;  // min (lambda_{k+1} - lambda_k) over the prefix
  bool holds = false;    // min_gap > 0 (always true for valid sequences)
  bool shrinking = false;  // min sits at the end and gaps trend downward
};
GapReport gap_condition(const ExponentSequence& seq);  // needs n >= 2

struct LacunarityReport {
  double gamma = 0.0;  // min lambda_{n+1}/lambda_n over the prefix
  bool lacunary = false;
  bool prefix_only = true;  // finite data can only certify the prefix
};
LacunarityReport lacunarity(const ExponentSequence& seq);  // needs n >= 2, all > 0

struct QuasilacunarityReport {
  bool quasilacunary = false;
  double gamma = 0.0;          // best covering block-endpoint ratio
  int block_bound = 0;
  std::vector<int> endpoints;  // chosen block endpoints (indices into values)
  bool collapsed = false;      // achievable block ratios trend to 1: rejected
};
// Blocks of <= N consecutive indices whose endpoint ratios all reach some
// gamma > 1. Greedy cover over candidate gammas; prefixes whose best block
// ratios decay toward 1 (e.g. lambda_n = n) are rejected as non-examples.
QuasilacunarityReport quasilacunary(const ExponentSequence& seq, int N);

struct ClosureFailure {
  double lambda = 0.0;
  int m = 0;
  double product = 0.0;  // lambda * eta^m that is missing from the prefix
};
struct ClosureReport {
  bool closed = true;
  std::vector<ClosureFailure> failures;
};
// Checks lambda * eta^m membership for every lambda in the prefix and every
// m >= 1 while the product stays <= max(values). Matching is within tol
// relative to the product.
ClosureReport closure_check(const ExponentSequence& seq, double eta,
                            double tol = 1e-9);

}  // namespace muntz::exponents
