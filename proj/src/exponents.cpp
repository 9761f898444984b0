#include "muntz/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace muntz::exponents {

ExponentSequence ExponentSequence::from_values(std::vector<double> v,
                                               TailModel tail,
                                               double tail_ratio) {
  if (v.empty()) throw std::invalid_argument("exponent sequence must be nonempty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0) || !std::isfinite(v[i]))
      throw std::invalid_argument("exponents must be finite and nonnegative");
    if (i > 0 && !(v[i] > v[i - 1]))
      throw std::invalid_argument("exponents must be strictly increasing");
  }
  if (tail == TailModel::Geometric && !(tail_ratio > 1.0))
    throw std::invalid_argument("geometric tail model needs ratio > 1");
  ExponentSequence s;
  s.values = std::move(v);
  s.tail = tail;
  s.tail_ratio = tail_ratio;
  return s;
}

ExponentSequence ExponentSequence::geometric(double base, int n) {
  if (!(base > 1.0)) throw std::invalid_argument("geometric base must be > 1");
  if (n < 1) throw std::invalid_argument("geometric length must be >= 1");
  std::vector<double> v(n);
  double p = 1.0;
  for (int k = 0; k < n; ++k) {
    p *= base;
    v[k] = p;
  }
  return from_values(std::move(v), TailModel::Geometric, base);
}

PartialSumReport muntz_partial_sum(const ExponentSequence& seq) {
  PartialSumReport r;
  for (double v : seq.values) {
    if (v == 0.0) {
      ++r.skipped_zeros;
      continue;
    }
    r.partial_sum += 1.0 / v;
  }
  switch (seq.tail) {
    case TailModel::Geometric: {
      // tail after lambda_n: sum 1/(lambda_n q^k) = 1/(lambda_n (q-1))
      double q = seq.tail_ratio;
      r.tail_bound = r.partial_sum + 1.0 / (seq.back() * (q - 1.0));
      r.verdict = PartialSumReport::Verdict::Summable;
      break;
    }
    case TailModel::AssertedSummable:
      r.tail_bound = r.partial_sum;
      r.verdict = PartialSumReport::Verdict::AssertedSummable;
      break;
    case TailModel::None:
      r.tail_bound = r.partial_sum;
      r.verdict = PartialSumReport::Verdict::Inconclusive;
      break;
  }
  return r;
}

GapReport gap_condition(const ExponentSequence& seq) {
  if (seq.size() < 2)
    throw std::invalid_argument("gap condition needs at least two exponents");
  GapReport r;
  r.min_gap = seq[1] - seq[0];
  std::size_t argmin = 0;
  std::vector<double> gaps(seq.size() - 1);
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    gaps[i] = seq[i + 1] - seq[i];
    if (gaps[i] < r.min_gap) {
      r.min_gap = gaps[i];
      argmin = i;
    }
  }
  r.holds = r.min_gap > 0.0;
  // gaps trending to zero at the end of the prefix: the infimum over the full
  // sequence is likely 0 even though the prefix minimum is positive
  if (gaps.size() >= 4 && argmin + 1 == gaps.size()) {
    bool decreasing = true;
    for (std::size_t i = gaps.size() / 2; i + 1 < gaps.size(); ++i)
      if (gaps[i + 1] > gaps[i] * (1.0 + 1e-12)) decreasing = false;
    r.shrinking = decreasing && gaps.back() < 0.5 * gaps.front();
  }
  return r;
}

LacunarityReport lacunarity(const ExponentSequence& seq) {
  if (seq.size() < 2)
    throw std::invalid_argument("lacunarity needs at least two exponents");
  if (!(seq[0] > 0.0))
    throw std::invalid_argument("lacunarity needs strictly positive exponents");
  LacunarityReport r;
  r.gamma = seq[1] / seq[0];
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    r.gamma = std::min(r.gamma, seq[i + 1] / seq[i]);
  r.lacunary = r.gamma > 1.0;
  r.prefix_only = true;
  return r;
}

QuasilacunarityReport quasilacunary(const ExponentSequence& seq, int N) {
  if (N < 1) throw std::invalid_argument("block bound must be >= 1");
  if (seq.size() < 2)
    throw std::invalid_argument("quasilacunarity needs at least two exponents");
  if (!(seq[0] > 0.0))
    throw std::invalid_argument("quasilacunarity needs strictly positive exponents");
  const int n = static_cast<int>(seq.size());
  QuasilacunarityReport r;
  r.block_bound = N;

  std::set<double, std::greater<double>> candidates;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j <= std::min(i + N, n - 1); ++j) {
      double q = seq[j] / seq[i];
      if (q > 1.0 + 1e-12) candidates.insert(q);
    }

  for (double gamma : candidates) {
    int idx = 0;
    std::vector<int> endpoints{0};
    bool ok = true;
    while (idx < n - 1) {
      int found = -1;
      for (int j = idx + 1; j <= std::min(idx + N, n - 1); ++j) {
        if (seq[j] >= gamma * seq[idx] * (1.0 - 1e-12)) {
          found = j;
          break;
        }
      }
      if (found < 0) {
        // a trailing block may be left incomplete if it cannot extend past
        // the end of the prefix
        ok = (n - 1) - idx <= N;
        break;
      }
      endpoints.push_back(found);
      idx = found;
    }
    if (ok) {
      r.gamma = gamma;
      r.endpoints = std::move(endpoints);
      break;
    }
  }
  if (r.gamma == 0.0) return r;  // no covering gamma at all

  // Reject covers whose achievable block ratios collapse toward 1: the best
  // block ratio available late in the prefix must neither shrink to half the
  // early median nor sit inside the 1.2 band around 1.
  if (n >= 8) {
    std::vector<double> cap;
    for (int i = 0; i + N <= n - 1; ++i) cap.push_back(seq[i + N] / seq[i]);
    if (cap.size() >= 4) {
      std::vector<double> head(cap.begin(), cap.begin() + cap.size() / 2);
      std::sort(head.begin(), head.end());
      double med = head[head.size() / 2] - 1.0;
      std::size_t q = std::max<std::size_t>(1, cap.size() / 4);
      double tail_max = 0.0;
      for (std::size_t i = cap.size() - q; i < cap.size(); ++i)
        tail_max = std::max(tail_max, cap[i]);
      r.collapsed = (tail_max - 1.0) < 0.5 * med && (tail_max - 1.0) < 0.2;
    }
  }
  r.quasilacunary = !r.collapsed;
  return r;
}

ClosureReport closure_check(const ExponentSequence& seq, double eta, double tol) {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("eta must be positive and finite");
  ClosureReport r;
  const double top = seq.back();
  for (double lam : seq.values) {
    double p = lam;
    for (int m = 1;; ++m) {
      p *= eta;
      if (p > top * (1.0 + tol)) break;
      bool member = false;
      for (double v : seq.values)
        if (std::fabs(p - v) <= tol * std::max(1.0, std::fabs(p))) {
          member = true;
          break;
        }
      if (!member) {
        r.closed = false;
        r.failures.push_back({lam, m, p});
      }
      if (eta <= 1.0) break;  // eta == 1 would loop forever
    }
  }
  return r;
}

}  // namespace muntz::exponents
