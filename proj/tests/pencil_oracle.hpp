// Independent cross-check for the pencil eigensolver: the characteristic
// polynomial det(A - nu B) is expanded exactly over the rationals (Leibniz
// sum, fine for n <= 5), reduced to a square-free polynomial, and its roots
// are located by bisection with exact sign evaluations.  Shares no code with
// the Cholesky/Jacobi path beyond the rational scalar type.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "muntz/rational.hpp"

namespace pencil_oracle {

using muntz::Rational;

using Poly = std::vector<Rational>;  // coefficients, index = degree

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline void poly_trim(Poly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
  if (p.empty()) p.assign(1, Rational(0));
}

inline bool poly_is_zero(const Poly& p) {
  return p.empty() || (p.size() == 1 && p[0] == 0);
}

inline Rational poly_eval(const Poly& p, const Rational& x) {
  Rational v(0);
  for (std::size_t k = p.size(); k-- > 0;) v = v * x + p[k];
  return v;
}

inline Poly poly_derivative(const Poly& p) {
  if (p.size() <= 1) return Poly{Rational(0)};
  Poly d(p.size() - 1);
  for (std::size_t k = 1; k < p.size(); ++k)
    d[k - 1] = p[k] * Rational(static_cast<long>(k));
  return d;
}

// Euclidean remainder of a by b over the rationals
inline Poly poly_mod(Poly a, const Poly& b) {
  poly_trim(a);
  while (a.size() >= b.size() && !poly_is_zero(a)) {
    const Rational q = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t k = 0; k < b.size(); ++k) a[shift + k] -= q * b[k];
    a.pop_back();
    poly_trim(a);
  }
  return a;
}

inline Poly poly_gcd(Poly a, Poly b) {
  poly_trim(a);
  poly_trim(b);
  while (!poly_is_zero(b)) {
    Poly r = poly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  // make monic so exact zero tests stay well scaled
  if (!poly_is_zero(a))
    for (auto& c : a) c /= a.back();
  return a;
}

// square-free part p / gcd(p, p'): every real root becomes a sign change
inline Poly square_free(const Poly& p) {
  const Poly g = poly_gcd(p, poly_derivative(p));
  if (g.size() == 1) return p;
  Poly q = p;
  poly_trim(q);
  if (q.size() < g.size()) return q;
  Poly out(q.size() - g.size() + 1, Rational(0));
  // exact division q / g (remainder must vanish)
  while (q.size() >= g.size() && !poly_is_zero(q)) {
    const Rational c = q.back() / g.back();
    const std::size_t shift = q.size() - g.size();
    out[shift] = c;
    for (std::size_t k = 0; k < g.size(); ++k) q[shift + k] -= c * g[k];
    q.pop_back();
    poly_trim(q);
  }
  poly_trim(out);
  return out;
}

// det(A - nu B) as an exact polynomial in nu via the Leibniz sum
inline Poly characteristic(const std::vector<std::vector<Rational>>& A,
                           const std::vector<std::vector<Rational>>& B) {
  const std::size_t n = A.size();
  if (n == 0 || n > 5)
    throw std::invalid_argument("oracle supports 1 <= n <= 5");
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Poly total{Rational(0)};
  do {
    // permutation sign by inversion count
    int inv = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) inv += perm[i] > perm[j];
    Poly term{(inv % 2 == 0) ? Rational(1) : Rational(-1)};
    for (std::size_t i = 0; i < n; ++i)
      term = poly_mul(term, Poly{A[i][perm[i]], -B[i][perm[i]]});
    if (total.size() < term.size()) total.resize(term.size(), Rational(0));
    for (std::size_t k = 0; k < term.size(); ++k) total[k] += term[k];
  } while (std::next_permutation(perm.begin(), perm.end()));
  poly_trim(total);
  return total;
}

// Root of q nearest the numeric guess: exact-rational check at the guess
// itself first (catches 0 and 1 exactly), then bracket widening + bisection
// with exact sign evaluations at double endpoints.
inline double refine_root(const Poly& q, double guess) {
  const Rational g(guess);
  if (poly_eval(q, g) == 0) return guess;
  // start narrow: pencil eigenvalues cluster toward 0 and a generous first
  // bracket can enclose an even number of them, hiding the sign change
  double w = std::max(1e-13, 1e-3 * std::fabs(guess));
  for (int widen = 0; widen < 40; ++widen, w *= 2.0) {
    Rational lo(guess - w), hi(guess + w);
    const Rational flo = poly_eval(q, lo), fhi = poly_eval(q, hi);
    if (flo == 0) return guess - w;
    if (fhi == 0) return guess + w;
    if ((flo < 0) == (fhi < 0)) continue;
    double a = guess - w, b = guess + w;
    bool neg_lo = flo < 0;
    for (int it = 0; it < 200 && b - a > 1e-16 * std::max(1.0, std::fabs(a));
         ++it) {
      const double m = 0.5 * (a + b);
      const Rational fm = poly_eval(q, Rational(m));
      if (fm == 0) return m;
      if ((fm < 0) == neg_lo)
        a = m;
      else
        b = m;
    }
    return 0.5 * (a + b);
  }
  throw std::runtime_error("oracle failed to bracket a pencil eigenvalue");
}

// Eigenvalues of A v = nu B v refined from numeric guesses, as exact-sign
// bisection roots of the square-free characteristic polynomial.
inline std::vector<double> refine_spectrum(
    const std::vector<std::vector<Rational>>& A,
    const std::vector<std::vector<Rational>>& B,
    const std::vector<double>& guesses) {
  const Poly q = square_free(characteristic(A, B));
  std::vector<double> out;
  out.reserve(guesses.size());
  for (double g : guesses) out.push_back(refine_root(q, g));
  return out;
}

}  // namespace pencil_oracle
