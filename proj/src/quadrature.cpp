#include "muntz/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace muntz::quad {

namespace {
std::atomic<double> g_tol_override{0.0};
}

void set_tolerance_override(double tol) {
  g_tol_override.store(tol > 0.0 && std::isfinite(tol) ? tol : 0.0);
}

double default_tolerance() {
  if (double o = g_tol_override.load(); o > 0.0) return o;
  if (const char* env = std::getenv("MUNTZ_QUAD_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && std::isfinite(v) && v > 0.0) return v;
  }
  return 1e-10;
}

namespace {

struct Worker {
  const std::function<double(double)>& f;
  double lo, hi;  // full interval, for nudging direction
  int max_depth;

  // endpoint singularities evaluate to inf/nan exactly on the endpoint;
  // retry a hair toward the interior before giving up
  double eval(double x) const {
    double v = f(x);
    if (std::isfinite(v)) return v;
    double mid = 0.5 * (lo + hi);
    double span = hi - lo;
    for (double scale : {1e-13, 1e-11, 1e-9, 1e-7}) {
      double xx = x < mid ? x + scale * span : x - scale * span;
      v = f(xx);
      if (std::isfinite(v)) return v;
    }
    throw std::runtime_error("integrand is not finite near x = " +
                             std::to_string(x));
  }

  static double simpson(double a, double fa, double fm, double fb, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  // The acceptance test keeps the caller's absolute tolerance instead of
  // halving it per level: with halving, a y^{-1/2} endpoint chain never
  // accepts and drags its sibling subtrees into exponential over-refinement.
  // Each accepted leaf contributes at most ~tol/15 after the Richardson
  // correction, and only the handful of leaves hugging a singularity sit at
  // that boundary, so the realized total error stays near tol.
  double recurse(double a, double fa, double m, double fm, double b, double fb,
                 double whole, double tol, int depth) const {
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    if (!(lm > a) || !(rm > m) || !(m > lm) || !(b > rm))
      return whole;  // interval at double resolution
    double flm = eval(lm);
    double frm = eval(rm);
    double left = simpson(a, fa, flm, fm, m);
    double right = simpson(m, fm, frm, fb, b);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
      return left + right + delta / 15.0;
    return recurse(a, fa, lm, flm, m, fm, left, tol, depth - 1) +
           recurse(m, fm, rm, frm, b, fb, right, tol, depth - 1);
  }

  double run(double a, double b, double tol) const {
    double m = 0.5 * (a + b);
    double fa = eval(a), fm = eval(m), fb = eval(b);
    return recurse(a, fa, m, fm, b, fb, simpson(a, fa, fm, fb, b), tol,
                   max_depth);
  }
};

// Integrands like x^s h(x) with s in the thousands hide their entire mass in
// a width ~1/s sliver hugging a segment edge; midpoint refinement samples
// zeros everywhere and accepts 0.  A geometric mesh toward u = 0 (ratio 1/2,
// 40 levels, so edge distances down to L^2 2^{-80} in the original variable)
// guarantees some cell is commensurate with any edge-anchored peak.
double graded_run(const Worker& w, double L, double tol) {
  constexpr int kLevels = 40;
  const double tol_cell = tol / (kLevels + 1);
  double total = 0.0;
  double hi = L;
  for (int k = 0; k < kLevels; ++k) {
    double lo = 0.5 * hi;
    total += w.run(lo, hi, tol_cell);
    hi = lo;
  }
  total += w.run(0.0, hi, tol_cell);
  return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 Options opt) {
  return integrate(f, a, b, {}, opt);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::vector<double> breakpoints, Options opt) {
  if (!(std::isfinite(a) && std::isfinite(b)))
    throw std::invalid_argument("integration bounds must be finite");
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, std::move(breakpoints), opt);
  if (!(opt.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  std::vector<double> cuts{a, b};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return y - x < 1e-15; }),
             cuts.end());
  if (cuts.back() != b) cuts.back() = b;

  // Each segment is integrated under a square-root substitution from both
  // edges (y = s + u^2 on the left half, y = e - u^2 on the right): an
  // integrable edge singularity (y - s)^{-1/2} becomes a smooth integrand in
  // u, so the mesh grading toward the segment ends costs nothing.
  double tol_half =
      opt.tol / (2.0 * static_cast<double>(cuts.size() - 1));
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double s = cuts[i], e = cuts[i + 1];
    double c = 0.5 * (s + e);
    std::function<double(double)> left = [&f, s](double u) {
      return 2.0 * u * f(s + u * u);
    };
    std::function<double(double)> right = [&f, e](double u) {
      return 2.0 * u * f(e - u * u);
    };
    double wl = std::sqrt(c - s), wr = std::sqrt(e - c);
    Worker lw{left, 0.0, wl, opt.max_depth};
    Worker rw{right, 0.0, wr, opt.max_depth};
    total += graded_run(lw, wl, tol_half) + graded_run(rw, wr, tol_half);
  }
  return total;
}

}  // namespace muntz::quad
