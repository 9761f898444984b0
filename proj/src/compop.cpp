#include "muntz/compop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "muntz/quadrature.hpp"
#include "muntz/realpoly.hpp"
#include "verdicts.hpp"

namespace muntz::compop {

namespace {

constexpr double kRangeSlack = 1e-9;  // tolerated excursion outside [0,1]
constexpr double kMaxTol = 1e-9;      // "attains the maximum" slack
constexpr double kDiniZero = 1e-4;    // quotients below this read as zero
constexpr double kDiniBlowup = 1e6;   // quotients beyond this may read as inf
constexpr double kClusterEps = 1e-7;  // merge radius for maximum points
constexpr double kContactWindow = 1e-2;  // default Holder sampling window
constexpr double kSteepContact = 1.05;   // contact exponent "above 1"

void check_section(const exponents::ExponentSequence& seq, std::size_t n) {
  if (n == 0) throw std::invalid_argument("section size must be positive");
  if (n > seq.size())
    throw std::invalid_argument("section size exceeds the exponent prefix");
  if (n > linalg::kMaxSection) {
    std::ostringstream os;
    os << "section size " << n << " exceeds the supported maximum of "
       << linalg::kMaxSection;
    throw std::invalid_argument(os.str());
  }
}

double clamped_symbol(const exprdsl::Expr& phi, double x) {
  const double v = phi.eval(x);
  if (v < -kRangeSlack || v > 1.0 + kRangeSlack) {
    std::ostringstream os;
    os << "symbol leaves [0,1]: phi(" << x << ") = " << v;
    throw std::domain_error(os.str());
  }
  return std::min(1.0, std::max(0.0, v));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

linalg::Matrix compop_gram(const exprdsl::Expr& phi,
                           const exponents::ExponentSequence& seq,
                           std::size_t n,
                           const std::optional<exprdsl::Expr>& weight) {
  check_section(seq, n);
  // cut the integrals at the symbol's folds and at piecewise thresholds so
  // every segment is smooth inside
  std::vector<double> cuts = measure::expr_breakpoints(phi);
  for (const auto& p : measure::auto_partition(phi).pieces) {
    cuts.push_back(p.a);
    cuts.push_back(p.b);
  }
  if (weight)
    for (double c : measure::expr_breakpoints(*weight)) cuts.push_back(c);

  // Same per-entry budget as measure grams over exact densities: the
  // normalization congruence amplifies an entry error by up to 2s + 1.
  linalg::Matrix A(n);
  std::map<double, double> by_sum;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double s = seq[i] + seq[j];
      auto it = by_sum.find(s);
      if (it == by_sum.end()) {
        quad::Options opt;
        opt.tol = std::max(1e-12 / (2.0 * s + 1.0), 1e-15);
        const double value = quad::integrate(
            [&phi, &weight, s](double x) {
              const double v = clamped_symbol(phi, x);
              const double w = weight ? weight->eval(x) : 1.0;
              return w * w * std::pow(v, s);
            },
            0.0, 1.0, cuts, opt);
        it = by_sum.emplace(s, value).first;
      }
      A(i, j) = it->second;
      A(j, i) = it->second;
    }
  return A;
}

embedding::SingularSpectrum compop_svals(const exprdsl::Expr& phi,
                                         const exponents::ExponentSequence& seq,
                                         std::size_t n, Route route,
                                         embedding::Normalization norm) {
  check_section(seq, n);
  if (route == Route::Pullback)
    return embedding::embedding_svals(seq, n, measure::Measure::pullback(phi),
                                      norm);
  return embedding::pencil_svals(compop_gram(phi, seq, n),
                                 embedding::lebesgue_gram(seq, n),
                                 embedding::basis_scales(seq, n, norm));
}

EssentialMaxReport ess_max_points(const exprdsl::Expr& phi, int grid_n) {
  const measure::MonotonePartition part = measure::auto_partition(phi, grid_n);
  EssentialMaxReport rep;
  rep.cluster_eps = kClusterEps;
  double alpha = 0.0;  // the partition scan has verified phi >= 0
  for (const auto& p : part.pieces) alpha = std::max(alpha, p.yhi());
  rep.alpha = std::min(alpha, 1.0);

  std::vector<double> pts;
  for (const auto& p : part.pieces) {
    if (p.yhi() < alpha - kMaxTol) continue;
    switch (p.kind) {
      case measure::PieceKind::Constant:
        rep.intervals.emplace_back(p.a, p.b);
        break;
      case measure::PieceKind::Increasing:
        pts.push_back(p.b);
        break;
      case measure::PieceKind::Decreasing:
        pts.push_back(p.a);
        break;
    }
  }
  // an interior peak is reported by both flanking pieces; merge those twins,
  // and drop points swallowed by a constant-at-max interval
  std::sort(pts.begin(), pts.end());
  for (std::size_t k = 0; k < pts.size();) {
    std::size_t j = k;
    while (j + 1 < pts.size() && pts[j + 1] - pts[k] <= kClusterEps) ++j;
    const double center = 0.5 * (pts[k] + pts[j]);
    bool inside = false;
    for (const auto& [a, b] : rep.intervals)
      inside = inside ||
               (center >= a - kClusterEps && center <= b + kClusterEps);
    if (!inside) rep.points.push_back(center);
    k = j + 1;
  }
  return rep;
}

namespace {

// Finite liminf/limsup from the stable middle of the quotient list, unless
// the magnitudes grow monotonically through the blow-up threshold, which
// reads as the matching signed infinity.
void side_extremes(const std::vector<double>& q, const std::vector<int>& js,
                   double& lo, double& hi) {
  const std::size_t m = q.size();
  if (m >= 8 && std::fabs(q.back()) > kDiniBlowup) {
    bool grow = true;
    for (std::size_t k = m - 8; grow && k + 1 < m; ++k)
      grow = std::fabs(q[k + 1]) > std::fabs(q[k]);
    if (grow) {
      lo = hi =
          std::copysign(std::numeric_limits<double>::infinity(), q.back());
      return;
    }
  }
  std::vector<double> win;
  for (std::size_t k = 0; k < m; ++k)
    if (js[k] >= 16 && js[k] <= 26) win.push_back(q[k]);
  if (win.size() < 3) {
    // squeezed against a domain endpoint: fall back to the middle third
    const std::size_t from = m / 3;
    const std::size_t to = std::max(from + 1, 2 * m / 3);
    win.assign(q.begin() + static_cast<long>(from),
               q.begin() + static_cast<long>(to));
  }
  lo = *std::min_element(win.begin(), win.end());
  hi = *std::max_element(win.begin(), win.end());
}

}  // namespace

DiniEstimate dini(const exprdsl::Expr& phi, double x0) {
  if (!(x0 >= 0.0 && x0 <= 1.0))
    throw std::invalid_argument("Dini quotients need a point inside [0,1]");
  DiniEstimate de;
  de.x0 = x0;
  const double f0 = phi.eval(x0);
  std::vector<double> ql, qr;
  std::vector<int> jl, jr;
  for (int j = 8; j <= 40; ++j) {
    const double h = std::ldexp(1.0, -j);
    if (h <= x0) {
      ql.push_back((f0 - phi.eval(x0 - h)) / h);
      jl.push_back(j);
    }
    if (h <= 1.0 - x0) {
      qr.push_back((phi.eval(x0 + h) - f0) / h);
      jr.push_back(j);
    }
  }
  if (ql.size() >= 8) {
    de.has_left = true;
    side_extremes(ql, jl, de.d_minus_inf, de.d_minus_sup);
  }
  if (qr.size() >= 8) {
    de.has_right = true;
    side_extremes(qr, jr, de.d_plus_inf, de.d_plus_sup);
  }
  return de;
}

HolderContact holder_contact(const exprdsl::Expr& phi, double x0, double eps) {
  if (!(eps > 0.0))
    throw std::invalid_argument("contact window must be positive");
  HolderContact hc;
  hc.x0 = x0;
  hc.eps = eps;
  if (std::fabs(phi.eval(x0) - 1.0) > kMaxTol)
    throw std::invalid_argument(
        "Holder contact is defined at points where phi reaches 1");

  std::vector<std::pair<double, double>> samples;  // (|x - x0|, |phi(x) - 1|)
  for (int k = 1; k <= 40; ++k) {
    const double u = eps * std::pow(0.5, 0.5 * k);
    for (const double x : {x0 - u, x0 + u}) {
      if (x < 0.0 || x > 1.0) continue;
      const double v = std::fabs(phi.eval(x) - 1.0);
      if (v < 1e-13) continue;  // below evaluation noise; its log would lie
      samples.emplace_back(u, v);
    }
  }
  if (samples.size() < 8)
    throw std::invalid_argument(
        "too few usable samples around the contact point");

  // least squares for log u = s log v + b
  double mv = 0.0, mu_ = 0.0;
  for (const auto& [u, v] : samples) {
    mu_ += std::log(u);
    mv += std::log(v);
  }
  mu_ /= static_cast<double>(samples.size());
  mv /= static_cast<double>(samples.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [u, v] : samples) {
    const double dv = std::log(v) - mv;
    sxx += dv * dv;
    sxy += dv * (std::log(u) - mu_);
  }
  if (!(sxx > 0.0))
    throw std::invalid_argument("contact samples do not vary; cannot fit");
  hc.s = sxy / sxx;
  const double intercept = mu_ - hc.s * mv;
  hc.c = std::exp(intercept) * 1.05;

  double residual = 0.0, worst = -std::numeric_limits<double>::infinity();
  for (const auto& [u, v] : samples) {
    residual = std::max(
        residual, std::fabs(std::log(u) - (hc.s * std::log(v) + intercept)));
    worst = std::max(worst, u - hc.c * std::pow(v, hc.s));
  }
  hc.residual = residual;
  hc.holds = worst <= 0.0;
  return hc;
}

CompositionReport classify_compop(const exprdsl::Expr& phi,
                                  const exponents::ExponentSequence& seq) {
  CompositionReport rep;
  rep.max_report = ess_max_points(phi);
  const double alpha = rep.max_report.alpha;
  const bool reaches_one = alpha >= 1.0 - kMaxTol;

  auto& r = rep.classification;
  embedding::VerdictChain vc(r);

  // measure-side evidence through the pullback
  const measure::Measure mu = measure::Measure::pullback(phi);
  r.profile = measure::sublinearity_profile(mu);
  r.liminf_ratios = embedding::liminf_test(seq, mu);

  bool lacunary = false;
  double gamma = 0.0;
  try {
    const auto lac = exponents::lacunarity(seq);
    lacunary = lac.lacunary;
    gamma = lac.gamma;
  } catch (const std::exception& e) {
    r.notes.push_back(std::string("lacunarity check skipped: ") + e.what());
  }
  rep.direct_rules_applicable = lacunary;

  {
    std::ostringstream os;
    os << "ess sup " << fmt(alpha) << " attained at "
       << rep.max_report.points.size() << " point(s) and "
       << rep.max_report.intervals.size() << " interval(s)";
    r.notes.push_back(os.str());
  }

  // rule 0: maximum below 1 means the pullback has compact support
  if (!reaches_one) {
    vc.yes_schatten("essential sup " + fmt(alpha) +
                    " of the symbol is below 1: the pullback has support in "
                    "[0, " +
                    fmt(alpha) + "]");
  } else if (!rep.max_report.intervals.empty()) {
    // rule 0': a constant-at-1 stretch pushes an atom onto the point 1
    double len = 0.0;
    for (const auto& [a, b] : rep.max_report.intervals) len += b - a;
    vc.no_bounded("the symbol sits at 1 on intervals of total length " +
                  fmt(len) + ": the pullback puts that mass at the point 1");
  }

  if (reaches_one && rep.max_report.intervals.empty() &&
      !rep.max_report.points.empty()) {
    for (const double x : rep.max_report.points) {
      PointAnalysis pa;
      pa.dini = dini(phi, x);
      try {
        pa.holder = holder_contact(phi, x, kContactWindow);
        pa.holder_fitted = true;
      } catch (const std::exception& e) {
        r.notes.push_back("contact fit skipped at x0 = " + fmt(x) + ": " +
                          e.what());
      }
      rep.points.push_back(pa);
    }

    const double inf = std::numeric_limits<double>::infinity();
    bool steep = true, blowup = true, contact = true;
    double min_s = inf;
    for (const PointAnalysis& pa : rep.points) {
      const DiniEstimate& d = pa.dini;
      steep = steep && (!d.has_left || d.d_minus_inf > kDiniZero) &&
              (!d.has_right || d.d_plus_sup < -kDiniZero);
      blowup = blowup && (!d.has_left || d.d_minus_inf == inf) &&
               (!d.has_right || d.d_plus_sup == -inf);
      contact = contact && pa.holder_fitted && pa.holder.holds &&
                pa.holder.s > kSteepContact;
      if (pa.holder_fitted) min_s = std::min(min_s, pa.holder.s);
    }

    // direct rules need the lacunary prefix
    if (lacunary) {
      if (steep)
        vc.yes_bounded(
            "slopes into every maximum point are bounded away from 0 "
            "(lacunary prefix, gamma=" +
            fmt(gamma) + ")");
      if (blowup)
        vc.yes_compact(
            "one-sided quotients blow up at every maximum point (lacunary "
            "prefix)");
      if (contact)
        vc.yes_schatten("Holder contact exponent " + fmt(min_s) +
                        " above 1 at every maximum point (lacunary prefix)");
    } else {
      r.notes.push_back(
          "direct rules skipped: the exponent prefix is not lacunary");
    }

    // converses need neither lacunarity nor anything about the other points
    for (std::size_t k = 0; k < rep.points.size(); ++k) {
      const DiniEstimate& d = rep.points[k].dini;
      const double x = rep.max_report.points[k];
      if ((d.has_left && std::fabs(d.d_minus_sup) <= kDiniZero) ||
          (d.has_right && std::fabs(d.d_plus_inf) <= kDiniZero))
        vc.no_bounded("the symbol reaches 1 at x0 = " + fmt(x) +
                      " with a vanishing one-sided quotient");
      if ((d.has_left && std::isfinite(d.d_minus_sup)) ||
          (d.has_right && std::isfinite(d.d_plus_inf)))
        vc.no_compact("one-sided quotients at x0 = " + fmt(x) +
                      " stay bounded");
    }
  }

  // stronger conclusions when the symbol is a real-exponent polynomial
  if (reaches_one) {
    bool polynomial = false;
    try {
      (void)realpoly::RealExpPolynomial::from_expr(phi);
      polynomial = true;
    } catch (const std::exception&) {
    }
    if (polynomial) {
      vc.no_compact(
          "a real-exponent polynomial symbol reaching 1 is never compact");
      for (const double x : rep.max_report.points)
        if (x > kMaxTol && x < 1.0 - kMaxTol)
          vc.no_bounded("a polynomial symbol reaches 1 at the interior point "
                        "x0 = " +
                        fmt(x));
    }
  }

  r.lambda2_embedding = r.bounded;
  if (r.bounded.value != embedding::Verdict::Inconclusive)
    r.lambda2_embedding.rule =
        "boundedness of the composition is the embedding property of the "
        "pullback: " +
        r.bounded.rule;

  // spectral evidence: never a rule, may legitimately fail to solve
  try {
    std::vector<std::size_t> n_list;
    for (std::size_t n : {2u, 3u, 4u, 6u, 8u, 10u})
      if (n <= seq.size() && n <= linalg::kMaxSection) n_list.push_back(n);
    if (n_list.size() >= 3)
      r.norm_trend = embedding::operator_norm_estimate(seq, mu, n_list);
  } catch (const std::exception& e) {
    r.norm_trend_error = e.what();
  }
  return rep;
}

namespace {

// one-sided derivative from a Dini estimate; throws unless the liminf and
// limsup agree (equal sentinels count as agreement)
double side_derivative(double lo, double hi, double x0, const char* side) {
  if (lo == hi) return lo;
  if (std::fabs(hi - lo) <= kDiniZero * std::max(1.0, std::fabs(hi)))
    return 0.5 * (lo + hi);
  std::ostringstream os;
  os << "the symbol is not differentiable from the " << side << " at x0 = "
     << x0 << " (quotients range over [" << lo << ", " << hi << "])";
  throw std::invalid_argument(os.str());
}

}  // namespace

EssentialNormFormula essential_norm_formula(const exprdsl::Expr& phi) {
  const EssentialMaxReport rep = ess_max_points(phi);
  if (rep.alpha < 1.0 - kMaxTol)
    throw std::invalid_argument(
        "the symbol never reaches 1, so the essential-norm formula does not "
        "apply (the operator is Schatten for every q)");
  if (!rep.intervals.empty())
    throw std::invalid_argument(
        "the symbol attains 1 on an interval; the formula needs finitely "
        "many maximum points");

  EssentialNormFormula out;
  for (const double x : rep.points) {
    const DiniEstimate d = dini(phi, x);
    EssentialNormFormula::PointTerm t;
    t.x0 = x;
    double L = 0.0;
    if (d.has_left) {
      t.left_slope = side_derivative(d.d_minus_inf, d.d_minus_sup, x, "left");
      if (!(t.left_slope > kDiniZero))
        throw std::invalid_argument(
            "the left derivative at x0 = " + fmt(x) +
            " is not strictly positive; the formula needs a genuine ascent");
      L += 1.0 / t.left_slope;  // 1/infinity contributes 0
    }
    if (d.has_right) {
      t.right_slope = side_derivative(d.d_plus_inf, d.d_plus_sup, x, "right");
      if (!(t.right_slope < -kDiniZero))
        throw std::invalid_argument(
            "the right derivative at x0 = " + fmt(x) +
            " is not strictly negative; the formula needs a genuine descent");
      L += 1.0 / -t.right_slope;
    }
    t.L = L;
    out.terms.push_back(t);
    out.sum += L;
  }
  out.root_of_sum = std::sqrt(out.sum);
  return out;
}

}  // namespace muntz::compop
