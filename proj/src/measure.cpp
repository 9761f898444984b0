#include "muntz/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "muntz/quadrature.hpp"

namespace muntz::measure {

namespace {

constexpr double kRangeSlack = 1e-9;   // allowed float excursion outside [0,1]
constexpr double kFlatGap = 1e-12;     // increment below this reads as flat
constexpr double kXTol = 1e-15;        // breakpoint refinement
constexpr double kInvertTol = 1e-12;   // preimage bisection
constexpr double kDiffStep = 1e-6;     // slope differencing

double clamp01(double y) { return y < 0.0 ? 0.0 : (y > 1.0 ? 1.0 : y); }

double golden_extremum(const exprdsl::Expr& phi, double a, double b,
                       bool maximize) {
  const double gr = 0.6180339887498949;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = phi.eval(c), fd = phi.eval(d);
  for (int it = 0; it < 200 && b - a > kXTol; ++it) {
    bool keep_left = maximize ? fc >= fd : fc <= fd;
    if (keep_left) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = phi.eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = phi.eval(d);
    }
  }
  return 0.5 * (a + b);
}

// boundary between {x : |phi(x) - v| <= tol} and its complement; inside_lo
// says which side of the bracket satisfies the predicate
double flat_edge(const exprdsl::Expr& phi, double lo, double hi, double v,
                 bool inside_lo) {
  auto inside = [&](double x) { return std::fabs(phi.eval(x) - v) <= kFlatGap; };
  for (int it = 0; it < 200 && hi - lo > kXTol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (inside(mid) == inside_lo)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double invert_on_piece(const exprdsl::Expr& phi, const MonotonePiece& p,
                       double y) {
  double lo = p.a, hi = p.b;
  bool inc = p.kind == PieceKind::Increasing;
  if (y <= p.ylo()) return inc ? p.a : p.b;
  if (y >= p.yhi()) return inc ? p.b : p.a;
  for (int it = 0; it < 200 && hi - lo > kInvertTol; ++it) {
    double mid = 0.5 * (lo + hi);
    if ((phi.eval(mid) < y) == inc)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Central difference with a stencil that shrinks near the piece ends instead
// of clipping: at a fold (phi' -> 0 at the end) a clipped one-sided stencil
// of fixed width reads the curvature as slope and caps the density around
// 1e6, silently deleting ~5e-7 of mass per fold.  Shrinking keeps the
// difference centered, which cancels the curvature term.  The stencil stays
// well inside the distance t to the end: with h ~ t a square-root blowup of
// phi' at the end (a cusp fold) biases the difference by sqrt(2), shaving
// mass off the density there; at h = t/32 that bias is ~1e-4.
double slope_on_piece(const exprdsl::Expr& phi, const MonotonePiece& p,
                      double x) {
  double t = std::min(x - p.a, p.b - x);
  double h = std::min(kDiffStep, t / 32.0);
  double x1 = x - h, x2 = x + h;
  if (!(h > 1e-13) || x1 < p.a || x2 > p.b) {  // at (or past) an end
    x1 = std::max(p.a, x - kDiffStep);
    x2 = std::min(p.b, x + kDiffStep);
    if (x2 - x1 < kInvertTol) {
      x1 = p.a;
      x2 = p.b;
    }
  }
  return (phi.eval(x2) - phi.eval(x1)) / (x2 - x1);
}

struct Run {
  int sign;       // +1 / -1 / 0
  int first_gap;  // inclusive
  int last_gap;   // inclusive
};

}  // namespace

MonotonePartition auto_partition(const exprdsl::Expr& phi, int samples) {
  if (phi.empty()) throw std::invalid_argument("empty symbol");
  if (samples < 16) throw std::invalid_argument("need at least 16 samples");

  const int n = samples;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = static_cast<double>(i) / (n - 1);
    ys[i] = phi.eval(xs[i]);
    if (!(ys[i] >= -kRangeSlack && ys[i] <= 1.0 + kRangeSlack)) {
      std::ostringstream os;
      os << "symbol leaves [0,1]: phi(" << xs[i] << ") = " << ys[i];
      throw std::domain_error(os.str());
    }
  }

  std::vector<int> sign(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    double d = ys[i + 1] - ys[i];
    sign[i] = d > kFlatGap ? 1 : (d < -kFlatGap ? -1 : 0);
  }

  // run-length encode; flat runs shorter than 3 gaps are sampling artifacts
  // near an extremum and get absorbed into the transition around them
  std::vector<Run> runs;
  for (int i = 0; i + 1 < n;) {
    int j = i;
    while (j + 1 < n && sign[j] == sign[i]) ++j;
    runs.push_back({sign[i], i, j - 1});
    i = j;
  }
  std::vector<Run> kept;
  for (const Run& r : runs) {
    if (r.sign == 0 && r.last_gap - r.first_gap + 1 < 3 && !runs.empty() &&
        runs.size() > 1)
      continue;
    if (!kept.empty() && kept.back().sign == r.sign) {
      bool mergeable = true;
      if (r.sign == 0) {
        // two flat stretches merge only at the same level
        double va = ys[kept.back().first_gap];
        double vb = ys[r.first_gap];
        mergeable = std::fabs(va - vb) <= 10 * kFlatGap;
      }
      if (mergeable) {
        kept.back().last_gap = r.last_gap;
        continue;
      }
    }
    kept.push_back(r);
  }
  if (kept.empty()) kept.push_back({0, 0, n - 2});

  int changes = 0;
  int prev = 0;
  for (const Run& r : kept)
    if (r.sign != 0) {
      if (prev != 0 && r.sign != prev) ++changes;
      prev = r.sign;
    }
  if (changes > 64)
    throw std::runtime_error(
        "auto-partition found more than 64 monotonicity changes; "
        "provide an explicit partition");

  // refine the boundary between consecutive runs
  std::vector<double> cuts{0.0};
  for (std::size_t k = 0; k + 1 < kept.size(); ++k) {
    const Run& r1 = kept[k];
    const Run& r2 = kept[k + 1];
    double lo = xs[r1.last_gap];          // inside r1
    double hi = xs[r2.first_gap + 1];     // inside r2
    double u;
    if (r1.sign != 0 && r2.sign != 0) {
      u = golden_extremum(phi, lo, hi, r1.sign > 0);
    } else if (r2.sign == 0) {  // monotone (or head) into a flat stretch
      double v = ys[r2.first_gap];
      u = flat_edge(phi, lo, hi, v, false);
    } else {  // flat stretch into monotone
      double v = ys[r1.first_gap];
      u = flat_edge(phi, lo, hi, v, true);
    }
    cuts.push_back(u);
  }
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());

  MonotonePartition part;
  for (std::size_t k = 0; k + 1 < cuts.size() && k < kept.size(); ++k) {
    double a = cuts[k], b = cuts[k + 1];
    if (b - a < 1e-12) continue;
    MonotonePiece p;
    p.a = a;
    p.b = b;
    int s = kept[k].sign;
    p.kind = s > 0 ? PieceKind::Increasing
                   : (s < 0 ? PieceKind::Decreasing : PieceKind::Constant);
    if (p.kind == PieceKind::Constant) {
      double v = clamp01(phi.eval(0.5 * (a + b)));
      p.ya = p.yb = v;
    } else {
      p.ya = clamp01(phi.eval(a));
      p.yb = clamp01(phi.eval(b));
    }
    part.pieces.push_back(p);
  }
  if (part.pieces.empty())
    throw std::runtime_error("auto-partition produced no pieces");
  return part;
}

std::vector<double> expr_breakpoints(const exprdsl::Expr& e) {
  std::vector<double> out;
  if (e.empty()) return out;
  std::function<void(const exprdsl::Node&)> walk =
      [&](const exprdsl::Node& n) {
        for (const auto& [cond, body] : n.branches) {
          out.push_back(cond.a);
          if (cond.kind == exprdsl::Condition::Kind::InRange)
            out.push_back(cond.b);
          walk(*body);
        }
        if (n.otherwise) walk(*n.otherwise);
        if (n.lhs) walk(*n.lhs);
        if (n.rhs) walk(*n.rhs);
      };
  walk(*e.root());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Measure Measure::lebesgue() { return from_density(exprdsl::Expr::parse("1")); }

Measure Measure::from_density(exprdsl::Expr density) {
  return literal(std::move(density), {});
}

Measure Measure::from_density(const std::string& text) {
  return from_density(exprdsl::Expr::parse(text));
}

Measure Measure::from_atoms(std::vector<Atom> atoms) {
  return literal(std::nullopt, std::move(atoms));
}

Measure Measure::literal(std::optional<exprdsl::Expr> density,
                         std::vector<Atom> atoms) {
  if (!density && atoms.empty())
    throw std::invalid_argument("measure needs a density or atoms");
  if (density) {
    if (density->empty()) throw std::invalid_argument("empty density");
    for (int i = 0; i <= 1000; ++i) {
      double x = i / 1000.0;
      double v = density->eval(x);
      if (!std::isfinite(v) && (i == 0 || i == 1000)) continue;  // endpoint pole
      if (!(v >= -1e-12)) {
        std::ostringstream os;
        os << "density is negative at x = " << x << " (value " << v << ")";
        throw std::invalid_argument(os.str());
      }
    }
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& at = atoms[i];
    if (!(at.pos >= 0.0 && at.pos <= 1.0))
      throw std::invalid_argument("atom position outside [0,1]");
    if (!(at.mass > 0.0)) throw std::invalid_argument("atom mass must be > 0");
    for (std::size_t j = 0; j < i; ++j)
      if (atoms[j].pos == at.pos)
        throw std::invalid_argument("atom positions must be distinct");
  }
  Measure mu;
  mu.density_ = std::move(density);
  mu.atoms_ = std::move(atoms);
  double total = mu.total_mass();
  if (!std::isfinite(total) || total > 1e12)
    throw std::invalid_argument("measure has no finite total mass");
  return mu;
}

Measure Measure::pullback(exprdsl::Expr phi) {
  MonotonePartition part = auto_partition(phi);
  return pullback(std::move(phi), std::move(part));
}

Measure Measure::pullback(exprdsl::Expr phi, MonotonePartition partition) {
  if (phi.empty()) throw std::invalid_argument("empty symbol");
  if (partition.pieces.empty())
    throw std::invalid_argument("partition has no pieces");
  Measure mu;
  // constant pieces carry their length as an atom at the constant value
  for (const MonotonePiece& p : partition.pieces) {
    if (p.kind != PieceKind::Constant) continue;
    double v = p.ya;
    double mass = p.b - p.a;
    bool merged = false;
    for (Atom& at : mu.atoms_)
      if (std::fabs(at.pos - v) <= 10 * kFlatGap) {
        at.mass += mass;
        merged = true;
        break;
      }
    if (!merged) mu.atoms_.push_back({v, mass});
  }
  mu.phi_ = std::move(phi);
  mu.partition_ = std::move(partition);
  return mu;
}

Measure Measure::scaled(const Measure& mu, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw std::invalid_argument("scale factor must be positive and finite");
  Measure out = mu;
  out.scale_ *= factor;
  out.moment_cache_.clear();  // cached values baked in the old scale
  return out;
}

const MonotonePartition& Measure::partition() const {
  if (!is_pullback())
    throw std::logic_error("literal measures carry no partition");
  return partition_;
}

std::vector<Atom> Measure::atoms() const {
  std::vector<Atom> out = atoms_;
  for (Atom& at : out) at.mass *= scale_;
  return out;
}

double Measure::density(double y) const {
  if (is_pullback()) {
    double h = 0.0;
    for (const MonotonePiece& p : partition_.pieces) {
      if (p.kind == PieceKind::Constant) continue;
      if (y < p.ylo() - kFlatGap || y > p.yhi() + kFlatGap) continue;
      double x = invert_on_piece(*phi_, p, y);
      double s = std::fabs(slope_on_piece(*phi_, p, x));
      h += 1.0 / std::max(s, 1e-12);
    }
    return scale_ * h;
  }
  if (!density_) return 0.0;
  return scale_ * density_->eval(y);
}

std::vector<double> Measure::quad_breakpoints() const {
  std::vector<double> cuts;
  if (is_pullback()) {
    for (const MonotonePiece& p : partition_.pieces) {
      if (p.kind == PieceKind::Constant) continue;
      cuts.push_back(p.ylo());
      cuts.push_back(p.yhi());
    }
  } else if (density_) {
    cuts = expr_breakpoints(*density_);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

double Measure::moment(double s, double tol) const {
  if (!(s >= 0.0)) throw std::invalid_argument("moment order must be >= 0");
  const double eff = tol > 0.0 ? tol : quad::default_tolerance();
  auto hit = moment_cache_.find(s);
  if (hit != moment_cache_.end() && hit->second.second <= eff)
    return hit->second.first;
  const double v = integrate_against(
      [s](double y) { return s == 0.0 ? 1.0 : std::pow(y, s); }, {}, eff);
  moment_cache_[s] = {v, eff};
  return v;
}

double Measure::integrate_against(const std::function<double(double)>& g,
                                  const std::vector<double>& g_breakpoints,
                                  double tol) const {
  double total = 0.0;
  bool has_ac = is_pullback()
                    ? std::any_of(partition_.pieces.begin(),
                                  partition_.pieces.end(),
                                  [](const MonotonePiece& p) {
                                    return p.kind != PieceKind::Constant;
                                  })
                    : density_.has_value();
  if (has_ac) {
    std::vector<double> cuts = quad_breakpoints();
    cuts.insert(cuts.end(), g_breakpoints.begin(), g_breakpoints.end());
    quad::Options opt;
    if (tol > 0.0) opt.tol = tol;
    total += quad::integrate([&](double y) { return g(y) * density(y); }, 0.0,
                             1.0, cuts, opt);
  }
  for (const Atom& at : atoms_) total += scale_ * at.mass * g(at.pos);
  return total;
}

double Measure::tail_mass(double eps) const {
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::invalid_argument("tail width must lie in (0, 1]");
  double cut = 1.0 - eps;
  double total = 0.0;
  if (is_pullback()) {
    // measure the preimage of [1-eps, 1] piece by piece
    for (const MonotonePiece& p : partition_.pieces) {
      if (p.kind == PieceKind::Constant) continue;  // handled as atoms
      if (p.yhi() < cut) continue;
      if (p.ylo() >= cut) {
        total += p.b - p.a;
        continue;
      }
      double x = invert_on_piece(*phi_, p, cut);
      total += p.kind == PieceKind::Increasing ? p.b - x : x - p.a;
    }
  } else if (density_) {
    if (cut < 1.0) {
      std::vector<double> cuts = quad_breakpoints();
      total += quad::integrate([&](double y) { return density_->eval(y); },
                               cut, 1.0, cuts);
    }
  }
  for (const Atom& at : atoms_)
    if (at.pos >= cut) total += at.mass;
  return scale_ * total;
}

double Measure::mass_at_one() const {
  double m = 0.0;
  for (const Atom& at : atoms_)
    if (at.pos > 1.0 - 1e-12) m += at.mass;
  return scale_ * m;
}

double Measure::support_upper_bound() const {
  double bound = 0.0;
  for (const Atom& at : atoms_) bound = std::max(bound, at.pos);
  if (is_pullback()) {
    for (const MonotonePiece& p : partition_.pieces)
      bound = std::max(bound, p.yhi());
    return bound;
  }
  if (density_) {
    const int n = 4096;
    for (int i = n; i >= 0; --i) {  // top-down, early exit at the first mass
      const double y = static_cast<double>(i) / n;
      double d;
      try {
        d = density_->eval(y);
      } catch (const std::exception&) {
        continue;  // non-finite endpoint of a singular density
      }
      if (std::isfinite(d) && d > 1e-12) {
        bound = std::max(bound, std::min(1.0, y + 1.0 / n));
        break;
      }
    }
  }
  return bound;
}

std::string Measure::describe() const {
  std::ostringstream os;
  if (is_pullback()) {
    os << "pullback(" << (phi_->source().empty() ? phi_->print() : phi_->source())
       << ")";
  } else {
    os << "literal(";
    if (density_)
      os << "density "
         << (density_->source().empty() ? density_->print() : density_->source());
    if (!atoms_.empty()) {
      if (density_) os << ", ";
      os << atoms_.size() << " atom" << (atoms_.size() == 1 ? "" : "s");
    }
    os << ")";
  }
  if (scale_ != 1.0) os << " * " << scale_;
  return os.str();
}

TailProfile sublinearity_profile(const Measure& mu,
                                 std::vector<double> eps_grid) {
  if (eps_grid.empty())
    for (int j = 1; j <= 16; ++j) eps_grid.push_back(std::ldexp(1.0, -j));
  if (eps_grid.size() < 8)
    throw std::invalid_argument("profile grid needs at least 8 points");
  for (double e : eps_grid)
    if (!(e > 0.0 && e <= 1.0))
      throw std::invalid_argument("profile grid must lie in (0, 1]");
  std::sort(eps_grid.rbegin(), eps_grid.rend());

  TailProfile tp;
  tp.eps = eps_grid;
  // quadrature noise (~1e-10 absolute) must read as an empty tail, or
  // compactly supported measures would show phantom ratio growth
  double floor = std::max(1e-12, 1e-8 * mu.total_mass());
  for (double e : eps_grid) {
    double m = mu.tail_mass(e);
    if (m < floor) m = 0.0;
    tp.mass.push_back(m);
    tp.ratio.push_back(m / e);
  }
  tp.sup_ratio = *std::max_element(tp.ratio.begin(), tp.ratio.end());

  const std::size_t n = eps_grid.size();
  const std::size_t half = n / 2;

  // fit log(mass) = alpha*log(eps) + log(C) over the smallest-eps half
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t k = half; k < n; ++k) {
    if (!(tp.mass[k] > 0.0)) continue;
    double lx = std::log(tp.eps[k]);
    double ly = std::log(tp.mass[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  bool all_zero =
      std::all_of(tp.mass.begin(), tp.mass.end(), [](double m) { return m == 0.0; });
  if (all_zero) {
    tp.alpha = std::numeric_limits<double>::infinity();
    tp.C = 0.0;
    tp.sublinear = true;
    tp.vanishing = true;
    tp.alpha_sublinear = true;
    return tp;
  }
  if (cnt >= 2 && sxx * cnt - sx * sx > 0) {
    tp.alpha = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    tp.C = std::exp((sy - tp.alpha * sx) / cnt);
  } else {
    tp.alpha = std::numeric_limits<double>::infinity();
    tp.C = 0.0;
  }

  // bounded-ratio proxy: the small-eps half must not climb past the
  // large-eps half
  double max_large = 0.0, max_small = 0.0;
  for (std::size_t k = 0; k < half; ++k) max_large = std::max(max_large, tp.ratio[k]);
  for (std::size_t k = half; k < n; ++k) max_small = std::max(max_small, tp.ratio[k]);
  tp.sublinear = max_small <= 1.05 * max_large + 1e-300;

  std::size_t q = n - n / 4;
  bool mono = true;
  for (std::size_t k = q; k + 1 < n; ++k)
    if (tp.ratio[k + 1] > tp.ratio[k] * (1.0 + 1e-12) + 1e-300) mono = false;
  tp.vanishing = mono && tp.ratio.back() < 0.1 * tp.ratio.front();
  tp.alpha_sublinear = tp.alpha > 1.05;
  return tp;
}

PushforwardCheck pushforward_identity_check(const exprdsl::Expr& phi,
                                            const exprdsl::Expr& g, int n_mc) {
  if (phi.empty() || g.empty()) throw std::invalid_argument("empty expression");
  for (int i = 0; i <= 1000; ++i) {
    double v = g.eval(i / 1000.0);
    if (!(v >= -1e-12))
      throw std::invalid_argument("test function must be nonnegative on [0,1]");
  }
  Measure mu = Measure::pullback(phi);

  std::vector<double> xcuts = expr_breakpoints(phi);
  for (const MonotonePiece& p : mu.partition().pieces) {
    xcuts.push_back(p.a);
    xcuts.push_back(p.b);
  }
  PushforwardCheck out;
  out.lhs = quad::integrate([&](double x) { return g.eval(clamp01(phi.eval(x))); },
                            0.0, 1.0, xcuts);
  out.rhs = mu.integrate_against([&](double y) { return g.eval(clamp01(y)); },
                                 expr_breakpoints(g));
  out.gap = std::fabs(out.lhs - out.rhs);
  if (n_mc > 0) {
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double acc = 0.0;
    for (int i = 0; i < n_mc; ++i) acc += g.eval(clamp01(phi.eval(uni(rng))));
    out.mc = acc / n_mc;
  } else {
    out.mc = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace muntz::measure
