// Finite positive Borel measures on [0,1] made of an absolutely continuous
// part (a density from the expression DSL) plus finitely many atoms, and the
// pullback of Lebesgue measure under a piecewise-monotone symbol phi.
//
// Pullback measures keep their density implicit: evaluating it at y root-
// solves phi(x) = y on every monotone piece and sums 1/|phi'(x_i)|.  Tail
// masses of pullbacks bypass the density entirely and measure the preimage
// interval directly, which stays robust where |phi'| -> 0 and the density
// blows up.  Constant pieces of phi turn into atoms.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "muntz/expr.hpp"

namespace muntz::measure {

struct Atom {
  double pos = 0.0;
  double mass = 0.0;
};

enum class PieceKind { Increasing, Decreasing, Constant };

struct MonotonePiece {
  double a = 0.0, b = 0.0;  // domain interval
  PieceKind kind = PieceKind::Constant;
  double ya = 0.0, yb = 0.0;  // phi(a), phi(b); equal for Constant
  double ylo() const { return ya < yb ? ya : yb; }
  double yhi() const { return ya < yb ? yb : ya; }
};

struct MonotonePartition {
  std::vector<MonotonePiece> pieces;
};

// Dense sampling (default 4096 points) classifies the sign runs of the
// increments, golden-section refines each interior extremum to xtol 1e-15,
// and constant stretches get their edges located by bisection.  Throws when
// phi leaves [0,1] on the grid or shows more than 64 monotonicity changes
// (supply an explicit partition in that case).
MonotonePartition auto_partition(const exprdsl::Expr& phi, int samples = 4096);

// thresholds of piecewise conditions, used to split quadrature intervals
std::vector<double> expr_breakpoints(const exprdsl::Expr& e);

class Measure {
 public:
  static Measure lebesgue();
  static Measure from_density(exprdsl::Expr density);
  static Measure from_density(const std::string& text);
  static Measure from_atoms(std::vector<Atom> atoms);
  static Measure literal(std::optional<exprdsl::Expr> density,
                         std::vector<Atom> atoms);
  static Measure pullback(exprdsl::Expr phi);
  static Measure pullback(exprdsl::Expr phi, MonotonePartition partition);
  static Measure scaled(const Measure& mu, double factor);

  bool is_pullback() const { return phi_.has_value(); }
  const MonotonePartition& partition() const;  // pullback only
  const std::optional<exprdsl::Expr>& density_expr() const { return density_; }
  const std::optional<exprdsl::Expr>& symbol() const { return phi_; }
  std::vector<Atom> atoms() const;  // effective (scaled) atoms
  double scale() const { return scale_; }

  // absolutely continuous part at y (0 where there is none)
  double density(double y) const;
  // integration splits for the density: piecewise thresholds, or the piece
  // image endpoints of a pullback
  std::vector<double> quad_breakpoints() const;

  // integral of x^s.  tol = 0 means the quadrature default; Gram assembly
  // passes tighter values because basis normalization amplifies entry errors
  // by up to 2*lambda_max + 1.  Results are cached per (s, tolerance won).
  double moment(double s, double tol = 0.0) const;
  double integrate_against(const std::function<double(double)>& g,
                           const std::vector<double>& g_breakpoints = {},
                           double tol = 0.0) const;
  double tail_mass(double eps) const;  // measure of [1-eps, 1]
  double total_mass() const { return tail_mass(1.0); }
  double mass_at_one() const;
  // Structural upper bound for the support: piece images and atom positions
  // for pullbacks, a top-down density grid scan for literal measures.
  // Deliberately not derived from tail_mass quadrature, whose noise floor
  // would make "support inside [0, 1-delta]" undecidable.
  double support_upper_bound() const;

  std::string describe() const;

 private:
  Measure() = default;

  std::optional<exprdsl::Expr> density_;
  std::vector<Atom> atoms_;  // unscaled
  std::optional<exprdsl::Expr> phi_;
  MonotonePartition partition_;
  double scale_ = 1.0;
  // s -> (value, tolerance it was computed at).  Plain map: instances are
  // cheap to build per job, so jobs do not share measures across threads.
  mutable std::map<double, std::pair<double, double>> moment_cache_;
};

struct TailProfile {
  std::vector<double> eps;    // descending grid
  std::vector<double> mass;   // mu([1-eps, 1])
  std::vector<double> ratio;  // mass / eps
  double sup_ratio = 0.0;
  double alpha = 0.0;  // log-log fit over the smallest half of the grid
  double C = 0.0;
  bool sublinear = false;
  bool vanishing = false;
  bool alpha_sublinear = false;  // alpha > 1.05
};

// empty grid picks 2^-1 .. 2^-16; a custom grid needs >= 8 points in (0,1]
TailProfile sublinearity_profile(const Measure& mu,
                                 std::vector<double> eps_grid = {});

struct PushforwardCheck {
  double lhs = 0.0;  // integral of g(phi(x)) dx
  double rhs = 0.0;  // integral of g against pullback(phi)
  double gap = 0.0;
  double mc = 0.0;  // Monte Carlo estimate of lhs (NaN when n_mc == 0)
};

PushforwardCheck pushforward_identity_check(const exprdsl::Expr& phi,
                                            const exprdsl::Expr& g,
                                            int n_mc = 0);

}  // namespace muntz::measure
