// Adaptive quadrature on finite intervals.
//
// The integrands that show up here are smooth except for endpoint
// singularities of the form y^{-1/2} (integrable) and isolated kinks; the
// adaptive Simpson rule with a Richardson correction grades the mesh toward
// those points on its own.  Known discontinuity locations can be passed as
// breakpoints so the interval is split exactly there.
#pragma once

#include <functional>
#include <vector>

namespace muntz::quad {

// 1e-10 unless the MUNTZ_QUAD_TOL environment variable overrides it
double default_tolerance();

// Process-wide override consulted before the environment variable (the job
// runner's tolerances block).  tol <= 0 clears it.
void set_tolerance_override(double tol);

struct Options {
  double tol;           // absolute tolerance
  int max_depth = 60;   // bisection depth cap (graded mesh near singularities)
  Options() : tol(default_tolerance()) {}
};

double integrate(const std::function<double(double)>& f, double a, double b,
                 Options opt = {});

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::vector<double> breakpoints, Options opt = {});

}  // namespace muntz::quad
