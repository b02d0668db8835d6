#pragma once

#include <functional>

#include "core/vec.hpp"

namespace slg {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    long long evals = 0;
    bool converged = false;
};

using Fn1 = std::function<double(double)>;

// Adaptive Gauss-Kronrod 7/15 with worst-interval bisection.
QuadResult integrate(const Fn1& f, double a, double b, double rel_tol = 1e-10,
                     double abs_tol = 1e-300, int max_intervals = 4096);

// Iterated adaptive quadrature over a box (2 or 3 dims).  Inner dimensions
// use a looser tolerance; fine for the smoke-scale integrability probes.
QuadResult integrate_box(const std::function<double(Span)>& f, Span lo, Span hi,
                         double rel_tol = 1e-7, int max_intervals = 512);

// Fixed-panel 15-point rule accumulated in log space: returns
// log of integral of exp(logf) over [a,b].  Used where the integrand spans
// hundreds of e-folds and adaptivity is pointless.
double log_integrate_panels(const std::function<double(double)>& logf, double a, double b,
                            int n_panels);

// Tensor version over a rectangle.
double log_integrate_panels_2d(const std::function<double(double, double)>& logf, double ax,
                               double bx, double ay, double by, int nx, int ny);

}  // namespace slg
