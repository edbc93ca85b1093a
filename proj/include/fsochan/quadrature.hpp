#pragma once

#include <functional>
#include <vector>

namespace fsochan {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

// Adaptive Gauss-Kronrod (G15/K31) on [a,b], split at `breaks` (sorted,
// interior points). Throws NumericalError when the estimated relative error
// exceeds rel_tol. max_depth caps the bisection depth per piece.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, const std::vector<double>& breaks = {},
                     unsigned max_depth = 15);

// Geometric break points a*ratio^k inside (a_min, b): useful when the
// integrand varies on a scale set by a small length near the left end.
std::vector<double> log_breaks(double first, double b, double ratio = 10.0);

}  // namespace fsochan
