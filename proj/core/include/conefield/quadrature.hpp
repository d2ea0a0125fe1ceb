#pragma once

#include <functional>

namespace conefield {

/// Adaptive Gauss-Kronrod (G7/K15) integration with interval bisection.
/// Stops refining a panel once |K15 - G7| <= max(abs_tol_local, rel_tol*|I|).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol = 1e-13, int max_depth = 48);

}  // namespace conefield
