#pragma once

#include <functional>

namespace csfq {

// Adaptive Gauss-Kronrod 7-15 on [a, b]. Throws QuadratureFailure if the
// subdivision budget is exhausted before reaching the tolerance.
double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double abs_tol, double rel_tol = 1e-10,
                   int max_intervals = 20000);

// Fixed composite 12-point Gauss-Legendre over n_panels equal panels.
// For integrands whose oscillation scale the caller knows.
double panel_gauss(const std::function<double(double)>& f, double a, double b,
                   int n_panels);

}  // namespace csfq
