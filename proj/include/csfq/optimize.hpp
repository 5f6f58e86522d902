#pragma once

#include <Eigen/Dense>
#include <functional>

namespace csfq {

struct SimplexOptions {
  int max_iter = 500;          // objective evaluations budget is ~2x this
  double ftol_rel = 1e-6;      // relative spread of simplex values
  double xtol_abs = 0.0;       // optional absolute simplex size tolerance
  double initial_step = 0.1;   // relative step per coordinate (absolute if x0=0)
};

struct SimplexResult {
  Eigen::VectorXd x;
  double fval = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead downhill simplex. Deterministic for a given start point.
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x0,
                          const SimplexOptions& opts = {});

// Golden-section minimum of a unimodal f on [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double xtol);

// Bisection root of f on [a, b]; requires a sign change, throws
// BracketingFailure otherwise.
double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double xtol);

}  // namespace csfq
