#include "csfq/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "csfq/errors.hpp"

namespace csfq {

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x0, const SimplexOptions& opts) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int i = 0; i < n; ++i) {
    double step = opts.initial_step * std::abs(x0[i]);
    if (step == 0.0) step = opts.initial_step;
    xs[i + 1][i] += step;
  }
  for (int i = 0; i <= n; ++i) fs[i] = f(xs[i]);

  std::vector<int> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fs[a] < fs[b]; });
  };

  SimplexResult result;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    sort_simplex();
    const int best = order[0], worst = order[n], second = order[n - 1];
    const double spread = std::abs(fs[worst] - fs[best]);
    const double scale = std::abs(fs[best]) + std::abs(fs[worst]) + 1e-300;
    bool fdone = spread <= opts.ftol_rel * scale;
    bool xdone = false;
    if (opts.xtol_abs > 0.0) {
      double d = 0.0;
      for (int i = 1; i <= n; ++i)
        d = std::max(d, (xs[order[i]] - xs[best]).cwiseAbs().maxCoeff());
      xdone = d <= opts.xtol_abs;
    }
    if (fdone || xdone) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += xs[i];
    centroid /= n;

    const Eigen::VectorXd xr = centroid + (centroid - xs[worst]);  // reflect
    const double fr = f(xr);
    if (fr < fs[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        xs[worst] = xe; fs[worst] = fe;
      } else {
        xs[worst] = xr; fs[worst] = fr;
      }
    } else if (fr < fs[second]) {
      xs[worst] = xr; fs[worst] = fr;
    } else {
      const bool outside = fr < fs[worst];
      const Eigen::VectorXd xc =
          centroid + 0.5 * ((outside ? xr : xs[worst]) - centroid);
      const double fc = f(xc);
      if (fc < std::min(fr, fs[worst])) {
        xs[worst] = xc; fs[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {  // shrink toward best
          if (i == best) continue;
          xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
          fs[i] = f(xs[i]);
        }
      }
    }
  }
  sort_simplex();
  result.x = xs[order[0]];
  result.fval = fs[order[0]];
  result.iterations = iter;
  return result;
}

double golden_min(const std::function<double(double)>& f, double a, double b,
                  double xtol) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double xtol) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0))
    throw BracketingFailure("root not bracketed");
  while (b - a > xtol) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m; fa = fm;
    } else {
      b = m; fb = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace csfq
