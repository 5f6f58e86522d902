#include <doctest.h>

#include <cmath>
#include <vector>

#include "csfq/integrate.hpp"
#include "csfq/optimize.hpp"
#include "csfq/parallel.hpp"
#include "csfq/errors.hpp"
#include "csfq/rng.hpp"

using namespace csfq;

TEST_CASE("rng streams are reproducible and decorrelated") {
  Rng a = Rng::stream(42, 7);
  Rng b = Rng::stream(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng c = Rng::stream(42, 8);
  int same = 0;
  Rng a2 = Rng::stream(42, 7);
  for (int i = 0; i < 64; ++i)
    if (a2.next_u64() == c.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("rng normal has unit variance") {
  Rng rng(123);
  const int n = 200000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s1 += x;
    s2 += x * x;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("parallel_for result does not depend on thread count") {
  std::vector<double> one(1000), eight(1000);
  parallel_for(1000, [&](std::size_t i) { one[i] = std::sin(0.1 * i); }, 1);
  parallel_for(1000, [&](std::size_t i) { eight[i] = std::sin(0.1 * i); }, 8);
  CHECK(one == eight);
}

TEST_CASE("adaptive quadrature on known integrals") {
  CHECK(adaptive_gk([](double x) { return std::sin(x); }, 0, pi, 1e-12) ==
        doctest::Approx(2.0).epsilon(1e-10));
  // integrable singularity-ish power law
  CHECK(adaptive_gk([](double x) { return 1.0 / std::sqrt(x); }, 1e-12, 1.0,
                    1e-9) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("panel quadrature handles oscillatory integrands") {
  // int_0^{20 pi} sin^2 = 10 pi
  const double v =
      panel_gauss([](double x) { return std::sin(x) * std::sin(x); }, 0,
                  20 * pi, 40);
  CHECK(v == doctest::Approx(10 * pi).epsilon(1e-12));
}

TEST_CASE("nelder-mead minimizes a quadratic and a rosenbrock") {
  Eigen::VectorXd x0(2);
  x0 << 4.0, -3.0;
  auto quad = [](const Eigen::VectorXd& x) {
    return (x[0] - 1) * (x[0] - 1) + 10 * (x[1] + 2) * (x[1] + 2);
  };
  SimplexOptions opts;
  opts.ftol_rel = 1e-14;
  opts.max_iter = 600;
  auto r = nelder_mead(quad, x0, opts);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-4));

  auto rosen = [](const Eigen::VectorXd& x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  x0 << -1.2, 1.0;
  opts.max_iter = 2000;
  r = nelder_mead(rosen, x0, opts);
  CHECK(r.fval < 1e-8);
}

TEST_CASE("golden section and bisection") {
  const double x =
      golden_min([](double t) { return (t - 0.3) * (t - 0.3); }, 0, 1, 1e-10);
  CHECK(x == doctest::Approx(0.3).epsilon(1e-7));
  const double r =
      bisect_root([](double t) { return t * t - 2.0; }, 0, 2, 1e-12);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK_THROWS_AS(bisect_root([](double t) { return t * t + 1; }, 0, 1, 1e-6),
                  BracketingFailure);
}
