#include <doctest.h>

#include <cmath>

#include "csfq/multilevel.hpp"
#include "csfq/rng.hpp"
#include "device_fixture.hpp"

using namespace csfq;

namespace {

// Table of measured rates at the symmetry point (1/s).
RateMatrix symmetry_rates() {
  RateMatrix r;
  r.gamma(0, 1) = 1.4e3;
  r.gamma(1, 0) = 29.5e3;
  r.gamma(1, 2) = 8.8;
  r.gamma(2, 1) = 124.3e3;
  r.gamma(0, 2) = 0.1;
  r.gamma(2, 0) = 27.8e3;
  return r;
}

// Device transition frequencies at the symmetry point (rad/s).
constexpr double w01 = 2 * pi * 1.711351e9;
constexpr double w12 = 2 * pi * 5.402216e9;
constexpr double w02 = 2 * pi * 7.113567e9;

}  // namespace

TEST_CASE("generator columns sum to zero and evolution starts at identity") {
  const RateMatrix r = symmetry_rates();
  const Eigen::Matrix3d g = r.generator();
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(g.col(j).sum()) < 1e-9 * g.cwiseAbs().maxCoeff());
  PopulationVector p0;
  p0.p << 0.2, 0.3, 0.5;
  const auto p = evolve_populations(r, p0, 0.0);
  CHECK((p.p - p0.p).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cascade through level 1 is non-monotone (dense-grid oracle)") {
  const RateMatrix r = symmetry_rates();
  PopulationVector p0;
  p0.p << 0, 0, 1;

  // independent oracle: RK4 on dp/dt = G p with a fine step
  const Eigen::Matrix3d g = r.generator();
  Eigen::Vector3d p = p0.p;
  const double t_end = 60e-6;
  const int steps = 60000;
  const double h = t_end / steps;
  double p1_max = 0;
  int argmax = 0;
  std::vector<double> p1_oracle;
  for (int s = 0; s <= steps; ++s) {
    if (s % 1000 == 0) {
      p1_oracle.push_back(p[1]);
      if (p[1] > p1_max) {
        p1_max = p[1];
        argmax = static_cast<int>(p1_oracle.size()) - 1;
      }
    }
    const Eigen::Vector3d k1 = g * p;
    const Eigen::Vector3d k2 = g * (p + 0.5 * h * k1);
    const Eigen::Vector3d k3 = g * (p + 0.5 * h * k2);
    const Eigen::Vector3d k4 = g * (p + h * k3);
    p += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  // rises then falls
  CHECK(argmax > 0);
  CHECK(argmax < static_cast<int>(p1_oracle.size()) - 1);
  CHECK(p1_max > p1_oracle.front());
  CHECK(p1_max > p1_oracle.back());

  // the generator exponential agrees with the oracle on the same grid
  for (std::size_t i = 0; i < p1_oracle.size(); i += 12) {
    const double t = 1000.0 * i * h;
    const auto pv = evolve_populations(r, p0, t);
    CHECK(pv.p[1] == doctest::Approx(p1_oracle[i]).epsilon(1e-6));
  }
}

TEST_CASE("late-time state is the generator's stationary vector") {
  const RateMatrix r = symmetry_rates();
  PopulationVector p0;
  p0.p << 0, 0, 1;
  const auto late = evolve_populations(r, p0, 5.0);  // seconds; fully settled
  const auto stat = stationary_populations(r);
  CHECK((late.p - stat.p).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("evolution preserves the probability simplex") {
  Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    RateMatrix r;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if (j != k) r.gamma(j, k) = 1e5 * rng.uniform();
    PopulationVector p0;
    Eigen::Vector3d raw(rng.uniform(), rng.uniform(), rng.uniform());
    p0.p = raw / raw.sum();
    for (double t : {1e-7, 1e-5, 1e-3, 1e-1}) {
      const auto p = evolve_populations(r, p0, t);
      CHECK(p.p.minCoeff() >= 0.0);
      CHECK(p.p.maxCoeff() <= 1.0);
      CHECK(std::abs(p.p.sum() - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("boltzmann-constrained generator settles to gibbs weights") {
  const double temp = 0.027;
  const RateMatrix r =
      boltzmann_rate_matrix(29.5e3, 1.4e3, 124.3e3, 27.8e3, w12, w02, temp);
  // detailed-balance ratios by construction
  CHECK(r.gamma(1, 2) / r.gamma(2, 1) ==
        doctest::Approx(std::exp(-k_hbar * w12 / (k_boltzmann * temp)))
            .epsilon(1e-12));
  const auto stat = stationary_populations(r);
  // Gibbs weights at the pair frequencies; note the 0-1 ratio is set by the
  // supplied gamma01/gamma10, so use their implied temperature for level 1
  const double b01 = r.gamma(0, 1) / r.gamma(1, 0);
  const double b02 = r.gamma(0, 2) / r.gamma(2, 0);
  Eigen::Vector3d gibbs(1.0, b01, b02);
  gibbs /= gibbs.sum();
  CHECK((stat.p - gibbs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fit_relaxation round-trips the measured rate sets") {
  struct Case {
    double g10, g01, g21, g20, temp;
  };
  // symmetry point and 0.501 Phi0; temperatures implied by the 0-1 ratios
  for (const Case& c : {Case{29.5e3, 1.4e3, 124.3e3, 27.8e3, 0.0269},
                        Case{63.4e3, 1.2e3, 78.1, 61.1e3, 0.0207}}) {
    const RateMatrix truth = boltzmann_rate_matrix(c.g10, c.g01, c.g21, c.g20,
                                                   w12, w02, c.temp);
    PopulationTrace trace;
    const int m = 60;
    trace.times.resize(m);
    trace.populations.resize(m, 3);
    PopulationVector p0;
    p0.p << 0, 0, 1;
    // sample out to several of the slowest relevant timescale
    const double t_end = 80e-6;
    for (int i = 0; i < m; ++i) {
      trace.times[i] = t_end * i / (m - 1);
      trace.populations.row(i) =
          evolve_populations(truth, p0, trace.times[i]).p.transpose();
    }
    const RelaxationFit fit =
        fit_relaxation(trace, c.g10, c.g01, c.temp, w12, w02);
    CHECK(fit.gamma21 == doctest::Approx(c.g21).epsilon(0.01));
    CHECK(fit.gamma20 == doctest::Approx(c.g20).epsilon(0.01));
    CHECK(fit.rms < 1e-6);
    CHECK(fit.converged);
  }
}

TEST_CASE("thermal population and effective temperature") {
  CHECK(thermal_population(0.95, 0.05) == doctest::Approx(0.95));
  CHECK(thermal_population(1.0, 0.0) == 1.0);
  CHECK(thermal_population(0.3, 0.3) == doctest::Approx(0.5));
  CHECK_THROWS_AS(thermal_population(0.0, 0.0), BothZero);

  const double t95 = effective_temperature(0.95, w01);
  CHECK(t95 > 0.027);
  CHECK(t95 < 0.032);
  // ratio e^-1 closed form
  const double p_e = 1.0 / (1.0 + std::exp(-1.0));
  CHECK(effective_temperature(p_e, w01) ==
        doctest::Approx(k_hbar * w01 / k_boltzmann).epsilon(1e-9));
  // p -> 1 sends T -> 0
  CHECK(effective_temperature(1.0 - 1e-12, w01) < 0.004);
  CHECK_THROWS_AS(effective_temperature(0.4, w01), OutOfDomain);
  CHECK_THROWS_AS(effective_temperature(1.0, w01), OutOfDomain);
}

TEST_CASE("readout calibration") {
  // ideal basis states return the measured voltages directly
  std::vector<Preparation> preps(3);
  preps[0].populations.p << 1, 0, 0;
  preps[0].voltage = 1.1;
  preps[1].populations.p << 0, 1, 0;
  preps[1].voltage = -0.4;
  preps[2].populations.p << 0, 0, 1;
  preps[2].voltage = 0.25;
  const auto cal = readout_calibrate(preps);
  CHECK(cal.v0 == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(cal.v1 == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(cal.v2 == doctest::Approx(0.25).epsilon(1e-12));

  // five mixed preparations, exact recovery
  Rng rng(3);
  std::vector<Preparation> mixed;
  for (int i = 0; i < 5; ++i) {
    Preparation pr;
    Eigen::Vector3d raw(0.2 + rng.uniform(), 0.2 + rng.uniform(),
                        0.2 + rng.uniform());
    pr.populations.p = raw / raw.sum();
    pr.voltage =
        pr.populations.p.dot(Eigen::Vector3d(cal.v0, cal.v1, cal.v2));
    mixed.push_back(pr);
  }
  const auto cal2 = readout_calibrate(mixed);
  CHECK(cal2.v0 == doctest::Approx(cal.v0).epsilon(1e-9));
  CHECK(cal2.v1 == doctest::Approx(cal.v1).epsilon(1e-9));
  CHECK(cal2.v2 == doctest::Approx(cal.v2).epsilon(1e-9));

  // degenerate preparations
  std::vector<Preparation> dup(3, preps[0]);
  CHECK_THROWS_AS(readout_calibrate(dup), SingularSystem);
  CHECK_THROWS_AS(readout_calibrate({preps[0], preps[1]}), SingularSystem);
}

TEST_CASE("multilevel ramsey: trivial and physical behavior") {
  RateMatrix zero;
  Eigen::Matrix3cd rho0 = Eigen::Matrix3cd::Zero();
  rho0(0, 0) = 0.5;
  rho0(1, 1) = 0.5;
  rho0(0, 1) = 0.5;
  rho0(1, 0) = 0.5;
  auto unity = [](double) { return 1.0; };
  const auto rho = multilevel_ramsey(zero, unity, unity, unity, rho0, 3e-6);
  CHECK(std::abs(rho(0, 1)) == doctest::Approx(0.5).epsilon(1e-12));

  // combined relaxation + gaussian dephasing stays physical and the 0-1
  // envelope crosses 1/e near the measured ramsey scale
  const RateMatrix rates = symmetry_rates();
  auto c01 = [](double t) { return std::exp(-std::pow(t / 4.7e-6, 2)); };
  auto c12 = [](double t) { return std::exp(-std::pow(t / 3.4e-6, 2)); };
  auto c02 = [](double t) { return std::exp(-std::pow(t / 5.4e-6, 2)); };
  double t_cross = 0;
  for (double t = 0; t < 12e-6; t += 0.05e-6) {
    const auto r = multilevel_ramsey(rates, c01, c12, c02, rho0, t);
    const auto p = r.diagonal().real();
    CHECK(std::abs(r(0, 1)) <= std::sqrt(p[0] * p[1]) + 1e-12);
    if (t_cross == 0 && std::abs(r(0, 1)) < 0.5 / std::exp(1.0)) t_cross = t;
  }
  CHECK(t_cross > 0.6 * 4.7e-6);
  CHECK(t_cross < 1.4 * 4.7e-6);

  CHECK_THROWS_AS(
      multilevel_ramsey(rates, unity, unity, unity,
                        Eigen::Matrix3cd::Identity(), 1e-6),
      UnphysicalInput);
}

TEST_CASE("ramsey envelopes for all three pairs decay on the fitted scales") {
  const RateMatrix rates = symmetry_rates();
  auto c01 = [](double t) { return std::exp(-std::pow(t / 4.7e-6, 2)); };
  auto c12 = [](double t) { return std::exp(-std::pow(t / 3.4e-6, 2)); };
  auto c02 = [](double t) { return std::exp(-std::pow(t / 5.4e-6, 2)); };
  Eigen::Matrix3cd rho01 = Eigen::Matrix3cd::Zero();
  rho01(0, 0) = rho01(1, 1) = 0.5;
  rho01(0, 1) = rho01(1, 0) = 0.5;
  Eigen::Matrix3cd rho12 = Eigen::Matrix3cd::Zero();
  rho12(1, 1) = rho12(2, 2) = 0.5;
  rho12(1, 2) = rho12(2, 1) = 0.5;
  Eigen::Matrix3cd rho02 = Eigen::Matrix3cd::Zero();
  rho02(0, 0) = rho02(2, 2) = 0.5;
  rho02(0, 2) = rho02(2, 0) = 0.5;

  auto cross = [&](const Eigen::Matrix3cd& rho0, int a, int b) {
    for (double t = 0; t < 12e-6; t += 0.02e-6) {
      const auto r = multilevel_ramsey(rates, c01, c12, c02, rho0, t);
      if (std::abs(r(a, b)) < 0.5 / std::exp(1.0)) return t;
    }
    return 12e-6;
  };
  // pure dephasing dominates; relaxation shortens the 1-2 envelope most
  CHECK(cross(rho01, 0, 1) == doctest::Approx(4.5e-6).epsilon(0.15));
  CHECK(cross(rho12, 1, 2) == doctest::Approx(3.0e-6).epsilon(0.20));
  CHECK(cross(rho02, 0, 2) == doctest::Approx(5.0e-6).epsilon(0.20));
}
