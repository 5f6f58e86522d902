#include <doctest.h>

#include <cmath>

#include "csfq/integrate.hpp"
#include "csfq/noise_mc.hpp"
#include "csfq/parallel.hpp"
#include "device_fixture.hpp"

using namespace csfq;

namespace {

PowerLawPSD device_flux_psd(double wmax = 2 * pi * 1e9) {
  PowerLawPSD psd;
  psd.a = device_a_phi;
  psd.alpha = device_alpha;
  psd.omega_min = 2 * pi * 1.0;
  psd.omega_max = wmax;
  return psd;
}

}  // namespace

TEST_CASE("R(0) equals the band-integrated power (independent quadrature)") {
  const auto psd = device_flux_psd(2 * pi * 1e6);
  const auto corr = correlation_from_psd(psd, 1e-7, 4);
  const double oracle =
      2.0 * adaptive_gk([&](double w) { return psd(w); }, psd.omega_min,
                        psd.omega_max, 0.0, 1e-12);
  CHECK(corr.m(0, 0) == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(corr.m(2, 2) == doctest::Approx(corr.m(0, 0)).epsilon(1e-12));
  CHECK(corr.m(0, 1) == doctest::Approx(corr.m(1, 2)).epsilon(1e-12));
}

TEST_CASE("near-white noise decorrelates fast relative to dt") {
  PowerLawPSD psd;
  psd.a = 1.0;
  psd.alpha = 0.02;
  psd.omega_min = 2 * pi * 1.0;
  psd.omega_max = 2 * pi * 1e8;  // band much wider than 1/dt
  const double dt = 1e-4;
  const auto corr = correlation_from_psd(psd, dt, 8);
  CHECK(std::abs(corr.m(0, 1)) < 1e-3 * corr.m(0, 0));
}

TEST_CASE("power-law covariance decays slower than an exponential") {
  const auto psd = device_flux_psd(2 * pi * 1e8);
  const double dt = 1e-8;
  const auto corr = correlation_from_psd(psd, dt, 12);
  // exponential extrapolation through lags 1 and 2
  const double r0 = corr.m(0, 0), r1 = corr.m(0, 1), r2 = corr.m(0, 2);
  CHECK(r1 > 0);
  CHECK(r2 > 0);
  const double decay = std::log(r1 / r2);  // per lag
  const double exp_extrapolated = r1 * std::exp(-9.0 * decay);
  CHECK(corr.m(0, 10) > 2.0 * exp_extrapolated);
}

TEST_CASE("identity covariance gives iid unit normals") {
  CorrelationMatrix m;
  m.m = Eigen::MatrixXd::Identity(16, 16);
  const auto batch = sample_trajectories(m, 4000, 5, 1e-6);
  const double mean = batch.values.mean();
  const double var = batch.values.array().square().mean();
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("sample covariance matches the target matrix") {
  const auto psd = device_flux_psd(2 * pi * 1e7);
  const int ns = 24;
  const auto corr = correlation_from_psd(psd, 2e-8, ns);
  const int ntraj = 4096;
  const auto batch = sample_trajectories(corr, ntraj, 11, 2e-8);
  const Eigen::MatrixXd sample =
      batch.values.transpose() * batch.values / double(ntraj);
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < ns; ++j) {
      const double se = std::sqrt((corr.m(i, i) * corr.m(j, j) +
                                   corr.m(i, j) * corr.m(i, j)) /
                                  ntraj);
      CHECK(std::abs(sample(i, j) - corr.m(i, j)) < 5.0 * se);
    }
  }
}

TEST_CASE("trajectory batches are bit-identical across seeds and threads") {
  CorrelationMatrix m;
  m.m = Eigen::MatrixXd::Identity(32, 32) * 2.5;
  set_default_thread_count(1);
  const auto a = sample_trajectories(m, 64, 99, 1e-6);
  set_default_thread_count(8);
  const auto b = sample_trajectories(m, 64, 99, 1e-6);
  set_default_thread_count(0);
  CHECK((a.values.array() == b.values.array()).all());
  const auto c = sample_trajectories(m, 64, 100, 1e-6);
  CHECK(!(a.values.array() == c.values.array()).all());
}

TEST_CASE("cpmg sign function integrates to zero for every N") {
  // continuous property of the pulse positions (k - 1/2) tau / N
  for (int n = 1; n <= 12; ++n) {
    const double tau = 1.0;
    double acc = 0, prev = 0, sign = 1;
    for (int k = 1; k <= n; ++k) {
      const double t = (k - 0.5) * tau / n;
      acc += sign * (t - prev);
      prev = t;
      sign = -sign;
    }
    acc += sign * (tau - prev);
    CHECK(std::abs(acc) < 1e-15);
  }
}

TEST_CASE("zero noise amplitude leaves full coherence") {
  PowerLawPSD psd = device_flux_psd();
  psd.a = 0.0;
  CouplingSpec lin;
  lin.kind = CouplingSpec::Kind::linear;
  lin.k1 = 1e12;
  const auto pt = mc_coherence(psd, lin, SequenceSpec{3}, 1e-6, 300, 17);
  CHECK(pt.coherence == 1.0);
  CHECK(pt.stderr_est == 0.0);
}

TEST_CASE("ramsey gaussian identity: |<e^{-i phi}>| = e^{-<phi^2>/2}") {
  const auto psd = device_flux_psd(2 * pi * 2e6);
  const int ns = 128;
  const double tau = 2e-6;
  const double dt = tau / ns;
  const auto corr = correlation_from_psd(psd, dt, ns);
  const auto batch = sample_trajectories(corr, 4096, 21, dt);
  CouplingSpec lin;
  lin.kind = CouplingSpec::Kind::linear;
  lin.k1 = device_sensitivity_0501;
  const auto pt = simulate_dephasing(batch, lin, SequenceSpec{0}, tau);
  // analytic oracle from the same covariance
  double quad = 0;
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j) quad += corr.m(i, j);
  const double expected =
      std::exp(-0.5 * lin.k1 * lin.k1 * dt * dt * quad);
  CHECK(std::abs(pt.coherence - expected) < 4.0 * pt.stderr_est + 1e-4);
}

TEST_CASE("coherence of exactly zero trajectories is one") {
  TrajectoryBatch batch;
  batch.dt = 1e-8;
  batch.n_samples = 64;
  batch.n_traj = 512;
  batch.values = Eigen::MatrixXd::Zero(512, 64);
  batch.seed = 0;
  CouplingSpec lin;
  lin.kind = CouplingSpec::Kind::linear;
  lin.k1 = 1e9;
  const auto pt = simulate_dephasing(batch, lin, SequenceSpec{4}, 64e-8);
  CHECK(pt.coherence == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("dephasing determinism across thread counts") {
  const auto psd = device_flux_psd();
  CouplingSpec lin;
  lin.kind = CouplingSpec::Kind::linear;
  lin.k1 = device_sensitivity_0501;
  set_default_thread_count(1);
  const auto a = mc_coherence(psd, lin, SequenceSpec{5}, 2e-6, 512, 7);
  set_default_thread_count(8);
  const auto b = mc_coherence(psd, lin, SequenceSpec{5}, 2e-6, 512, 7);
  set_default_thread_count(0);
  CHECK(a.coherence == b.coherence);  // bitwise
  CHECK(a.stderr_est == b.stderr_est);
  CHECK(!a.few_trajectories);
  const auto c = mc_coherence(psd, lin, SequenceSpec{5}, 2e-6, 128, 7);
  CHECK(c.few_trajectories);
}

TEST_CASE("monte carlo matches the quadrature coherence on a shared band") {
  // matched cutoffs: the quadrature uses the same quarter-Nyquist band the
  // sampler generates
  CouplingSpec lin;
  lin.kind = CouplingSpec::Kind::linear;
  lin.k1 = device_sensitivity_0501;
  for (int n : {1, 10}) {
    const double g = gamma_n(device_a_omega, device_alpha, n);
    for (double gt : {0.6, 1.0}) {
      const double tau = gt / g;
      const int ns = std::max(512, 32 * n);
      const double dt = tau / ns;
      PowerLawPSD banded = device_flux_psd();
      banded.omega_max = std::min(banded.omega_max, 0.25 * pi / dt);
      PowerLawPSD banded_omega = banded;
      banded_omega.a = device_a_omega;  // angular-frequency units
      const auto pt = mc_coherence(banded, lin, SequenceSpec{n}, tau, 1024, 3);
      const double cn = coherence_numeric(banded_omega, n, tau);
      CHECK(std::abs(pt.coherence - cn) < 3.0 * pt.stderr_est + 0.01);
    }
  }
}

TEST_CASE("frequency histogram moments") {
  CorrelationMatrix m;
  const int ns = 64;
  m.m = Eigen::MatrixXd::Identity(ns, ns) * 4.0;  // iid sigma = 2
  const auto batch = sample_trajectories(m, 2048, 31, 1e-8);

  CouplingSpec lin;
  lin.kind = CouplingSpec::Kind::linear;
  lin.k1 = 3e5;
  const auto hl = frequency_histogram(batch, lin, 40);
  // linear map of a gaussian: zero skewness within sampling error
  const double n_tot = 2048.0 * ns;
  CHECK(std::abs(hl.skewness) < 5.0 * std::sqrt(6.0 / n_tot) * 3.0);
  CHECK(hl.variance ==
        doctest::Approx(lin.k1 * lin.k1 * 4.0).epsilon(0.05));
  CHECK(hl.counts.sum() == doctest::Approx(n_tot));

  // doubling k1 doubles the spread, skewness unchanged
  CouplingSpec lin2 = lin;
  lin2.k1 *= 2;
  const auto hl2 = frequency_histogram(batch, lin2, 40);
  CHECK(std::sqrt(hl2.variance / hl.variance) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(hl2.skewness == doctest::Approx(hl.skewness).epsilon(1e-9));

  // quadratic coupling of gaussian noise: chi-square-like, skewness sqrt(8)
  CouplingSpec quad;
  quad.kind = CouplingSpec::Kind::quadratic;
  quad.k2 = 1e5;
  const auto hq = frequency_histogram(batch, quad, 40);
  CHECK(hq.skewness > 0.0);
  // direct-moment oracle for xi^2 of a centered gaussian
  CHECK(hq.skewness == doctest::Approx(std::sqrt(8.0)).epsilon(0.15));
  CHECK(hq.mean == doctest::Approx(quad.k2 * 4.0).epsilon(0.05));
  CHECK(hq.variance == doctest::Approx(2.0 * quad.k2 * quad.k2 * 16.0).epsilon(0.15));
}
