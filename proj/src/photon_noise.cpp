#include "csfq/photon_noise.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "csfq/optimize.hpp"
#include "csfq/parallel.hpp"
#include "csfq/rng.hpp"

namespace csfq {

void PhotonNoiseParams::validate() const {
  if (!(omega_r > 0)) throw ValidationError("omega_r must be > 0");
  if (!(q_factor > 0)) throw ValidationError("q_factor must be > 0");
  if (!(n_th >= 0)) throw ValidationError("n_th must be >= 0");
  if (!(chi >= 0)) throw ValidationError("chi must be >= 0");
}

double n_thermal(double temperature, double omega_r) {
  if (temperature < 0) throw ValidationError("temperature must be >= 0");
  if (temperature == 0.0) return 0.0;
  const double x = k_hbar * omega_r / (k_boltzmann * temperature);
  return 1.0 / std::expm1(x);
}

double temperature_for_occupancy(double n_th, double omega_r) {
  if (!(n_th > 0)) throw OutOfDomain("occupancy must be > 0");
  return k_hbar * omega_r / (k_boltzmann * std::log1p(1.0 / n_th));
}

namespace {

struct DwellWalker {
  // exact exponential dwell times for the two-state chain
  const PhotonNoiseParams& params;
  Rng& rng;
  int state;
  double t_next;  // absolute time of the next jump

  DwellWalker(const PhotonNoiseParams& p, Rng& r) : params(p), rng(r) {
    const double gu = params.rate_up(), gd = params.rate_down();
    const double p1 = gu + gd > 0 ? gu / (gu + gd) : 0.0;
    state = rng.uniform() < p1 ? 1 : 0;
    t_next = next_dwell(0.0);
  }
  double rate_out() const {
    return state == 1 ? params.rate_down() : params.rate_up();
  }
  double next_dwell(double now) {
    const double r = rate_out();
    if (r <= 0.0) return std::numeric_limits<double>::infinity();
    return now + rng.exponential(r);
  }
  // advance to absolute time t, flipping through any jumps before it
  void advance(double t) {
    while (t_next <= t) {
      state ^= 1;
      t_next = next_dwell(t_next);
    }
  }
};

}  // namespace

RtnTrajectory simulate_rtn(const PhotonNoiseParams& params, double duration,
                           double dt, std::uint64_t seed) {
  params.validate();
  if (!(dt > 0) || !(duration > 0))
    throw ValidationError("duration and dt must be > 0");
  const double max_rate = std::max(params.rate_up(), params.rate_down());
  if (dt * max_rate > 0.1)
    throw StepTooCoarse("dt too coarse for the telegraph rates");

  RtnTrajectory traj;
  traj.dt = dt;
  traj.seed = seed;
  const int n = int(std::floor(duration / dt));
  traj.states.resize(n);
  Rng rng(seed);
  DwellWalker w(params, rng);
  for (int i = 0; i < n; ++i) {
    w.advance((i + 0.5) * dt);  // bin centers
    traj.states[i] = static_cast<std::uint8_t>(w.state);
  }
  return traj;
}

CoherencePoint dephasing_decay(const PhotonNoiseParams& params,
                               const SequenceSpec& sequence, double tau,
                               int n_traj, std::uint64_t seed) {
  params.validate();
  if (!(tau > 0)) throw ValidationError("tau must be > 0");

  // CPMG sign flips at (k - 1/2) tau / N
  std::vector<double> flips;
  for (int k = 1; k <= sequence.n_pulses; ++k)
    flips.push_back((k - 0.5) * tau / sequence.n_pulses);
  flips.push_back(tau);

  std::vector<std::complex<double>> phases(n_traj);
  parallel_for(n_traj, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    DwellWalker w(params, rng);
    double phi = 0.0;
    double t = 0.0;
    double sign = 1.0;
    for (double t_flip : flips) {
      while (t < t_flip) {
        const double t_stop = std::min(w.t_next, t_flip);
        if (w.state == 1) phi += sign * params.chi * (t_stop - t);
        t = t_stop;
        if (w.t_next <= t_flip) {
          w.state ^= 1;
          w.t_next = w.next_dwell(w.t_next);
        }
      }
      sign = -sign;
    }
    phases[i] = std::exp(std::complex<double>(0.0, -phi));
  });

  std::complex<double> zbar = 0.0;
  for (const auto& z : phases) zbar += z;
  zbar /= double(n_traj);
  double var_re = 0, var_im = 0, cov = 0;
  for (const auto& z : phases) {
    const double dr = z.real() - zbar.real(), di = z.imag() - zbar.imag();
    var_re += dr * dr;
    var_im += di * di;
    cov += dr * di;
  }
  var_re /= (n_traj - 1.0);
  var_im /= (n_traj - 1.0);
  cov /= (n_traj - 1.0);

  CoherencePoint pt;
  pt.n_traj = n_traj;
  pt.few_trajectories = n_traj < 256;
  pt.coherence = std::abs(zbar);
  const double c = std::max(pt.coherence, 1e-12);
  const double ur = zbar.real() / c, ui = zbar.imag() / c;
  pt.stderr_est = std::sqrt(
      std::max(0.0, ur * ur * var_re + ui * ui * var_im + 2 * ur * ui * cov) /
      n_traj);
  return pt;
}

namespace {

// eigenvalues of W = [[-gu, gd], [gu, -gd - i chi]]
std::complex<double> slow_eigenvalue(double gu, double gd, double chi) {
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> tr = -(gu + gd + i * chi);
  const std::complex<double> disc =
      std::sqrt(tr * tr - 4.0 * (i * chi * gu));
  const std::complex<double> l1 = 0.5 * (tr + disc);
  const std::complex<double> l2 = 0.5 * (tr - disc);
  return l1.real() > l2.real() ? l1 : l2;
}

}  // namespace

double ramsey_rate_analytic(const PhotonNoiseParams& params) {
  params.validate();
  return -slow_eigenvalue(params.rate_up(), params.rate_down(), params.chi)
              .real();
}

double ramsey_coherence_analytic(const PhotonNoiseParams& params, double tau) {
  params.validate();
  const double gu = params.rate_up(), gd = params.rate_down();
  const std::complex<double> i(0.0, 1.0);
  // generator of <exp(-i chi int n dt)>, states (0, 1)
  Eigen::Matrix2cd w;
  w << -gu, gd, gu, -gd - i * params.chi;
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(w);
  const Eigen::Vector2cd lam = es.eigenvalues();
  const Eigen::Matrix2cd v = es.eigenvectors();
  Eigen::Vector2cd p0;
  const double p1 = gu + gd > 0 ? gu / (gu + gd) : 0.0;
  p0 << 1.0 - p1, p1;
  const Eigen::Vector2cd c = v.fullPivLu().solve(p0);
  std::complex<double> sum = 0.0;
  for (int k = 0; k < 2; ++k)
    sum += (v(0, k) + v(1, k)) * c[k] * std::exp(lam[k] * tau);
  return std::abs(sum);
}

double required_temperature(double target_rate, double omega_r,
                            double q_factor, double chi) {
  if (!(target_rate > 0)) throw ValidationError("target rate must be > 0");
  auto rate_at_n = [&](double n) {
    PhotonNoiseParams p{omega_r, q_factor, n, chi};
    return ramsey_rate_analytic(p);
  };
  // the rate peaks before motional narrowing takes over; search the rising
  // branch only
  const double n_peak = golden_min([&](double n) { return -rate_at_n(n); },
                                   1e-8, 50.0, 1e-10);
  auto rate_at_T = [&](double t) { return rate_at_n(n_thermal(t, omega_r)); };
  const double t_peak =
      std::min(1.0, temperature_for_occupancy(n_peak, omega_r));
  if (rate_at_T(t_peak) < target_rate)
    throw BracketingFailure("target dephasing rate unattainable below 1 K");
  if (target_rate < rate_at_T(1e-4)) return 1e-4;
  return bisect_root([&](double t) { return rate_at_T(t) - target_rate; },
                     1e-4, t_peak, 1e-9);
}

}  // namespace csfq
