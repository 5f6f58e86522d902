#include "csfq/noise_mc.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <complex>

#include "csfq/integrate.hpp"
#include "csfq/parallel.hpp"
#include "csfq/rng.hpp"

namespace csfq {

void CouplingSpec::validate() const {
  if (kind == Kind::linear && k1 == 0.0)
    throw ValidationError("linear coupling requires k1 != 0");
  if (kind == Kind::quadratic && k2 == 0.0)
    throw ValidationError("quadratic coupling requires k2 != 0");
}

namespace {

double autocovariance(const PowerLawPSD& psd, double t) {
  if (t == 0.0) {
    // 2 A (wmax^{1-a} - wmin^{1-a}) / (1-a), with the a = 1 limit
    if (std::abs(psd.alpha - 1.0) < 1e-12)
      return 2.0 * psd.a * std::log(psd.omega_max / psd.omega_min);
    return 2.0 * psd.a *
           (std::pow(psd.omega_max, 1.0 - psd.alpha) -
            std::pow(psd.omega_min, 1.0 - psd.alpha)) /
           (1.0 - psd.alpha);
  }
  // The power-law factor is steep near the lower cutoff while cos(wt)
  // oscillates at the top of the band; integrate the slow region in log
  // frequency and the oscillatory region in half-period panels.
  t = std::abs(t);
  const double w_c =
      std::min(psd.omega_max, std::max(psd.omega_min, 0.5 * pi / t));
  double acc = 0.0;
  if (w_c > psd.omega_min) {
    const double u_lo = std::log(psd.omega_min), u_hi = std::log(w_c);
    const int panels = std::max(16, int(std::ceil(6.0 * (u_hi - u_lo))));
    acc += panel_gauss(
        [&](double u) {
          const double w = std::exp(u);
          return w * psd(w) * std::cos(w * t);
        },
        u_lo, u_hi, panels);
  }
  if (psd.omega_max > w_c) {
    const int panels =
        std::max(8, int(std::ceil((psd.omega_max - w_c) * t / pi)));
    acc += panel_gauss([&](double w) { return psd(w) * std::cos(w * t); },
                       w_c, psd.omega_max, panels);
  }
  return 2.0 * acc;
}

std::vector<double> cpmg_signs(const SequenceSpec& seq, int n_samples) {
  std::vector<double> s(n_samples, 1.0);
  if (seq.n_pulses <= 0) return s;  // Ramsey
  for (int i = 0; i < n_samples; ++i) {
    const double t = double(i) / n_samples;  // t_i = i dt, in units of tau
    int flips = 0;
    // pulses at (k - 1/2)/N
    flips = int(std::floor(t * seq.n_pulses + 0.5));
    if (flips % 2 == 1) s[i] = -1.0;
  }
  return s;
}

}  // namespace

CorrelationMatrix correlation_from_psd(const PowerLawPSD& psd, double dt,
                                       int n_samples) {
  psd.validate();
  if (!(dt > 0) || n_samples < 1)
    throw ValidationError("correlation grid must have dt > 0, n_samples >= 1");
  Eigen::VectorXd r(n_samples);
  parallel_for(n_samples, [&](std::size_t k) {
    r[static_cast<int>(k)] = autocovariance(psd, k * dt);
  });
  if (!r.allFinite()) throw QuadratureFailure("autocovariance quadrature failed");
  CorrelationMatrix out;
  out.m.resize(n_samples, n_samples);
  for (int i = 0; i < n_samples; ++i)
    for (int j = 0; j < n_samples; ++j) out.m(i, j) = r[std::abs(i - j)];
  out.m.diagonal().array() += 1e-10 * r[0];
  return out;
}

TrajectoryBatch sample_trajectories(const CorrelationMatrix& m, int n_traj,
                                    std::uint64_t seed, double dt) {
  const int ns = static_cast<int>(m.m.rows());
  if (m.m.diagonal().maxCoeff() <= 0.0) {
    // zero-power band: the process is identically zero
    TrajectoryBatch batch;
    batch.dt = dt;
    batch.n_samples = ns;
    batch.n_traj = n_traj;
    batch.seed = seed;
    batch.values = Eigen::MatrixXd::Zero(n_traj, ns);
    return batch;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m.m);
  if (llt.info() != Eigen::Success)
    throw FactorizationFailure("correlation matrix is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();

  TrajectoryBatch batch;
  batch.dt = dt;
  batch.n_samples = ns;
  batch.n_traj = n_traj;
  batch.seed = seed;
  batch.values.resize(n_traj, ns);
  parallel_for(n_traj, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    Eigen::VectorXd z(ns);
    for (int k = 0; k < ns; ++k) z[k] = rng.normal();
    batch.values.row(static_cast<int>(i)) = (l * z).transpose();
  });
  return batch;
}

CoherencePoint simulate_dephasing(const TrajectoryBatch& batch,
                                  const CouplingSpec& coupling,
                                  const SequenceSpec& sequence, double tau) {
  coupling.validate();
  if (!(tau > 0) || tau > batch.dt * batch.n_samples * (1.0 + 1e-9))
    throw ValidationError("tau must lie within the sampled window");
  const int used = std::min<int>(batch.n_samples,
                                 int(std::round(tau / batch.dt)));
  const auto signs = cpmg_signs(sequence, used);

  // sequential reduction in trajectory order keeps results thread-agnostic
  std::vector<std::complex<double>> phases(batch.n_traj);
  parallel_for(batch.n_traj, [&](std::size_t i) {
    double phi = 0.0;
    const auto row = batch.values.row(static_cast<int>(i));
    if (coupling.kind == CouplingSpec::Kind::linear) {
      for (int j = 0; j < used; ++j) phi += signs[j] * coupling.k1 * row[j];
    } else {
      for (int j = 0; j < used; ++j)
        phi += signs[j] * coupling.k2 * row[j] * row[j];
    }
    phi *= batch.dt;
    phases[i] = std::exp(std::complex<double>(0.0, -phi));
  });

  std::complex<double> zbar = 0.0;
  for (const auto& z : phases) zbar += z;
  zbar /= double(batch.n_traj);

  double var_re = 0.0, var_im = 0.0, cov = 0.0;
  for (const auto& z : phases) {
    const double dr = z.real() - zbar.real();
    const double di = z.imag() - zbar.imag();
    var_re += dr * dr;
    var_im += di * di;
    cov += dr * di;
  }
  const int n = batch.n_traj;
  var_re /= (n - 1.0);
  var_im /= (n - 1.0);
  cov /= (n - 1.0);

  CoherencePoint pt;
  pt.n_traj = n;
  pt.few_trajectories = n < 256;
  pt.coherence = std::abs(zbar);
  // delta method for |zbar|
  const double c = std::max(pt.coherence, 1e-12);
  const double ur = zbar.real() / c, ui = zbar.imag() / c;
  pt.stderr_est = std::sqrt(
      std::max(0.0, ur * ur * var_re + ui * ui * var_im + 2 * ur * ui * cov) /
      n);
  return pt;
}

FrequencyHistogram frequency_histogram(const TrajectoryBatch& batch,
                                       const CouplingSpec& coupling, int bins) {
  coupling.validate();
  if (batch.n_traj < 1 || batch.n_samples < 1)
    throw ValidationError("histogram needs a nonempty batch");
  if (bins < 1) throw ValidationError("bins must be >= 1");

  const auto to_dw = [&](double xi) {
    return coupling.kind == CouplingSpec::Kind::linear ? coupling.k1 * xi
                                                       : coupling.k2 * xi * xi;
  };
  const std::size_t total =
      std::size_t(batch.n_traj) * std::size_t(batch.n_samples);
  double lo = to_dw(batch.values(0, 0)), hi = lo;
  double s1 = 0;
  for (int i = 0; i < batch.n_traj; ++i)
    for (int j = 0; j < batch.n_samples; ++j) {
      const double v = to_dw(batch.values(i, j));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      s1 += v;
    }
  const double mean = s1 / double(total);
  double m2 = 0, m3 = 0;
  for (int i = 0; i < batch.n_traj; ++i)
    for (int j = 0; j < batch.n_samples; ++j) {
      const double d = to_dw(batch.values(i, j)) - mean;
      m2 += d * d;
      m3 += d * d * d;
    }
  m2 /= double(total);
  m3 /= double(total);

  FrequencyHistogram h;
  h.mean = mean;
  h.variance = m2;
  h.skewness = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
  if (hi == lo) hi = lo + 1.0;
  h.bin_edges = Eigen::ArrayXd::LinSpaced(bins + 1, lo, hi);
  h.counts = Eigen::ArrayXd::Zero(bins);
  const double width = (hi - lo) / bins;
  for (int i = 0; i < batch.n_traj; ++i)
    for (int j = 0; j < batch.n_samples; ++j) {
      const double v = to_dw(batch.values(i, j));
      int b = int((v - lo) / width);
      b = std::min(std::max(b, 0), bins - 1);
      h.counts[b] += 1.0;
    }
  return h;
}

CoherencePoint mc_coherence(const PowerLawPSD& psd, const CouplingSpec& coupling,
                            const SequenceSpec& sequence, double tau,
                            int n_traj, std::uint64_t seed, int ns_base) {
  const int ns = std::max(ns_base, 32 * std::max(1, sequence.n_pulses));
  const double dt = tau / ns;
  PowerLawPSD banded = psd;
  banded.omega_max = std::min(psd.omega_max, 0.25 * pi / dt);
  if (!(banded.omega_min < banded.omega_max))
    throw ValidationError("psd band empty after the Nyquist cap");
  const auto corr = correlation_from_psd(banded, dt, ns);
  const auto batch = sample_trajectories(corr, n_traj, seed, dt);
  return simulate_dephasing(batch, coupling, sequence, tau);
}

}  // namespace csfq
