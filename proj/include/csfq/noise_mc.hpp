#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "csfq/decoherence.hpp"

namespace csfq {

struct TrajectoryBatch {
  double dt = 0;                // s
  int n_samples = 0;
  int n_traj = 0;
  Eigen::MatrixXd values;       // n_traj x n_samples
  std::uint64_t seed = 0;
};

struct CorrelationMatrix {
  Eigen::MatrixXd m;  // n_samples x n_samples, Toeplitz, regularized PSD
};

struct CouplingSpec {
  enum class Kind { linear, quadratic };
  Kind kind = Kind::linear;
  double k1 = 0;  // rad/s per Phi0
  double k2 = 0;  // rad/s per Phi0^2

  void validate() const;
};

struct SequenceSpec {
  int n_pulses = 0;  // 0 = Ramsey, >= 1 = CPMG(n)
};

// Toeplitz covariance M_ij = R(|i-j| dt) with
// R(t) = 2 * integral over the PSD band of S(w) cos(wt) dw,
// regularized by adding 1e-10 R(0) to the diagonal.
CorrelationMatrix correlation_from_psd(const PowerLawPSD& psd, double dt,
                                       int n_samples);

// Correlated Gaussian trajectories via the Cholesky factor of M. Trajectory i
// uses the decorrelated stream (seed, i); results do not depend on thread
// count.
TrajectoryBatch sample_trajectories(const CorrelationMatrix& m, int n_traj,
                                    std::uint64_t seed, double dt);

struct CoherencePoint {
  double coherence = 1.0;
  double stderr_est = 0.0;
  int n_traj = 0;
  bool few_trajectories = false;  // warning flag below 256 trajectories
};

// C(tau) = |< exp(-i sum_j zeta_j dw_j dt) >| with dw = k1 xi or k2 xi^2.
CoherencePoint simulate_dephasing(const TrajectoryBatch& batch,
                                  const CouplingSpec& coupling,
                                  const SequenceSpec& sequence, double tau);

struct FrequencyHistogram {
  Eigen::ArrayXd bin_edges;   // bins + 1 entries
  Eigen::ArrayXd counts;      // bins entries
  double mean = 0;
  double variance = 0;
  double skewness = 0;
};

FrequencyHistogram frequency_histogram(const TrajectoryBatch& batch,
                                       const CouplingSpec& coupling, int bins);

// One CPMG/Ramsey coherence point from scratch: derives the sampling grid
// (n_samples = max(ns_base, 32 N) so pulse intervals stay resolved), caps the
// generation band at a quarter of the sampling Nyquist rate, builds the
// covariance, samples, and accumulates the phase average.
CoherencePoint mc_coherence(const PowerLawPSD& psd, const CouplingSpec& coupling,
                            const SequenceSpec& sequence, double tau,
                            int n_traj, std::uint64_t seed, int ns_base = 512);

}  // namespace csfq
