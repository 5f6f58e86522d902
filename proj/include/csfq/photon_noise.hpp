#pragma once

#include <cstdint>
#include <vector>

#include "csfq/constants.hpp"
#include "csfq/errors.hpp"
#include "csfq/noise_mc.hpp"

namespace csfq {

struct PhotonNoiseParams {
  double omega_r = 0;   // rad/s
  double q_factor = 0;
  double n_th = 0;      // mean thermal photon number
  double chi = 0;       // per-photon qubit frequency pull, rad/s

  double kappa() const { return omega_r / q_factor; }
  double rate_up() const { return kappa() * n_th; }          // 0 -> 1
  double rate_down() const { return kappa() * (1.0 + n_th); }  // 1 -> 0
  void validate() const;
};

// Bose-Einstein occupancy 1 / (exp(hbar w / kB T) - 1); 0 at T = 0.
double n_thermal(double temperature, double omega_r);
// Inverse of n_thermal in T.
double temperature_for_occupancy(double n_th, double omega_r);

struct RtnTrajectory {
  double dt = 0;
  std::vector<std::uint8_t> states;  // cavity photon number in {0, 1}
  std::uint64_t seed = 0;
};

// Two-state Markov chain with exact exponential dwell times, binned to the dt
// grid (state sampled at bin centers). Initial state drawn from stationarity.
RtnTrajectory simulate_rtn(const PhotonNoiseParams& params, double duration,
                           double dt, std::uint64_t seed);

// C(tau) = |< exp(-i chi int zeta(t) n(t) dt) >| over telegraph trajectories;
// the integral is accumulated exactly over the dwell segmentation.
CoherencePoint dephasing_decay(const PhotonNoiseParams& params,
                               const SequenceSpec& sequence, double tau,
                               int n_traj, std::uint64_t seed);

// Asymptotic Ramsey dephasing rate of the telegraph process (decay rate of
// the slow eigenvalue of the 2x2 characteristic-function generator).
double ramsey_rate_analytic(const PhotonNoiseParams& params);

// Full analytic Ramsey coherence C(tau) for the telegraph process, starting
// from the stationary occupancy.
double ramsey_coherence_analytic(const PhotonNoiseParams& params, double tau);

// Temperature at which the analytic Ramsey rate reaches target_rate (1/s),
// searching the rising branch below the motional-narrowing peak; throws
// BracketingFailure if unattainable below 1 K.
double required_temperature(double target_rate, double omega_r, double q_factor,
                            double chi);

}  // namespace csfq
