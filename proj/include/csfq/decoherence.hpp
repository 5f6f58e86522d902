#pragma once

#include <Eigen/Dense>
#include <vector>

#include "csfq/constants.hpp"
#include "csfq/errors.hpp"

namespace csfq {

// Double-sided power-law PSD of angular-frequency fluctuations,
// S(w) = a / |w|^alpha on [omega_min, omega_max]. Convention:
// autocovariance R(t) = 2 * integral over the band of S(w) cos(wt) dw,
// coherence exponent = 2 * integral of S(w) F(w, N, tau) dw.
struct PowerLawPSD {
  double a = 0;          // (rad/s)^(alpha+1) for an angular-frequency PSD
  double alpha = 1.0;
  double omega_min = 2.0 * pi * 1.0;    // rad/s
  double omega_max = 2.0 * pi * 1e9;    // rad/s

  double operator()(double omega) const;
  void validate() const;
};

struct DecayTrace {
  Eigen::ArrayXd times;      // s, strictly increasing
  Eigen::ArrayXd coherence;  // dimensionless

  void validate() const;
};

struct RateSet {
  std::vector<int> n_pulses;
  std::vector<double> gamma;  // 1/s

  void validate() const;
};

// CPMG filter function F(X, N, tau) with X = w*tau, in s^2. Removable
// singularities are evaluated by their limits.
double filter_function(double x, int n, double tau);

struct FilterMoments {
  double i_val;   // integral of F/tau^2 over the fundamental band
  double x_star;  // first moment of that band
};

// Quadrature over the fundamental filter band, N*pi +- 6*pi clipped to
// [0, 2*N*pi] (below the third harmonic).
FilterMoments filter_moments(int n, double tau);

// C_N(tau) by quadrature of the PSD against the filter function.
double coherence_numeric(const PowerLawPSD& psd, int n, double tau);

// C_N(tau) ~ exp[-2 tau I S(X*/tau)] using the filter moments.
double coherence_approx(const PowerLawPSD& psd, int n, double tau);

// Gamma_N = (2.48 a)^{1/(alpha+1)} (pi N)^{-alpha/(alpha+1)}.
double gamma_n(double a, double alpha, int n);

struct PsdFit {
  double a;
  double alpha;
};

// Log-log regression of Gamma_N against N; inverts gamma_n exactly on
// noiseless inputs.
PsdFit fit_powerlaw_psd(const RateSet& rates);

enum class DecayModel { exponential, gaussian, stretched, exponential_with_t1 };

struct DecayFit {
  double rate = 0;        // 1/s
  double amplitude = 0;
  double offset = 0;
  double rms = 0;
  bool ill_conditioned = false;
};

// Least squares with amplitude and offset free. `shape` is 1+alpha for
// stretched decays and T1 (seconds) for exponential_with_t1, where the
// e^{-t/(2 T1)} relaxation factor is divided out before fitting.
DecayFit fit_decay(const DecayTrace& trace, DecayModel model,
                   double shape = 0.0);

}  // namespace csfq
