#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "csfq/constants.hpp"
#include "csfq/errors.hpp"

namespace csfq {

// Qutrit population transfer rates; gamma(j, k) is the j -> k rate in 1/s.
struct RateMatrix {
  Eigen::Matrix3d gamma = Eigen::Matrix3d::Zero();

  // Generator G with G(k, j) = gamma(j, k) off-diagonal, columns sum to zero.
  Eigen::Matrix3d generator() const;
  // Total outflow rate from level j.
  double outflow(int j) const;
  void validate() const;
};

// Rate matrix with the excitation rates tied to Boltzmann factors at the
// given temperature: G12 = G21 exp(-hbar w12 / kT), G02 = G20 exp(-..w02..).
RateMatrix boltzmann_rate_matrix(double gamma10, double gamma01,
                                 double gamma21, double gamma20, double w12,
                                 double w02, double temperature);

struct PopulationVector {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  void validate() const;
};

// p(t) = exp(G t) p(0); eigendecomposition with a scaled-squaring fallback.
PopulationVector evolve_populations(const RateMatrix& rates,
                                    const PopulationVector& p0, double t);

// Stationary vector of the generator (null-space direction, normalized).
PopulationVector stationary_populations(const RateMatrix& rates);

struct PopulationTrace {
  Eigen::VectorXd times;                              // s
  Eigen::Matrix<double, Eigen::Dynamic, 3> populations;
  void validate() const;
};

struct RelaxationFit {
  double gamma21 = 0;
  double gamma20 = 0;
  double rms = 0;
  bool converged = false;
};

// Fits (gamma21, gamma20) to population traces with gamma10/gamma01 fixed and
// the 1-2 / 0-2 excitation rates Boltzmann-constrained at `temperature`.
// w12 and w02 are the corresponding transition frequencies (rad/s).
RelaxationFit fit_relaxation(const PopulationTrace& traces, double gamma10,
                             double gamma01, double temperature, double w12,
                             double w02);

// P_th0 = A0 / (A1 + A0) from the two Rabi amplitudes.
double thermal_population(double a0, double a1);

// T = hbar w01 / (kB ln(p/(1-p))) for p in (0.5, 1).
double effective_temperature(double p_th0, double omega01);

struct ReadoutCalibration {
  double v0 = 0, v1 = 0, v2 = 0;
};

struct Preparation {
  PopulationVector populations;
  double voltage = 0;
};

// Least-squares solve of V = P0 v0 + P1 v1 + P2 v2 over the preparations.
ReadoutCalibration readout_calibrate(const std::vector<Preparation>& preps);

using CoherenceFunction = std::function<double(double)>;

// Combined relaxation + dephasing evolution: diagonal by the rate equations,
// off-diagonals rho_jk(t) = C_jk(t) e^{-(Gj + Gk) t / 2} rho_jk(0); any
// detuning phase is the caller's business.
Eigen::Matrix3cd multilevel_ramsey(const RateMatrix& rates,
                                   const CoherenceFunction& c01,
                                   const CoherenceFunction& c12,
                                   const CoherenceFunction& c02,
                                   const Eigen::Matrix3cd& rho0, double t);

}  // namespace csfq
