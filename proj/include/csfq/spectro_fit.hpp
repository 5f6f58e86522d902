#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "csfq/circuit.hpp"

namespace csfq {

enum class TransitionTag { t01, t02tp, t12, t02 };

TransitionTag parse_transition_tag(const std::string& s);
std::string to_string(TransitionTag tag);

struct SpectroRow {
  double flux = 0.5;     // Phi / Phi0
  TransitionTag tag = TransitionTag::t01;
  double ghz = 0;        // measured transition frequency, GHz (= w/2pi)
  double weight = 1.0;
};

struct SpectroscopyDataset {
  std::vector<SpectroRow> rows;
  void validate() const;
};

struct JunctionFitOptions {
  double jc_lo = 1e6, jc_hi = 1e7;        // A/m^2
  double alpha_lo = 0.3, alpha_hi = 0.9;
  int max_iter = 500;
  double ftol_rel = 1e-6;
  int basis_size = k_default_basis;
};

struct FitResult {
  double jc = 0;
  double alpha_j = 0;
  double rms_ghz = 0;
  Eigen::VectorXd residuals_ghz;
  bool converged = false;
  int iterations = 0;
};

// Weighted least squares over (jc, alpha_j) with the capacitances held fixed,
// by downhill simplex (the objective goes through the eigensolver; no cheap
// gradients). Deterministic for a given init.
FitResult fit_junctions(const SpectroscopyDataset& data,
                        const CapacitanceSet& caps, double jc_init,
                        double alpha_init, double area_large, double c_tilde,
                        const JunctionFitOptions& opts = {});

struct LorentzianFit {
  double center = 0;
  double half_width = 0;
  double amplitude = 0;
  double offset = 0;
  double rms = 0;
};

// v(x) = offset + amplitude hw^2 / ((x - center)^2 + hw^2).
LorentzianFit lorentzian_fit(const Eigen::ArrayXd& frequency,
                             const Eigen::ArrayXd& voltage);

}  // namespace csfq
