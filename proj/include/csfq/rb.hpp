#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "csfq/constants.hpp"
#include "csfq/errors.hpp"

namespace csfq {

struct PulseSpec {
  double drive_strength = 2.0 * pi * 260e6;  // rad/s
  double t_half = 1.5615384615e-9;           // pi/2 pulse duration, s
  double t_full = 2.5230769231e-9;           // pi pulse duration, s
  double t_rise = 0.6e-9;
  double t_fall = 0.6e-9;
  double gap = 0.5e-9;
  enum class Shape { linear } shape = Shape::linear;

  // RWA rotation area of a trapezoid pulse of the given total duration.
  double area(double duration) const {
    return drive_strength * (duration - 0.5 * (t_rise + t_fall));
  }
  void validate() const;
};

// Generator pulses: +-pi/2 and pi rotations about x and y.
enum class Gen { xp90, xm90, yp90, ym90, x180, y180 };

struct CliffordElement {
  int index = 0;
  std::vector<Gen> decomposition;  // time-ordered, at most 3 pulses
  Eigen::Matrix2cd u;              // composed unitary (up to global phase)
};

struct CliffordTables {
  std::vector<CliffordElement> elements;  // 24
  Eigen::MatrixXi product;                // product(a,b) = index of U_a U_b
  std::vector<int> inverse;
};

const CliffordTables& clifford_group();

Eigen::Matrix2cd generator_unitary(Gen g);

struct RandomSequence {
  std::vector<int> gates;
  int recovery = 0;
};

// m uniform Cliffords plus the recovery element inverting their product.
RandomSequence random_sequence(int m, std::uint64_t seed);

struct RbConfig {
  std::vector<int> lengths = {2, 4, 8, 16, 32, 64, 128, 196};
  int randomizations = 32;
  int levels = 2;
  double gamma10 = 0, gamma01 = 0;   // 1/s
  double gamma_phi = 0;              // pure dephasing, 1/s
  double gamma21 = 0, gamma12 = 0, gamma20 = 0, gamma02 = 0;
  bool rwa = true;
  bool counter_rotating = false;
  std::uint64_t seed = 1;
  double omega01 = 2.0 * pi * 1.708e9;        // rad/s, for counter-rotating terms
  double anharmonicity = 2.0 * pi * 3.69e9;   // w12 - w01, 3-level mode
  double drive_ratio_12 = 2.58;               // |<1|N|2>| / |<0|N|1>|
  double leakage_warn = 1e-2;

  void validate() const;
};

struct SequenceResult {
  double survival = 0;   // ground-state population at the end
  double max_p2 = 0;     // peak level-2 population along the way (3-level)
  double end_p2 = 0;
  bool leakage_warning = false;
  double trace_error = 0;      // |tr(rho) - 1| at the end
  double min_eigenvalue = 0;   // smallest eigenvalue of the final state
};

SequenceResult simulate_sequence(const RandomSequence& seq,
                                 const PulseSpec& pulses,
                                 const RbConfig& config);

struct RbTableRow {
  int length = 0;
  int randomization = 0;
  double survival = 0;
  double end_p2 = 0;
};

struct RbTable {
  std::vector<RbTableRow> rows;
};

RbTable run_rb(const RbConfig& config, const PulseSpec& pulses);

struct RbFit {
  double a0 = 0;
  double b0 = 0;
  double p = 0;
  double f_ave = 0;
  double p_stderr = 0;
  double f_stderr = 0;
};

// F = A0 p^M + B0 on the length-averaged survivals; F_ave = p + (1-p)/2.
RbFit fit_rb(const RbTable& table);
RbFit fit_rb_points(const std::vector<int>& lengths,
                    const std::vector<double>& survivals);

}  // namespace csfq
