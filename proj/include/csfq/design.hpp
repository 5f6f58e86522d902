#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "csfq/circuit.hpp"

namespace csfq {

// Six-parameter design family. lambda1: geometric 2-3 capacitance (F);
// lambda2: small-junction area (m^2); lambda3: junction area ratio alpha;
// lambda4..6: capacitance ratios (1-2 / 2-3, 1-ground / 2-3, 2-ground / 2-3).
struct DesignVector {
  double lambda1 = 0, lambda2 = 0, lambda3 = 0;
  double lambda4 = 0, lambda5 = 0, lambda6 = 0;
  void validate() const;
};

enum class PadMode { three_pad, two_pad };

// Maps a design vector to device parameters. In two_pad mode pad 1 is removed:
// no 1-2/1-3 geometric capacitance and only a small parasitic to ground.
CircuitParams params_from_design(const DesignVector& lv, double jc,
                                 double c_tilde, PadMode mode);

struct DesignMetrics {
  double omega01 = 0;            // rad/s
  double anharmonicity = 0;      // rad/s
  double persistent_current = 0; // A
  double charge_mod_01 = 0;      // rad/s
  double charge_mod_12 = 0;
  double charge_mod_02 = 0;
};

struct MetricEvalOptions {
  int basis_size = k_default_basis;
  int dispersion_grid = 8;   // full grid; 2 = corner points only
};

DesignMetrics metrics(const DesignVector& lv, double jc, double c_tilde,
                      PadMode mode = PadMode::three_pad,
                      const MetricEvalOptions& opts = {});

struct MetricTarget {
  double value = 0;
  double weight = 0;
  std::optional<double> hard_bound;  // upper bound (penalty wall beyond)
};

struct DesignTargets {
  MetricTarget omega01;
  MetricTarget anharmonicity;
  MetricTarget persistent_current;
  MetricTarget charge_mod_01;
  MetricTarget charge_mod_12;
  MetricTarget charge_mod_02;
  void validate() const;
};

struct DesignOptOptions {
  int restarts = 8;
  int max_iter = 160;          // simplex iterations per restart
  double feasible_rel = 0.05;  // "matches targets" tolerance
  MetricEvalOptions search_eval{9, 2};      // coarse inner loop
  MetricEvalOptions final_eval{k_default_basis, 8};
};

struct DesignTraceRow {
  int restart = 0;
  double objective = 0;   // penalized objective at the restart's optimum
  double target_error = 0;
};

struct DesignOptResult {
  DesignVector best;
  DesignMetrics best_metrics;  // at final_eval settings
  bool feasible = false;
  double objective = 0;        // weighted squared relative target error
  std::vector<DesignTraceRow> trace;
};

// Weighted squared relative error minimized by simplex with seeded restarts.
// Hard bounds enter as a x1e6 penalty wall. If no candidate is feasible
// (all weighted targets within feasible_rel and bounds met), the returned
// candidate is the best by unpenalized target error.
DesignOptResult optimize(const DesignTargets& targets, double jc,
                         double c_tilde, PadMode mode, std::uint64_t seed,
                         const DesignVector& init,
                         const DesignOptOptions& opts = {});

}  // namespace csfq
