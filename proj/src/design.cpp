#include "csfq/design.hpp"

#include <cmath>

#include "csfq/optimize.hpp"
#include "csfq/parallel.hpp"
#include "csfq/rng.hpp"

namespace csfq {

void DesignVector::validate() const {
  const double all[] = {lambda1, lambda2, lambda3, lambda4, lambda5, lambda6};
  for (double v : all)
    if (!(v > 0)) throw ValidationError("design parameters must be > 0");
  if (!(lambda3 <= 1.0)) throw ValidationError("lambda3 must be in (0, 1]");
}

CircuitParams params_from_design(const DesignVector& lv, double jc,
                                 double c_tilde, PadMode mode) {
  lv.validate();
  const double cj_small = lv.lambda2 * c_tilde;
  const double cj_large = lv.lambda2 * c_tilde / lv.lambda3;
  CapacitanceSet caps;
  caps.c32 = lv.lambda1 + cj_small;
  if (mode == PadMode::three_pad) {
    caps.c21 = lv.lambda1 * lv.lambda4 + cj_large;
    caps.c13 = lv.lambda1 * lv.lambda4 + cj_large;
    caps.c01 = lv.lambda1 * lv.lambda5;
  } else {
    // pad 1 removed: junction capacitance only, small parasitic to ground
    caps.c21 = cj_large;
    caps.c13 = cj_large;
    caps.c01 = 0.05e-15;
  }
  caps.c02 = lv.lambda1 * lv.lambda6;
  caps.c03 = lv.lambda1 * lv.lambda6;

  CircuitParams p;
  p.jc = jc;
  p.alpha_j = lv.lambda3;
  p.area_large = lv.lambda2 / lv.lambda3;
  p.c_tilde = c_tilde;
  p.caps = caps;
  return p;
}

void DesignTargets::validate() const {
  const MetricTarget* all[] = {&omega01,       &anharmonicity, &persistent_current,
                               &charge_mod_01, &charge_mod_12, &charge_mod_02};
  double wsum = 0;
  for (const auto* t : all) {
    if (t->weight < 0) throw ValidationError("target weights must be >= 0");
    wsum += t->weight;
  }
  if (!(wsum > 0)) throw ValidationError("at least one target weight must be > 0");
}

DesignMetrics metrics(const DesignVector& lv, double jc, double c_tilde,
                      PadMode mode, const MetricEvalOptions& opts) {
  const CircuitParams p = params_from_design(lv, jc, c_tilde, mode);
  BiasPoint b;
  b.flux = 0.5;

  DesignMetrics m;
  const Spectrum s = diagonalize(p, b, 3, opts.basis_size);
  m.omega01 = transition(s, 0, 1);
  m.anharmonicity = transition(s, 1, 2) - transition(s, 0, 1);
  m.persistent_current = persistent_current(p, b, opts.basis_size);

  if (opts.dispersion_grid == 2) {
    // offset-charge extremes sit at the {0, 1/2} corners
    double w01min = 0, w01max = 0, w12min = 0, w12max = 0, w02min = 0,
           w02max = 0;
    bool first = true;
    for (double g1 : {0.0, 0.5}) {
      for (double g2 : {0.0, 0.5}) {
        BiasPoint bg = b;
        bg.n_g << g1, g2;
        const Spectrum sg = diagonalize(p, bg, 3, opts.basis_size);
        const double w01 = transition(sg, 0, 1);
        const double w12 = transition(sg, 1, 2);
        const double w02 = transition(sg, 0, 2);
        if (first) {
          w01min = w01max = w01;
          w12min = w12max = w12;
          w02min = w02max = w02;
          first = false;
        } else {
          w01min = std::min(w01min, w01); w01max = std::max(w01max, w01);
          w12min = std::min(w12min, w12); w12max = std::max(w12max, w12);
          w02min = std::min(w02min, w02); w02max = std::max(w02max, w02);
        }
      }
    }
    m.charge_mod_01 = w01max - w01min;
    m.charge_mod_12 = w12max - w12min;
    m.charge_mod_02 = w02max - w02min;
  } else {
    m.charge_mod_01 =
        charge_dispersion(p, b, 0, 1, opts.dispersion_grid, opts.basis_size);
    m.charge_mod_12 =
        charge_dispersion(p, b, 1, 2, opts.dispersion_grid, opts.basis_size);
    m.charge_mod_02 =
        charge_dispersion(p, b, 0, 2, opts.dispersion_grid, opts.basis_size);
  }
  return m;
}

namespace {

struct ObjectiveParts {
  double target_error = 0;  // weighted squared relative error
  double penalty = 0;       // bound wall
};

ObjectiveParts objective_parts(const DesignMetrics& m,
                               const DesignTargets& t) {
  ObjectiveParts out;
  auto add = [&](double value, const MetricTarget& mt) {
    if (mt.weight > 0 && mt.value != 0) {
      const double r = (value - mt.value) / mt.value;
      out.target_error += mt.weight * r * r;
    }
    if (mt.hard_bound && value > *mt.hard_bound) {
      const double x = (value - *mt.hard_bound) / *mt.hard_bound;
      out.penalty += 1e6 * x * x;
    }
  };
  add(m.omega01, t.omega01);
  add(m.anharmonicity, t.anharmonicity);
  add(m.persistent_current, t.persistent_current);
  add(m.charge_mod_01, t.charge_mod_01);
  add(m.charge_mod_12, t.charge_mod_12);
  add(m.charge_mod_02, t.charge_mod_02);
  return out;
}

bool within_bounds(const DesignMetrics& m, const DesignTargets& t) {
  auto ok = [](double value, const MetricTarget& mt) {
    return !mt.hard_bound || value <= *mt.hard_bound;
  };
  return ok(m.omega01, t.omega01) && ok(m.anharmonicity, t.anharmonicity) &&
         ok(m.persistent_current, t.persistent_current) &&
         ok(m.charge_mod_01, t.charge_mod_01) &&
         ok(m.charge_mod_12, t.charge_mod_12) &&
         ok(m.charge_mod_02, t.charge_mod_02);
}

bool matches_targets(const DesignMetrics& m, const DesignTargets& t,
                     double rel) {
  auto ok = [&](double value, const MetricTarget& mt) {
    return mt.weight <= 0 || mt.value == 0 ||
           std::abs(value - mt.value) <= rel * std::abs(mt.value);
  };
  return ok(m.omega01, t.omega01) && ok(m.anharmonicity, t.anharmonicity) &&
         ok(m.persistent_current, t.persistent_current) &&
         ok(m.charge_mod_01, t.charge_mod_01) &&
         ok(m.charge_mod_12, t.charge_mod_12) &&
         ok(m.charge_mod_02, t.charge_mod_02);
}

// free coordinates: three_pad = all six, two_pad = (l1, l2, l3, l6)
Eigen::VectorXd pack(const DesignVector& lv, PadMode mode) {
  auto logit = [](double x) { return std::log(x / (1.0 - x + 1e-12)); };
  if (mode == PadMode::three_pad) {
    Eigen::VectorXd x(6);
    x << std::log(lv.lambda1), std::log(lv.lambda2), logit(lv.lambda3),
        std::log(lv.lambda4), std::log(lv.lambda5), std::log(lv.lambda6);
    return x;
  }
  Eigen::VectorXd x(4);
  x << std::log(lv.lambda1), std::log(lv.lambda2), logit(lv.lambda3),
      std::log(lv.lambda6);
  return x;
}

DesignVector unpack(const Eigen::VectorXd& x, const DesignVector& ref,
                    PadMode mode) {
  auto expit = [](double u) { return 1.0 / (1.0 + std::exp(-u)); };
  DesignVector lv = ref;
  if (mode == PadMode::three_pad) {
    lv.lambda1 = std::exp(x[0]);
    lv.lambda2 = std::exp(x[1]);
    lv.lambda3 = expit(x[2]);
    lv.lambda4 = std::exp(x[3]);
    lv.lambda5 = std::exp(x[4]);
    lv.lambda6 = std::exp(x[5]);
  } else {
    lv.lambda1 = std::exp(x[0]);
    lv.lambda2 = std::exp(x[1]);
    lv.lambda3 = expit(x[2]);
    lv.lambda4 = 1.0;  // unused without pad 1
    lv.lambda5 = 1.0;
    lv.lambda6 = std::exp(x[3]);
  }
  return lv;
}

}  // namespace

DesignOptResult optimize(const DesignTargets& targets, double jc,
                         double c_tilde, PadMode mode, std::uint64_t seed,
                         const DesignVector& init,
                         const DesignOptOptions& opts) {
  targets.validate();
  init.validate();

  struct Candidate {
    DesignVector lv;
    double penalized = 1e300;
    double target_error = 1e300;
  };
  std::vector<Candidate> results(opts.restarts);
  std::vector<DesignTraceRow> trace(opts.restarts);

  parallel_for(opts.restarts, [&](std::size_t r) {
    Rng rng = Rng::stream(seed, r);
    Eigen::VectorXd x0 = pack(init, mode);
    if (r > 0)
      for (int i = 0; i < x0.size(); ++i) x0[i] += 0.3 * rng.normal();

    Candidate local;
    auto objective = [&](const Eigen::VectorXd& x) {
      DesignVector lv = unpack(x, init, mode);
      double val;
      double terr;
      try {
        const DesignMetrics m = metrics(lv, jc, c_tilde, mode, opts.search_eval);
        const ObjectiveParts parts = objective_parts(m, targets);
        val = parts.target_error + parts.penalty;
        terr = parts.target_error;
      } catch (const Error&) {
        return 1e12;  // unphysical corner of the search space
      }
      if (val < local.penalized) {
        local.penalized = val;
        local.lv = lv;
      }
      if (terr < local.target_error) local.target_error = terr;
      return val;
    };

    SimplexOptions sopts;
    sopts.max_iter = opts.max_iter;
    sopts.ftol_rel = 1e-10;
    sopts.initial_step = 0.2;
    const auto res = nelder_mead(objective, x0, sopts);
    // keep the best-by-target-error point of this restart as its candidate
    Candidate best;
    best.lv = unpack(res.x, init, mode);
    best.penalized = res.fval;
    // re-evaluate unpenalized target error at the optimum
    try {
      const DesignMetrics m =
          metrics(best.lv, jc, c_tilde, mode, opts.search_eval);
      best.target_error = objective_parts(m, targets).target_error;
    } catch (const Error&) {
      best.target_error = 1e300;
    }
    results[r] = best;
    trace[r] = {static_cast<int>(r), best.penalized, best.target_error};
  });

  // pick the best feasible candidate; otherwise the best by target error
  DesignOptResult out;
  out.trace = trace;
  int best_feasible = -1, best_terr = -1;
  double bf = 1e300, bt = 1e300;
  std::vector<DesignMetrics> final_metrics(opts.restarts);
  for (int r = 0; r < opts.restarts; ++r) {
    try {
      final_metrics[r] =
          metrics(results[r].lv, jc, c_tilde, mode, opts.final_eval);
    } catch (const Error&) {
      continue;
    }
    const auto parts = objective_parts(final_metrics[r], targets);
    const bool feasible = within_bounds(final_metrics[r], targets) &&
                          matches_targets(final_metrics[r], targets,
                                          opts.feasible_rel);
    if (feasible && parts.target_error < bf) {
      bf = parts.target_error;
      best_feasible = r;
    }
    if (parts.target_error < bt) {
      bt = parts.target_error;
      best_terr = r;
    }
  }
  if (best_terr < 0) throw ConvergenceFailure("all design restarts failed");
  const int pick = best_feasible >= 0 ? best_feasible : best_terr;
  out.best = results[pick].lv;
  out.best_metrics = final_metrics[pick];
  out.feasible = best_feasible >= 0;
  out.objective = objective_parts(out.best_metrics, targets).target_error;
  return out;
}

}  // namespace csfq
