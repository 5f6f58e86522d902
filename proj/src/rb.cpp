#include "csfq/rb.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

#include "csfq/optimize.hpp"
#include "csfq/parallel.hpp"
#include "csfq/rng.hpp"

namespace csfq {

void PulseSpec::validate() const {
  if (!(drive_strength > 0)) throw ValidationError("drive strength must be > 0");
  if (!(t_half > 0) || !(t_full > 0))
    throw ValidationError("pulse durations must be > 0");
  if (t_rise < 0 || t_fall < 0 || gap < 0)
    throw ValidationError("rise/fall/gap must be >= 0");
}

void RbConfig::validate() const {
  if (levels != 2 && levels != 3)
    throw ValidationError("levels must be 2 or 3");
  if (lengths.empty()) throw ValidationError("lengths must be nonempty");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] < 1) throw ValidationError("lengths must be >= 1");
    if (i > 0 && lengths[i] <= lengths[i - 1])
      throw ValidationError("lengths must be increasing");
  }
  if (randomizations < 1) throw ValidationError("randomizations must be >= 1");
}

Eigen::Matrix2cd generator_unitary(Gen g) {
  const std::complex<double> i(0, 1);
  auto rx = [&](double th) {
    Eigen::Matrix2cd u;
    u << std::cos(th / 2), -i * std::sin(th / 2),
        -i * std::sin(th / 2), std::cos(th / 2);
    return u;
  };
  auto ry = [&](double th) {
    Eigen::Matrix2cd u;
    u << std::cos(th / 2), -std::sin(th / 2),
        std::sin(th / 2), std::cos(th / 2);
    return u;
  };
  switch (g) {
    case Gen::xp90: return rx(pi / 2);
    case Gen::xm90: return rx(-pi / 2);
    case Gen::yp90: return ry(pi / 2);
    case Gen::ym90: return ry(-pi / 2);
    case Gen::x180: return rx(pi);
    case Gen::y180: return ry(pi);
  }
  return Eigen::Matrix2cd::Identity();
}

namespace {

bool same_up_to_phase(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  return std::abs(2.0 - std::abs((a.adjoint() * b).trace())) < 1e-9;
}

CliffordTables build_clifford_tables() {
  CliffordTables t;
  CliffordElement id;
  id.index = 0;
  id.u = Eigen::Matrix2cd::Identity();
  t.elements.push_back(id);

  const Gen gens[] = {Gen::xp90, Gen::xm90, Gen::yp90,
                      Gen::ym90, Gen::x180, Gen::y180};
  std::size_t frontier_begin = 0;
  while (t.elements.size() < 24) {
    const std::size_t frontier_end = t.elements.size();
    for (std::size_t e = frontier_begin; e < frontier_end; ++e) {
      for (Gen g : gens) {
        Eigen::Matrix2cd u = generator_unitary(g) * t.elements[e].u;
        bool known = false;
        for (const auto& el : t.elements)
          if (same_up_to_phase(el.u, u)) {
            known = true;
            break;
          }
        if (!known) {
          CliffordElement el;
          el.index = static_cast<int>(t.elements.size());
          el.decomposition = t.elements[e].decomposition;
          el.decomposition.push_back(g);
          el.u = u;
          t.elements.push_back(el);
        }
      }
    }
    frontier_begin = frontier_end;
  }

  const int n = static_cast<int>(t.elements.size());
  t.product.resize(n, n);
  t.inverse.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Eigen::Matrix2cd u = t.elements[a].u * t.elements[b].u;
      int found = -1;
      for (int c = 0; c < n; ++c)
        if (same_up_to_phase(t.elements[c].u, u)) {
          found = c;
          break;
        }
      t.product(a, b) = found;
      if (found == 0) {
        if (t.inverse[b] < 0) t.inverse[b] = a;
      }
    }
  }
  return t;
}

}  // namespace

const CliffordTables& clifford_group() {
  static const CliffordTables tables = build_clifford_tables();
  return tables;
}

RandomSequence random_sequence(int m, std::uint64_t seed) {
  if (m < 1) throw ValidationError("sequence length must be >= 1");
  const auto& t = clifford_group();
  Rng rng(seed);
  RandomSequence seq;
  seq.gates.reserve(m);
  int acc = 0;  // identity
  for (int i = 0; i < m; ++i) {
    // rejection sampling keeps the draw exactly uniform over 24
    std::uint64_t r;
    do {
      r = rng.next_u64();
    } while (r >= (~std::uint64_t(0) / 24) * 24);
    const int g = static_cast<int>(r % 24);
    seq.gates.push_back(g);
    acc = t.product(g, acc);  // time-ordered product U_g U_acc
  }
  seq.recovery = t.inverse[acc];
  return seq;
}

namespace {

struct Pulse {
  double phase;     // drive phase: 0 = +x, pi/2 = +y, pi = -x, -pi/2 = -y
  double duration;  // total, including ramps
};

std::vector<Pulse> pulses_for(Gen g, const PulseSpec& ps) {
  switch (g) {
    case Gen::xp90: return {{0.0, ps.t_half}};
    case Gen::xm90: return {{pi, ps.t_half}};
    case Gen::yp90: return {{pi / 2, ps.t_half}};
    case Gen::ym90: return {{-pi / 2, ps.t_half}};
    case Gen::x180: return {{0.0, ps.t_full}};
    case Gen::y180: return {{pi / 2, ps.t_full}};
  }
  return {};
}

template <int L>
struct MasterIntegrator {
  using Mat = Eigen::Matrix<std::complex<double>, L, L>;

  Mat h0 = Mat::Zero();
  Mat v_plus = Mat::Zero();
  std::vector<Mat> collapse;
  Mat m_sum = Mat::Zero();  // sum of L^dag L
  bool counter_rotating = false;
  double omega_d = 0;

  void add_collapse(const Mat& l) {
    collapse.push_back(l);
    m_sum += l.adjoint() * l;
  }

  Mat rhs(const Mat& rho, double envelope, double phase, double t_abs) const {
    std::complex<double> drive_amp =
        0.5 * envelope * std::exp(std::complex<double>(0, phase));
    if (counter_rotating) {
      drive_amp += 0.5 * envelope *
                   std::exp(std::complex<double>(0, 2.0 * omega_d * t_abs - phase));
    }
    Mat h = h0 + drive_amp * v_plus +
            std::conj(drive_amp) * v_plus.adjoint();
    Mat out = std::complex<double>(0, -1) * (h * rho - rho * h);
    for (const auto& l : collapse) out += l * rho * l.adjoint();
    out -= 0.5 * (m_sum * rho + rho * m_sum);
    return out;
  }

  // fixed-step RK4 over [t0, t0 + dt_total] with piecewise-linear envelope
  void integrate(Mat& rho, double t0, double dt_total, int steps,
                 const std::function<double(double)>& env,
                 double phase) const {
    const double h = dt_total / steps;
    for (int s = 0; s < steps; ++s) {
      const double t = t0 + s * h;
      const Mat k1 = rhs(rho, env(t - t0), phase, t);
      const Mat k2 = rhs(rho + 0.5 * h * k1, env(t - t0 + 0.5 * h), phase, t + 0.5 * h);
      const Mat k3 = rhs(rho + 0.5 * h * k2, env(t - t0 + 0.5 * h), phase, t + 0.5 * h);
      const Mat k4 = rhs(rho + h * k3, env(t - t0 + h), phase, t + h);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
};

template <int L>
SequenceResult simulate_impl(const RandomSequence& seq, const PulseSpec& ps,
                             const RbConfig& cfg) {
  using Mat = typename MasterIntegrator<L>::Mat;
  MasterIntegrator<L> mi;
  mi.counter_rotating = cfg.counter_rotating && !cfg.rwa;
  mi.omega_d = cfg.omega01;

  mi.v_plus(1, 0) = ps.drive_strength;  // scaled by envelope in [0,1]
  if constexpr (L == 3) {
    mi.v_plus(2, 1) = ps.drive_strength * cfg.drive_ratio_12;
    mi.h0(2, 2) = cfg.anharmonicity;
  }

  Mat l = Mat::Zero();
  auto add_rate = [&](int a, int b, double rate) {  // |a><b| at `rate`
    if (rate <= 0) return;
    l.setZero();
    l(a, b) = std::sqrt(rate);
    mi.add_collapse(l);
  };
  add_rate(0, 1, cfg.gamma10);
  add_rate(1, 0, cfg.gamma01);
  if constexpr (L == 3) {
    add_rate(1, 2, cfg.gamma21);
    add_rate(2, 1, cfg.gamma12);
    add_rate(0, 2, cfg.gamma20);
    add_rate(2, 0, cfg.gamma02);
  }
  if (cfg.gamma_phi > 0) {
    l.setZero();
    l(0, 0) = std::sqrt(cfg.gamma_phi / 2.0);
    l(1, 1) = -std::sqrt(cfg.gamma_phi / 2.0);
    mi.add_collapse(l);
  }

  const double h_drive = mi.counter_rotating ? 2e-12 : 10e-12;
  const double h_idle = 25e-12;

  Mat rho = Mat::Zero();
  rho(0, 0) = 1.0;

  SequenceResult result;
  double t_abs = 0.0;
  auto run_pulse = [&](const Pulse& p) {
    const double tr = ps.t_rise, tf = ps.t_fall, dur = p.duration;
    auto env = [=](double t) {
      if (t < 0 || t > dur) return 0.0;
      if (t < tr) return t / tr;
      if (t > dur - tf) return (dur - t) / tf;
      return 1.0;
    };
    const int steps = std::max(8, int(std::ceil(dur / h_drive)));
    mi.integrate(rho, t_abs, dur, steps, env, p.phase);
    t_abs += dur;
    if (ps.gap > 0) {
      const int gsteps = std::max(2, int(std::ceil(ps.gap / h_idle)));
      mi.integrate(rho, t_abs, ps.gap, gsteps, [](double) { return 0.0; }, 0.0);
      t_abs += ps.gap;
    }
    if constexpr (L == 3) {
      const double p2 = rho(2, 2).real();
      result.max_p2 = std::max(result.max_p2, p2);
    }
  };

  const auto& tables = clifford_group();
  auto run_clifford = [&](int idx) {
    for (Gen g : tables.elements[idx].decomposition)
      for (const Pulse& p : pulses_for(g, ps)) run_pulse(p);
  };
  for (int g : seq.gates) run_clifford(g);
  run_clifford(seq.recovery);

  const double trace_err = std::abs(rho.trace().real() - 1.0);
  if (trace_err > 1e-6 || !rho.allFinite())
    throw IntegrationFailure("master equation integration lost the trace");

  result.trace_error = trace_err;
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  result.min_eigenvalue = es.eigenvalues().minCoeff();
  result.survival = rho(0, 0).real();
  if constexpr (L == 3) {
    result.end_p2 = rho(2, 2).real();
    result.leakage_warning = result.max_p2 > cfg.leakage_warn;
  }
  return result;
}

}  // namespace

SequenceResult simulate_sequence(const RandomSequence& seq,
                                 const PulseSpec& pulses,
                                 const RbConfig& config) {
  pulses.validate();
  config.validate();
  return config.levels == 2 ? simulate_impl<2>(seq, pulses, config)
                            : simulate_impl<3>(seq, pulses, config);
}

RbTable run_rb(const RbConfig& config, const PulseSpec& pulses) {
  config.validate();
  pulses.validate();
  const int nl = static_cast<int>(config.lengths.size());
  const int nr = config.randomizations;
  RbTable table;
  table.rows.resize(std::size_t(nl) * nr);
  parallel_for(table.rows.size(), [&](std::size_t i) {
    const int li = static_cast<int>(i) / nr;
    const int r = static_cast<int>(i) % nr;
    const int m = config.lengths[li];
    Rng sub = Rng::stream(config.seed, i);
    const auto seq = random_sequence(m, sub.next_u64());
    const auto res = simulate_sequence(seq, pulses, config);
    table.rows[i] = {m, r, res.survival, res.end_p2};
  });
  return table;
}

RbFit fit_rb_points(const std::vector<int>& lengths,
                    const std::vector<double>& survivals) {
  if (lengths.size() != survivals.size() || lengths.size() < 3)
    throw IllConditioned("rb fit needs at least 3 distinct lengths");
  const int m = static_cast<int>(lengths.size());

  auto solve_linear = [&](double p, double& a0, double& b0, double& sse) {
    double spp = 0, sp = 0, spy = 0, sy = 0;
    for (int i = 0; i < m; ++i) {
      const double ph = std::pow(p, lengths[i]);
      spp += ph * ph;
      sp += ph;
      spy += ph * survivals[i];
      sy += survivals[i];
    }
    const double det = spp * m - sp * sp;
    if (std::abs(det) < 1e-14 * std::max(1.0, spp * m)) {
      a0 = 0;
      b0 = sy / m;
    } else {
      a0 = (spy * m - sp * sy) / det;
      b0 = (sy * spp - spy * sp) / det;
    }
    sse = 0;
    for (int i = 0; i < m; ++i) {
      const double r = survivals[i] - (a0 * std::pow(p, lengths[i]) + b0);
      sse += r * r;
    }
  };

  auto sse_at = [&](double p) {
    double a0, b0, sse;
    solve_linear(p, a0, b0, sse);
    return sse;
  };
  // coarse scan then golden refinement on p in (0, 1]
  double best_p = 1.0, best_sse = sse_at(1.0 - 1e-12);
  const int coarse = 2000;
  for (int i = 1; i < coarse; ++i) {
    const double p = double(i) / coarse;
    const double s = sse_at(p);
    if (s < best_sse) {
      best_sse = s;
      best_p = p;
    }
  }
  const double dp = 1.0 / coarse;
  const double p = golden_min(sse_at, std::max(1e-6, best_p - dp),
                              std::min(1.0, best_p + dp), 1e-12);

  RbFit fit;
  double sse;
  solve_linear(p, fit.a0, fit.b0, sse);
  fit.p = p;
  fit.f_ave = p + (1.0 - p) / 2.0;

  // linearized standard error on p
  if (m > 3 && fit.a0 != 0.0) {
    double jtj = 0;
    for (int i = 0; i < m; ++i) {
      const double d = fit.a0 * lengths[i] * std::pow(p, lengths[i] - 1);
      jtj += d * d;
    }
    const double sigma2 = sse / std::max(1, m - 3);
    fit.p_stderr = jtj > 0 ? std::sqrt(sigma2 / jtj) : 0.0;
    fit.f_stderr = 0.5 * fit.p_stderr;
  }
  return fit;
}

RbFit fit_rb(const RbTable& table) {
  std::vector<int> lengths;
  std::vector<double> sums;
  std::vector<int> counts;
  for (const auto& row : table.rows) {
    auto it = std::find(lengths.begin(), lengths.end(), row.length);
    if (it == lengths.end()) {
      lengths.push_back(row.length);
      sums.push_back(row.survival);
      counts.push_back(1);
    } else {
      const auto i = std::distance(lengths.begin(), it);
      sums[i] += row.survival;
      counts[i] += 1;
    }
  }
  std::vector<double> avg(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) avg[i] = sums[i] / counts[i];
  return fit_rb_points(lengths, avg);
}

}  // namespace csfq
