#include "csfq/spectro_fit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "csfq/optimize.hpp"
#include "csfq/parallel.hpp"

namespace csfq {

TransitionTag parse_transition_tag(const std::string& s) {
  if (s == "01") return TransitionTag::t01;
  if (s == "02tp") return TransitionTag::t02tp;
  if (s == "12") return TransitionTag::t12;
  if (s == "02") return TransitionTag::t02;
  throw ParseError("unknown transition tag: " + s);
}

std::string to_string(TransitionTag tag) {
  switch (tag) {
    case TransitionTag::t01: return "01";
    case TransitionTag::t02tp: return "02tp";
    case TransitionTag::t12: return "12";
    case TransitionTag::t02: return "02";
  }
  return "?";
}

void SpectroscopyDataset::validate() const {
  if (rows.size() < 4)
    throw ValidationError("need at least 4 rows for a two-parameter fit");
  for (const auto& r : rows) {
    if (!(r.ghz > 0)) throw ValidationError("frequencies must be > 0");
    if (!(r.weight >= 0)) throw ValidationError("weights must be >= 0");
  }
}

namespace {

double tagged_ghz(const Spectrum& s, TransitionTag tag) {
  switch (tag) {
    case TransitionTag::t01: return transition(s, 0, 1) / ghz_to_rad;
    case TransitionTag::t12: return transition(s, 1, 2) / ghz_to_rad;
    case TransitionTag::t02: return transition(s, 0, 2) / ghz_to_rad;
    case TransitionTag::t02tp:
      return transition_two_photon(s, 0, 2) / ghz_to_rad;
  }
  return 0.0;
}

}  // namespace

FitResult fit_junctions(const SpectroscopyDataset& data,
                        const CapacitanceSet& caps, double jc_init,
                        double alpha_init, double area_large, double c_tilde,
                        const JunctionFitOptions& opts) {
  data.validate();
  if (jc_init < opts.jc_lo || jc_init > opts.jc_hi ||
      alpha_init < opts.alpha_lo || alpha_init > opts.alpha_hi)
    throw ValidationError("initial guess outside fit bounds");

  // group rows by flux so each objective call diagonalizes once per point
  std::map<double, std::vector<std::size_t>> by_flux;
  for (std::size_t i = 0; i < data.rows.size(); ++i)
    by_flux[data.rows[i].flux].push_back(i);
  std::vector<double> fluxes;
  std::vector<std::vector<std::size_t>> groups;
  for (auto& [f, idx] : by_flux) {
    fluxes.push_back(f);
    groups.push_back(idx);
  }

  Eigen::VectorXd resid(data.rows.size());
  auto residuals_at = [&](double jc, double alpha, Eigen::VectorXd& out) {
    CircuitParams p;
    p.jc = jc;
    p.alpha_j = alpha;
    p.area_large = area_large;
    p.c_tilde = c_tilde;
    p.caps = caps;
    parallel_for(fluxes.size(), [&](std::size_t g) {
      BiasPoint b;
      b.flux = fluxes[g];
      const Spectrum s = diagonalize(p, b, 3, opts.basis_size);
      for (std::size_t i : groups[g]) {
        const auto& row = data.rows[i];
        out[static_cast<int>(i)] = tagged_ghz(s, row.tag) - row.ghz;
      }
    });
  };

  auto objective = [&](const Eigen::VectorXd& x) {
    const double jc = x[0] * 1e6;  // work in uA/um^2-like scale
    const double alpha = x[1];
    if (jc < opts.jc_lo || jc > opts.jc_hi || alpha < opts.alpha_lo ||
        alpha > opts.alpha_hi)
      return 1e12 * (1.0 + x.cwiseAbs().sum());
    Eigen::VectorXd r(data.rows.size());
    residuals_at(jc, alpha, r);
    double acc = 0;
    for (std::size_t i = 0; i < data.rows.size(); ++i)
      acc += data.rows[i].weight * r[static_cast<int>(i)] * r[static_cast<int>(i)];
    return acc;
  };

  Eigen::VectorXd x0(2);
  x0 << jc_init / 1e6, alpha_init;
  SimplexOptions sopts;
  sopts.max_iter = opts.max_iter;
  sopts.ftol_rel = opts.ftol_rel;
  sopts.initial_step = 0.03;
  const SimplexResult res = nelder_mead(objective, x0, sopts);

  FitResult fit;
  fit.jc = res.x[0] * 1e6;
  fit.alpha_j = res.x[1];
  fit.converged = res.converged;
  fit.iterations = res.iterations;
  fit.residuals_ghz.resize(data.rows.size());
  residuals_at(fit.jc, fit.alpha_j, fit.residuals_ghz);
  fit.rms_ghz = std::sqrt(fit.residuals_ghz.squaredNorm() /
                          double(data.rows.size()));
  return fit;
}

LorentzianFit lorentzian_fit(const Eigen::ArrayXd& x, const Eigen::ArrayXd& v) {
  if (x.size() != v.size()) throw ValidationError("columns differ in length");
  const int m = static_cast<int>(x.size());
  if (m < 5) throw ValidationError("need at least 5 points");
  const double span = x.maxCoeff() - x.minCoeff();
  const double v_span = v.maxCoeff() - v.minCoeff();
  if (!(span > 0)) throw ValidationError("frequency span is empty");
  if (v_span < 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff()))
    throw IllConditioned("trace is flat within the noise floor");

  // peak may point up or down; pick the direction with the larger excursion
  const double med = [&] {
    std::vector<double> tmp(v.data(), v.data() + m);
    std::nth_element(tmp.begin(), tmp.begin() + m / 2, tmp.end());
    return tmp[m / 2];
  }();
  int i_peak = 0;
  double best = 0;
  for (int i = 0; i < m; ++i)
    if (std::abs(v[i] - med) > best) {
      best = std::abs(v[i] - med);
      i_peak = i;
    }

  auto solve_linear = [&](double c, double hw, double& amp, double& off) {
    const Eigen::ArrayXd phi = hw * hw / ((x - c).square() + hw * hw);
    const double sp = phi.sum(), spp = (phi * phi).sum();
    const double sv = v.sum(), spv = (phi * v).sum();
    const double det = spp * m - sp * sp;
    if (std::abs(det) < 1e-14 * std::max(1.0, spp * m)) {
      amp = 0;
      off = v.mean();
      return false;
    }
    amp = (spv * m - sp * sv) / det;
    off = (sv * spp - spv * sp) / det;
    return true;
  };

  auto sse = [&](const Eigen::VectorXd& p) {
    const double c = p[0];
    const double hw = std::exp(p[1]);
    if (c < x.minCoeff() || c > x.maxCoeff()) return 1e12 * (1 + std::abs(c));
    double amp, off;
    if (!solve_linear(c, hw, amp, off)) return 1e12;
    const Eigen::ArrayXd phi = hw * hw / ((x - c).square() + hw * hw);
    return ((v - amp * phi - off).square()).sum();
  };

  Eigen::VectorXd p0(2);
  p0 << x[i_peak], std::log(span / 10.0);
  SimplexOptions opts;
  opts.max_iter = 400;
  opts.ftol_rel = 1e-14;
  opts.initial_step = 0.05;
  SimplexResult res = nelder_mead(sse, p0, opts);
  // polish from a width-scan start too; keep the better optimum
  for (double frac : {0.02, 0.3}) {
    Eigen::VectorXd q0(2);
    q0 << x[i_peak], std::log(span * frac);
    SimplexResult alt = nelder_mead(sse, q0, opts);
    if (alt.fval < res.fval) res = alt;
  }

  LorentzianFit fit;
  fit.center = res.x[0];
  fit.half_width = std::exp(res.x[1]);
  solve_linear(fit.center, fit.half_width, fit.amplitude, fit.offset);
  const Eigen::ArrayXd phi =
      fit.half_width * fit.half_width /
      ((x - fit.center).square() + fit.half_width * fit.half_width);
  fit.rms = std::sqrt((v - fit.amplitude * phi - fit.offset).square().mean());
  if (std::abs(fit.amplitude) < 1e-9 * std::max(1.0, v_span))
    throw IllConditioned("no resolvable peak");
  return fit;
}

}  // namespace csfq
