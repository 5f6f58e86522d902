#include "csfq/decoherence.hpp"

#include <algorithm>
#include <cmath>

#include "csfq/integrate.hpp"
#include "csfq/optimize.hpp"

namespace csfq {

double PowerLawPSD::operator()(double omega) const {
  return a / std::pow(std::abs(omega), alpha);
}

void PowerLawPSD::validate() const {
  if (!(a >= 0.0)) throw ValidationError("psd amplitude must be >= 0");
  if (!(alpha > 0.0 && alpha < 2.0))
    throw ValidationError("psd exponent must be in (0, 2)");
  if (!(omega_min < omega_max) || !(omega_min > 0.0))
    throw ValidationError("psd cutoffs must satisfy 0 < omega_min < omega_max");
}

void DecayTrace::validate() const {
  if (times.size() != coherence.size())
    throw ValidationError("decay trace columns differ in length");
  for (int i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw ValidationError("decay trace times must be strictly increasing");
  if ((coherence < -0.05).any() || (coherence > 1.05).any())
    throw ValidationError("coherence values outside [-0.05, 1.05]");
}

void RateSet::validate() const {
  if (n_pulses.size() != gamma.size())
    throw ValidationError("rate set columns differ in length");
  for (std::size_t i = 0; i < n_pulses.size(); ++i) {
    if (n_pulses[i] < 1) throw ValidationError("n_pulses must be >= 1");
    if (!(gamma[i] > 0)) throw ValidationError("rates must be > 0");
    for (std::size_t j = 0; j < i; ++j)
      if (n_pulses[j] == n_pulses[i])
        throw ValidationError("n_pulses must be distinct");
  }
}

double filter_function(double x, int n, double tau) {
  if (n < 1) throw ValidationError("pulse count must be >= 1");
  if (x == 0.0) return 0.0;
  x = std::abs(x);
  const double s4 = std::pow(std::sin(x / (4.0 * n)), 4);
  const double num = (n % 2 == 1) ? std::cos(0.5 * x) : std::sin(0.5 * x);
  const double den = std::cos(x / (2.0 * n));
  double ratio2;
  if (std::abs(den) < 1e-7) {
    // both numerator and denominator vanish at x = (2m+1) n pi; the limit of
    // (num/den)^2 is n^2 sin^2(x/2) / sin^2(x/2n)
    const double sden = std::sin(x / (2.0 * n));
    const double snum = (n % 2 == 1) ? std::sin(0.5 * x) : std::cos(0.5 * x);
    ratio2 = double(n) * n * snum * snum / (sden * sden);
  } else {
    ratio2 = (num / den) * (num / den);
  }
  return tau * tau * 8.0 / (x * x) * s4 * ratio2;
}

FilterMoments filter_moments(int n, double tau) {
  if (n < 1) throw ValidationError("pulse count must be >= 1");
  const double lo = std::max(0.0, (n - 6.0) * pi);
  const double hi = std::min((n + 6.0) * pi, 2.0 * n * pi);
  const int panels = std::max(16, int(std::ceil((hi - lo) / (0.5 * pi))));
  auto f = [&](double x) { return filter_function(x, n, tau) / (tau * tau); };
  auto fx = [&](double x) { return f(x) * x; };
  const double i_val = panel_gauss(f, lo, hi, panels);
  const double m1 = panel_gauss(fx, lo, hi, panels);
  if (!std::isfinite(i_val) || !(i_val > 0))
    throw QuadratureFailure("filter moment quadrature failed");
  return {i_val, m1 / i_val};
}

double coherence_numeric(const PowerLawPSD& psd, int n, double tau) {
  psd.validate();
  if (!(tau > 0)) return 1.0;
  if (psd.a == 0.0) return 1.0;
  // window around the filter band; the integrand is smooth and negligible
  // outside [0.2 N pi, 5 N pi] / tau
  const double w_lo = psd.omega_min;
  const double w_hi = std::min(psd.omega_max, 5.0 * n * pi / tau);
  if (w_hi <= w_lo) return 1.0;
  const double x_lo = w_lo * tau, x_hi = w_hi * tau;
  const int panels =
      std::max(32, int(std::ceil((x_hi - x_lo) / (0.5 * pi))));
  auto integrand = [&](double x) {
    return psd(x / tau) * filter_function(x, n, tau);
  };
  const double exponent = 2.0 * panel_gauss(integrand, x_lo, x_hi, panels) / tau;
  if (!std::isfinite(exponent)) throw QuadratureFailure("coherence quadrature failed");
  return std::exp(-exponent);
}

double coherence_approx(const PowerLawPSD& psd, int n, double tau) {
  psd.validate();
  if (!(tau > 0) || psd.a == 0.0) return 1.0;
  const FilterMoments fm = filter_moments(n, tau);
  return std::exp(-2.0 * tau * fm.i_val * psd(fm.x_star / tau));
}

double gamma_n(double a, double alpha, int n) {
  if (!(a > 0)) throw ValidationError("psd amplitude must be > 0");
  return std::pow(2.48 * a, 1.0 / (alpha + 1.0)) *
         std::pow(pi * n, -alpha / (alpha + 1.0));
}

PsdFit fit_powerlaw_psd(const RateSet& rates) {
  rates.validate();
  const int m = static_cast<int>(rates.n_pulses.size());
  if (m < 2) throw IllConditioned("need at least two distinct pulse counts");
  // ln Gamma = ln(2.48 A)/(1+alpha) - alpha/(1+alpha) ln(pi N)
  Eigen::MatrixXd x(m, 2);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = std::log(pi * rates.n_pulses[i]);
    y(i) = std::log(rates.gamma[i]);
  }
  const Eigen::Vector2d beta =
      (x.transpose() * x).ldlt().solve(x.transpose() * y);
  const double slope = beta(1);
  if (!(slope > -1.0 && slope <= 0.0))
    throw IllConditioned("rates do not follow a decaying power law in N");
  const double alpha = -slope / (1.0 + slope);
  const double a = std::exp(beta(0) * (1.0 + alpha)) / 2.48;
  return {a, alpha};
}

namespace {

double model_shape(DecayModel model, double r, double t, double shape) {
  switch (model) {
    case DecayModel::exponential:
    case DecayModel::exponential_with_t1:
      return std::exp(-r * t);
    case DecayModel::gaussian:
      return std::exp(-(r * t) * (r * t));
    case DecayModel::stretched:
      return std::exp(-std::pow(r * t, shape));
  }
  return 0.0;
}

}  // namespace

DecayFit fit_decay(const DecayTrace& trace_in, DecayModel model, double shape) {
  trace_in.validate();
  const int m = static_cast<int>(trace_in.times.size());
  if (m < 5) throw ValidationError("decay fit needs at least 5 points");
  if (model == DecayModel::stretched && !(shape > 0))
    throw ValidationError("stretched model needs exponent 1+alpha");
  if (model == DecayModel::exponential_with_t1 && !(shape > 0))
    throw ValidationError("exponential_with_t1 needs T1");

  Eigen::ArrayXd y = trace_in.coherence;
  if (model == DecayModel::exponential_with_t1)
    y *= (trace_in.times / (2.0 * shape)).exp();  // divide out e^{-t/(2 T1)}
  const Eigen::ArrayXd& t = trace_in.times;

  const double y_span = y.maxCoeff() - y.minCoeff();
  DecayFit fit;
  if (y_span < 1e-9 * std::max(1.0, std::abs(y.maxCoeff()))) {
    fit.ill_conditioned = true;
    fit.rate = 0.0;
    fit.amplitude = 0.0;
    fit.offset = y.mean();
    return fit;
  }

  const double t_scale = t.maxCoeff() - t.minCoeff();
  auto sse_at = [&](double log_r) {
    const double r = std::exp(log_r);
    Eigen::ArrayXd phi(m);
    for (int i = 0; i < m; ++i) phi[i] = model_shape(model, r, t[i], shape);
    // linear solve for amplitude and offset
    const double sp = phi.sum(), spp = (phi * phi).sum();
    const double sy = y.sum(), spy = (phi * y).sum();
    const double det = spp * m - sp * sp;
    if (std::abs(det) < 1e-14 * std::max(1.0, spp * m)) return 1e300;
    const double amp = (spy * m - sp * sy) / det;
    const double off = (sy * spp - spy * sp) / det;
    return ((y - amp * phi - off).square()).sum();
  };
  // coarse log-rate scan then golden refinement
  const double lo = std::log(1e-3 / t_scale), hi = std::log(1e3 / t_scale);
  double best_lr = lo, best_sse = sse_at(lo);
  const int coarse = 240;
  for (int i = 1; i <= coarse; ++i) {
    const double lr = lo + (hi - lo) * i / coarse;
    const double s = sse_at(lr);
    if (s < best_sse) {
      best_sse = s;
      best_lr = lr;
    }
  }
  const double dl = (hi - lo) / coarse;
  const double lr = golden_min(sse_at, best_lr - dl, best_lr + dl, 1e-9);
  const double r = std::exp(lr);
  Eigen::ArrayXd phi(m);
  for (int i = 0; i < m; ++i) phi[i] = model_shape(model, r, t[i], shape);
  const double sp = phi.sum(), spp = (phi * phi).sum();
  const double sy = y.sum(), spy = (phi * y).sum();
  const double det = spp * m - sp * sp;
  fit.rate = r;
  fit.amplitude = (spy * m - sp * sy) / det;
  fit.offset = (sy * spp - spy * sp) / det;
  fit.rms = std::sqrt((y - fit.amplitude * phi - fit.offset).square().mean());
  fit.ill_conditioned = std::abs(fit.amplitude) < 1e-6 * std::max(1.0, y_span);
  return fit;
}

}  // namespace csfq
