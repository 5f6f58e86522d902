#include "csfq/multilevel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "csfq/optimize.hpp"

namespace csfq {

Eigen::Matrix3d RateMatrix::generator() const {
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      if (j != k) {
        g(k, j) += gamma(j, k);
        g(j, j) -= gamma(j, k);
      }
  return g;
}

double RateMatrix::outflow(int j) const {
  double s = 0;
  for (int k = 0; k < 3; ++k)
    if (k != j) s += gamma(j, k);
  return s;
}

void RateMatrix::validate() const {
  for (int j = 0; j < 3; ++j) {
    if (gamma(j, j) != 0.0)
      throw ValidationError("rate matrix diagonal must be zero");
    for (int k = 0; k < 3; ++k)
      if (!(gamma(j, k) >= 0.0)) throw ValidationError("rates must be >= 0");
  }
}

RateMatrix boltzmann_rate_matrix(double gamma10, double gamma01,
                                 double gamma21, double gamma20, double w12,
                                 double w02, double temperature) {
  if (!(temperature > 0)) throw ValidationError("temperature must be > 0");
  RateMatrix r;
  r.gamma(1, 0) = gamma10;
  r.gamma(0, 1) = gamma01;
  r.gamma(2, 1) = gamma21;
  r.gamma(2, 0) = gamma20;
  r.gamma(1, 2) = gamma21 * std::exp(-k_hbar * w12 / (k_boltzmann * temperature));
  r.gamma(0, 2) = gamma20 * std::exp(-k_hbar * w02 / (k_boltzmann * temperature));
  r.validate();
  return r;
}

void PopulationVector::validate() const {
  for (int i = 0; i < 3; ++i)
    if (p[i] < -1e-9 || p[i] > 1.0 + 1e-9)
      throw ValidationError("populations must lie in [0, 1]");
  if (std::abs(p.sum() - 1.0) > 1e-9)
    throw ValidationError("populations must sum to 1");
}

namespace {

Eigen::Matrix3d generator_exp(const Eigen::Matrix3d& g, double t) {
  Eigen::EigenSolver<Eigen::Matrix3d> es(g);
  const auto v = es.eigenvectors();
  Eigen::FullPivLU<Eigen::Matrix3cd> lu(v);
  if (lu.isInvertible() && lu.rcond() > 1e-12) {
    Eigen::Vector3cd ph = (es.eigenvalues() * t).array().exp();
    Eigen::Matrix3cd m = v * ph.asDiagonal() * lu.inverse();
    return m.real();
  }
  // scaled squaring with a Taylor core for the defective corner cases
  Eigen::Matrix3d a = g * t;
  int s = 0;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.5) {
    a *= 0.5;
    norm *= 0.5;
    ++s;
  }
  Eigen::Matrix3d result = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d term = Eigen::Matrix3d::Identity();
  for (int k = 1; k <= 16; ++k) {
    term = (term * a) / double(k);
    result += term;
  }
  for (int i = 0; i < s; ++i) result = result * result;
  return result;
}

}  // namespace

PopulationVector evolve_populations(const RateMatrix& rates,
                                    const PopulationVector& p0, double t) {
  rates.validate();
  p0.validate();
  if (t < 0) throw ValidationError("time must be >= 0");
  if (t == 0.0) return p0;
  PopulationVector out;
  out.p = generator_exp(rates.generator(), t) * p0.p;
  // clean up roundoff at the simplex boundary
  for (int i = 0; i < 3; ++i) out.p[i] = std::min(std::max(out.p[i], 0.0), 1.0);
  out.p /= out.p.sum();
  return out;
}

PopulationVector stationary_populations(const RateMatrix& rates) {
  rates.validate();
  const Eigen::Matrix3d g = rates.generator();
  // null vector via a normalized linear solve, then one refinement step
  Eigen::Matrix3d a = g;
  a.row(2) << 1.0, 1.0, 1.0;
  const Eigen::Vector3d b(0.0, 0.0, 1.0);
  Eigen::PartialPivLU<Eigen::Matrix3d> lu(a);
  Eigen::Vector3d v = lu.solve(b);
  v += lu.solve(b - a * v);
  if (v.minCoeff() < -1e-9)
    throw UnphysicalInput("generator null space is not a distribution");
  PopulationVector out;
  out.p = v.cwiseMax(0.0);
  out.p /= out.p.sum();
  return out;
}

void PopulationTrace::validate() const {
  if (times.size() != populations.rows())
    throw ValidationError("trace rows differ in length");
  if (times.size() < 2) throw ValidationError("trace needs at least 2 rows");
  for (int i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw ValidationError("trace times must be strictly increasing");
}

RelaxationFit fit_relaxation(const PopulationTrace& traces, double gamma10,
                             double gamma01, double temperature, double w12,
                             double w02) {
  traces.validate();
  const int m = static_cast<int>(traces.times.size());
  PopulationVector p0;
  p0.p = traces.populations.row(0).transpose();
  p0.p /= p0.p.sum();
  const double t0 = traces.times[0];

  auto sse = [&](const Eigen::VectorXd& logg) {
    const double g21 = std::exp(logg[0]);
    const double g20 = std::exp(logg[1]);
    const RateMatrix r = boltzmann_rate_matrix(gamma10, gamma01, g21, g20, w12,
                                               w02, temperature);
    double acc = 0;
    for (int i = 1; i < m; ++i) {
      const auto p = evolve_populations(r, p0, traces.times[i] - t0);
      acc += (p.p - traces.populations.row(i).transpose()).squaredNorm();
    }
    return acc;
  };

  // scale guess: the fastest visible decay
  const double span = traces.times[m - 1] - t0;
  Eigen::VectorXd x0(2);
  x0 << std::log(3.0 / span), std::log(1.0 / span);
  SimplexOptions opts;
  opts.max_iter = 400;
  opts.ftol_rel = 1e-12;
  opts.initial_step = 0.7;
  auto res = nelder_mead(sse, x0, opts);

  RelaxationFit fit;
  fit.gamma21 = std::exp(res.x[0]);
  fit.gamma20 = std::exp(res.x[1]);
  fit.rms = std::sqrt(res.fval / (3.0 * (m - 1)));
  fit.converged = res.converged;
  return fit;
}

double thermal_population(double a0, double a1) {
  if (!(a0 >= 0) || !(a1 >= 0)) throw ValidationError("amplitudes must be >= 0");
  if (a0 == 0.0 && a1 == 0.0) throw BothZero("both Rabi amplitudes are zero");
  return a0 / (a0 + a1);
}

double effective_temperature(double p_th0, double omega01) {
  if (!(p_th0 > 0.5 && p_th0 < 1.0))
    throw OutOfDomain("thermal ground population must be in (0.5, 1)");
  return k_hbar * omega01 / (k_boltzmann * std::log(p_th0 / (1.0 - p_th0)));
}

ReadoutCalibration readout_calibrate(const std::vector<Preparation>& preps) {
  if (preps.size() < 3)
    throw SingularSystem("need at least three preparations");
  Eigen::MatrixXd a(preps.size(), 3);
  Eigen::VectorXd b(preps.size());
  for (std::size_t i = 0; i < preps.size(); ++i) {
    preps[i].populations.validate();
    a.row(i) = preps[i].populations.p.transpose();
    b[i] = preps[i].voltage;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3)
    throw SingularSystem("preparation populations are linearly dependent");
  const Eigen::Vector3d v = qr.solve(b);
  return {v[0], v[1], v[2]};
}

Eigen::Matrix3cd multilevel_ramsey(const RateMatrix& rates,
                                   const CoherenceFunction& c01,
                                   const CoherenceFunction& c12,
                                   const CoherenceFunction& c02,
                                   const Eigen::Matrix3cd& rho0, double t) {
  rates.validate();
  if (t < 0) throw ValidationError("time must be >= 0");
  // physicality of rho0
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw UnphysicalInput("rho0 is not Hermitian");
  if (std::abs(rho0.trace().real() - 1.0) > 1e-9 ||
      std::abs(rho0.trace().imag()) > 1e-12)
    throw UnphysicalInput("rho0 trace must be 1");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(rho0);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw UnphysicalInput("rho0 is not positive semidefinite");

  PopulationVector diag0;
  diag0.p = rho0.diagonal().real();
  const PopulationVector diag_t = evolve_populations(rates, diag0, t);

  Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();
  rho.diagonal() = diag_t.p.cast<std::complex<double>>();
  const double g0 = rates.outflow(0), g1 = rates.outflow(1), g2 = rates.outflow(2);
  const double c01v = c01(t), c12v = c12(t), c02v = c02(t);
  rho(0, 1) = rho0(0, 1) * c01v * std::exp(-0.5 * (g0 + g1) * t);
  rho(1, 2) = rho0(1, 2) * c12v * std::exp(-0.5 * (g1 + g2) * t);
  rho(0, 2) = rho0(0, 2) * c02v * std::exp(-0.5 * (g0 + g2) * t);
  rho(1, 0) = std::conj(rho(0, 1));
  rho(2, 1) = std::conj(rho(1, 2));
  rho(2, 0) = std::conj(rho(0, 2));
  return rho;
}

}  // namespace csfq
