#include "csfq/circuit.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

namespace csfq {

void CapacitanceSet::validate() const {
  const double vals[] = {c13, c21, c32, c01, c02, c03, c1b, c2b,
                         c3b, c1d, c2d, c3d, c1g, c2g, c3g};
  for (double v : vals)
    if (!(v >= 0.0)) throw ValidationError("capacitances must be >= 0");
  const double strict[] = {c13, c21, c32, c01, c02, c03};
  for (double v : strict)
    if (!(v > 0.0))
      throw ValidationError("pad-to-pad and pad-to-ground capacitances must be > 0");
}

void CircuitParams::validate() const {
  caps.validate();
  if (!(alpha_j > 0.0 && alpha_j <= 1.0))
    throw ValidationError("alpha_j must be in (0, 1]");
  if (!(jc > 0.0)) throw ValidationError("jc must be > 0");
  if (!(area_large > 0.0)) throw ValidationError("area_large must be > 0");
  if (!(c_tilde >= 0.0)) throw ValidationError("c_tilde must be >= 0");
}

void CavityParams::validate() const {
  if (!(omega_r > 0.0)) throw ValidationError("omega_r must be > 0");
  if (!(q_factor > 0.0)) throw ValidationError("q_factor must be > 0");
}

CMatrix build_capacitance_matrix(const CapacitanceSet& c) {
  CMatrix out;
  const double sum2 = c.c2g + c.c02 + c.c2b + c.c2d;  // node 2 to fixed-voltage
  const double sum3 = c.c3g + c.c03 + c.c3b + c.c3d;
  out.m(0, 0) = c.c21 + c.c32 + sum2;
  out.m(0, 1) = -c.c32;
  out.m(0, 2) = sum2;
  out.m(1, 0) = -c.c32;
  out.m(1, 1) = c.c13 + c.c32 + sum3;
  out.m(1, 2) = sum3;
  out.m(2, 0) = sum2;
  out.m(2, 1) = sum3;
  out.m(2, 2) = (c.c1g + c.c2g + c.c3g) + (c.c01 + c.c02 + c.c03) +
                (c.c1b + c.c2b + c.c3b) + (c.c1d + c.c2d + c.c3d);
  out.d << 0, -1, 0,
           0, 0, -1,
          -1, -1, -1;
  Eigen::LLT<Eigen::Matrix3d> llt(out.m);
  if (llt.info() != Eigen::Success)
    throw NonPositiveDefinite("capacitance matrix is not positive definite");
  return out;
}

namespace detail {

Eigen::Vector3d charge_weights(const CapacitanceSet& caps,
                               const Eigen::Vector3d& gate_column) {
  const CMatrix cm = build_capacitance_matrix(caps);
  return cm.m.inverse() * (cm.d.cast<double>() * gate_column);
}

namespace {

struct ReducedKinetic {
  Eigen::Matrix2d a2;      // upper 2x2 block of C^-1, 1/F
  Eigen::Vector2d g_eff;   // effective 2D offset charges
  double e_const;          // constant from the folded g01 momentum, J
};

ReducedKinetic reduce(const CircuitParams& params, const BiasPoint& bias) {
  const CMatrix cm = build_capacitance_matrix(params.caps);
  const Eigen::Matrix3d a = cm.m.inverse();
  const Eigen::Matrix2d a2 = a.topLeftCorner<2, 2>();
  const Eigen::Vector2d a13(a(0, 2), a(1, 2));

  const Eigen::Vector3d cb(params.caps.c1b, params.caps.c2b, params.caps.c3b);
  const Eigen::Vector3d cd(params.caps.c1d, params.caps.c2d, params.caps.c3d);
  const Eigen::Vector3d q_gate = bias.v_b * cb + bias.v_d * cd;
  const Eigen::Vector3d g3 =
      (cm.d.cast<double>() * q_gate) / (2.0 * k_e);

  ReducedKinetic rk;
  rk.a2 = a2;
  // n3 = 0 charge sector; its offset folds into the island offsets.
  const double ng3 = -g3(2);
  rk.g_eff = bias.n_g + g3.head<2>() + ng3 * (a2.inverse() * a13);
  rk.e_const = 2.0 * k_e * k_e * (a(2, 2) - a13.dot(a2.inverse() * a13)) *
               ng3 * ng3;
  return rk;
}

inline double conj_if_complex(double x) { return x; }
inline std::complex<double> conj_if_complex(std::complex<double> x) {
  return std::conj(x);
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> assemble(
    const CircuitParams& params, const ReducedKinetic& rk, double flux, int N,
    Scalar t3) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int dim1 = 2 * N + 1;
  const int dim = dim1 * dim1;
  const double ej = params.josephson_energy();
  const double ec = 2.0 * k_e * k_e;

  Mat h = Mat::Zero(dim, dim);
  auto idx = [dim1](int i1, int i2) { return i1 * dim1 + i2; };
  for (int i1 = 0; i1 < dim1; ++i1) {
    const double n1 = i1 - N - rk.g_eff(0);
    for (int i2 = 0; i2 < dim1; ++i2) {
      const double n2 = i2 - N - rk.g_eff(1);
      const int row = idx(i1, i2);
      h(row, row) = ec * (rk.a2(0, 0) * n1 * n1 + rk.a2(1, 1) * n2 * n2 +
                          2.0 * rk.a2(0, 1) * n1 * n2) +
                    rk.e_const;
      if (i1 + 1 < dim1) {
        h(idx(i1 + 1, i2), row) += Scalar(-0.5 * ej);
        h(row, idx(i1 + 1, i2)) += Scalar(-0.5 * ej);
      }
      if (i2 + 1 < dim1) {
        h(idx(i1, i2 + 1), row) += Scalar(-0.5 * ej);
        h(row, idx(i1, i2 + 1)) += Scalar(-0.5 * ej);
      }
      // alpha junction: e^{i(g21 - g31)} shifts (n1, n2) -> (n1+1, n2-1)
      if (i1 + 1 < dim1 && i2 - 1 >= 0) {
        h(idx(i1 + 1, i2 - 1), row) += t3;
        h(row, idx(i1 + 1, i2 - 1)) += conj_if_complex(t3);
      }
    }
  }
  (void)flux;
  return h;
}

}  // namespace

EigenSystem solve_charge_basis(const CircuitParams& params,
                               const BiasPoint& bias, int n_levels,
                               int basis_size, bool want_vectors) {
  params.validate();
  const ReducedKinetic rk = reduce(params, bias);
  const double ej = params.josephson_energy();
  const double phase = 2.0 * pi * bias.flux;
  const int dim1 = 2 * basis_size + 1;
  const int dim = dim1 * dim1;
  if (n_levels > dim) throw IndexOutOfRange("n_levels exceeds basis dimension");

  EigenSystem sys;
  sys.basis_size = basis_size;
  const auto flags = want_vectors ? Eigen::ComputeEigenvectors
                                  : Eigen::EigenvaluesOnly;
  if (std::abs(std::sin(phase)) < 1e-12) {
    // real Hamiltonian: the alpha hopping coefficient is -+ alpha EJ / 2
    const double t3 = -0.5 * params.alpha_j * ej * std::cos(phase);
    const auto h = assemble<double>(params, rk, bias.flux, basis_size, t3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, flags);
    sys.energies = solver.eigenvalues().head(n_levels);
    if (want_vectors)
      sys.vectors = solver.eigenvectors().leftCols(n_levels).cast<std::complex<double>>();
  } else {
    const std::complex<double> t3 =
        -0.5 * params.alpha_j * ej *
        std::exp(std::complex<double>(0.0, phase));
    const auto h = assemble<std::complex<double>>(params, rk, bias.flux,
                                                  basis_size, t3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, flags);
    sys.energies = solver.eigenvalues().head(n_levels);
    if (want_vectors) sys.vectors = solver.eigenvectors().leftCols(n_levels);
  }
  return sys;
}

}  // namespace detail

Spectrum diagonalize(const CircuitParams& params, const BiasPoint& bias,
                     int n_levels, int basis_size) {
  auto sys = detail::solve_charge_basis(params, bias, n_levels, basis_size,
                                        /*want_vectors=*/false);
  Spectrum s;
  s.energies = sys.energies / k_hbar;
  s.unit = EnergyUnit::angular;
  s.bias = bias;
  return s;
}

Spectrum diagonalize_checked(const CircuitParams& params, const BiasPoint& bias,
                             int n_levels, int basis_size, double tol) {
  Spectrum s = diagonalize(params, bias, n_levels, basis_size);
  Spectrum refined = diagonalize(params, bias, n_levels, basis_size + 4);
  for (int j = 0; j < n_levels; ++j) {
    for (int k = j + 1; k < n_levels; ++k) {
      const double d = std::abs(transition(s, j, k) - transition(refined, j, k));
      if (d > tol)
        throw ConvergenceFailure("transition not converged at requested basis size");
    }
  }
  return s;
}

double transition(const Spectrum& s, int j, int k) {
  if (j < 0 || k < 0 || j >= s.n_levels() || k >= s.n_levels())
    throw IndexOutOfRange("level index out of range");
  const double de = s.energies[k] - s.energies[j];
  return s.unit == EnergyUnit::angular ? de : de / k_hbar;
}

double transition_two_photon(const Spectrum& s, int j, int k) {
  return 0.5 * transition(s, j, k);
}

double flux_sensitivity(const CircuitParams& params, const BiasPoint& bias,
                        int j, int k, int order, int basis_size) {
  const int n_levels = std::max(j, k) + 1;
  auto w_at = [&](double flux) {
    BiasPoint b = bias;
    b.flux = flux;
    return transition(diagonalize(params, b, n_levels, basis_size), j, k);
  };
  if (order == 1) {
    const double h = 1e-4;
    return (w_at(bias.flux + h) - w_at(bias.flux - h)) / (2.0 * h);
  }
  if (order == 2) {
    const double h = 1e-3;
    return (w_at(bias.flux + h) - 2.0 * w_at(bias.flux) + w_at(bias.flux - h)) /
           (h * h);
  }
  throw IndexOutOfRange("derivative order must be 1 or 2");
}

double charge_dispersion(const CircuitParams& params, const BiasPoint& bias,
                         int j, int k, int grid, int basis_size) {
  if (grid < 2) throw ValidationError("charge dispersion grid must be >= 2");
  const int n_levels = std::max(j, k) + 1;
  double wmin = 0, wmax = 0;
  bool first = true;
  for (int i1 = 0; i1 < grid; ++i1) {
    for (int i2 = 0; i2 < grid; ++i2) {
      BiasPoint b = bias;
      b.n_g = bias.n_g + Eigen::Vector2d(double(i1) / grid, double(i2) / grid);
      const double w = transition(diagonalize(params, b, n_levels, basis_size),
                                  j, k);
      if (first || w < wmin) wmin = w;
      if (first || w > wmax) wmax = w;
      first = false;
    }
  }
  return wmax - wmin;
}

namespace {

// <j| sum_i w_i n_i |k> on the reduced 2D basis (the n3 part is constant).
double weighted_charge_element(const detail::EigenSystem& sys,
                               const Eigen::Vector3d& w, int j, int k) {
  const int dim1 = 2 * sys.basis_size + 1;
  std::complex<double> acc = 0.0;
  for (int i1 = 0; i1 < dim1; ++i1) {
    const double n1 = i1 - sys.basis_size;
    for (int i2 = 0; i2 < dim1; ++i2) {
      const double n2 = i2 - sys.basis_size;
      const int row = i1 * dim1 + i2;
      acc += std::conj(sys.vectors(row, j)) * (w(0) * n1 + w(1) * n2) *
             sys.vectors(row, k);
    }
  }
  return std::abs(acc);
}

}  // namespace

double drive_matrix_element(const CircuitParams& params, const BiasPoint& bias,
                            int j, int k, int basis_size) {
  const int n_levels = std::max(j, k) + 1;
  auto sys = detail::solve_charge_basis(params, bias, n_levels, basis_size,
                                        /*want_vectors=*/true);
  const Eigen::Vector3d cd(params.caps.c1d, params.caps.c2d, params.caps.c3d);
  const Eigen::Vector3d w = detail::charge_weights(params.caps, cd);
  return weighted_charge_element(sys, w, j, k);
}

double dispersive_shift(const CircuitParams& params, const BiasPoint& bias,
                        const CavityParams& cavity, int j, int k,
                        int n_circuit_levels, int basis_size,
                        double guard_band) {
  cavity.validate();
  const int L = std::max(n_circuit_levels, std::max(j, k) + 3);
  auto sys = detail::solve_charge_basis(params, bias, L, basis_size,
                                        /*want_vectors=*/true);
  const Eigen::Vector3d cb(params.caps.c1b, params.caps.c2b, params.caps.c3b);
  const Eigen::Vector3d w = detail::charge_weights(params.caps, cb);

  Eigen::MatrixXd nb(L, L);
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b)
      nb(a, b) = weighted_charge_element(sys, w, a, b);

  const Eigen::VectorXd wq =
      (sys.energies.array() - sys.energies[0]) / k_hbar;
  const double nb_scale = nb.cwiseAbs().maxCoeff();
  for (int a = 0; a < L; ++a) {
    for (int b = a + 1; b < L; ++b) {
      if (nb(a, b) > 1e-8 * nb_scale &&
          std::abs((wq[b] - wq[a]) - cavity.omega_r) < guard_band)
        throw DegenerateResonance("circuit transition within guard band of cavity");
    }
  }

  // product basis: index = 2*level + photon, photons in {0, 1}
  const int dim = 2 * L;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int a = 0; a < L; ++a) {
    h(2 * a, 2 * a) = wq[a];
    h(2 * a + 1, 2 * a + 1) = wq[a] + cavity.omega_r;
  }
  for (int a = 0; a < L; ++a) {
    for (int b = 0; b < L; ++b) {
      h(2 * a + 1, 2 * b) += cavity.coupling_g * nb(a, b);
      h(2 * a, 2 * b + 1) += cavity.coupling_g * nb(a, b);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  auto dressed = [&](int level, int photon) {
    int best = 0;
    double best_ov = -1.0;
    for (int c = 0; c < dim; ++c) {
      const double ov = std::abs(solver.eigenvectors()(2 * level + photon, c));
      if (ov > best_ov) {
        best_ov = ov;
        best = c;
      }
    }
    return solver.eigenvalues()[best];
  };
  const double w_jk0 = dressed(k, 0) - dressed(j, 0);
  const double w_jk1 = dressed(k, 1) - dressed(j, 1);
  return w_jk1 - w_jk0;
}

double persistent_current(const CircuitParams& params, const BiasPoint& bias,
                          int basis_size) {
  const double offset = 0.003;
  const double h = 1e-4;
  auto e01 = [&](double flux) {
    BiasPoint b = bias;
    b.flux = flux;
    auto sys = detail::solve_charge_basis(params, b, 2, basis_size, false);
    return sys.energies[1] - sys.energies[0];
  };
  const double slope =
      (e01(bias.flux + offset + h) - e01(bias.flux + offset - h)) /
      (2.0 * h * k_phi0);
  return 0.5 * std::abs(slope);
}

}  // namespace csfq
