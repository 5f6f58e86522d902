#pragma once

#include <Eigen/Dense>

#include "csfq/constants.hpp"
#include "csfq/errors.hpp"

namespace csfq {

// Geometric and gate capacitances of the three-pad device. All farads.
struct CapacitanceSet {
  double c13 = 0, c21 = 0, c32 = 0;   // pad-pad
  double c01 = 0, c02 = 0, c03 = 0;   // pad-ground
  double c1b = 0, c2b = 0, c3b = 0;   // resonator electrode gates
  double c1d = 0, c2d = 0, c3d = 0;   // drive electrode gates
  double c1g = 0, c2g = 0, c3g = 0;   // trapped-charge gates

  void validate() const;
};

// Assembled 3x3 kinetic matrix in the (g21, g31, g01) branch coordinates,
// plus the fixed node-to-branch map.
struct CMatrix {
  Eigen::Matrix3d m;  // farads, symmetric positive definite
  Eigen::Matrix3i d;
};

CMatrix build_capacitance_matrix(const CapacitanceSet& caps);

struct CircuitParams {
  double jc = 0;          // critical current density, A/m^2
  double alpha_j = 0;     // small/large junction area ratio
  double area_large = 0;  // large-junction area, m^2
  double c_tilde = 0;     // junction capacitance density, F/m^2
  CapacitanceSet caps;

  double critical_current() const { return jc * area_large; }
  double josephson_energy() const { return k_phi0_reduced * critical_current(); }
  void validate() const;
};

struct BiasPoint {
  double flux = 0.5;                          // Phi / Phi0
  Eigen::Vector2d n_g = Eigen::Vector2d::Zero();  // island offset charges, 2e
  double v_b = 0;                             // resonator electrode volts
  double v_d = 0;                             // drive electrode volts
};

enum class EnergyUnit { joule, angular };

struct Spectrum {
  Eigen::VectorXd energies;  // ascending
  EnergyUnit unit = EnergyUnit::angular;
  BiasPoint bias;

  int n_levels() const { return static_cast<int>(energies.size()); }
};

inline constexpr int k_default_basis = 12;  // charge states in [-N, N] per island

// Lowest n_levels eigenvalues of the circuit Hamiltonian in the 2D periodic
// charge basis (the g01 coordinate has no potential term; its conserved
// momentum folds into the offset charges).
Spectrum diagonalize(const CircuitParams& params, const BiasPoint& bias,
                     int n_levels, int basis_size = k_default_basis);

// Same, but verifies basis convergence: recomputes at basis_size + 4 and
// throws ConvergenceFailure if any transition among the requested levels
// moves by more than tol (rad/s).
Spectrum diagonalize_checked(const CircuitParams& params, const BiasPoint& bias,
                             int n_levels, int basis_size = k_default_basis,
                             double tol = 2.0 * pi * 1e3);

// w_jk = (E_k - E_j)/hbar in rad/s.
double transition(const Spectrum& s, int j, int k);
// Two-photon line: w_jk / 2.
double transition_two_photon(const Spectrum& s, int j, int k);

// d^order w_jk / dPhi^order by central differences (per Phi0^order).
double flux_sensitivity(const CircuitParams& params, const BiasPoint& bias,
                        int j, int k, int order,
                        int basis_size = k_default_basis);

// Peak-to-peak modulation of w_jk over one full 2D period of the island
// offset charges, sampled on a grid x grid lattice. rad/s.
double charge_dispersion(const CircuitParams& params, const BiasPoint& bias,
                         int j, int k, int grid = 8,
                         int basis_size = k_default_basis);

// |<j| N_drive |k>| with N_drive the charge operator weighted by the drive
// gate-capacitance vector.
double drive_matrix_element(const CircuitParams& params, const BiasPoint& bias,
                            int j, int k, int basis_size = k_default_basis);

struct CavityParams {
  double omega_r = 0;    // rad/s
  double q_factor = 0;
  double coupling_g = 0; // rad/s prefactor of the (C^-1 D C_b).n charge operator
  double chi_direct = 0; // rad/s; used by modules that take chi as given

  double kappa() const { return omega_r / q_factor; }
  void validate() const;
};

// Per-photon shift of w_jk from exact diagonalization of the coupled model
// with one cavity excitation and n_circuit_levels circuit levels.
double dispersive_shift(const CircuitParams& params, const BiasPoint& bias,
                        const CavityParams& cavity, int j, int k,
                        int n_circuit_levels = 6,
                        int basis_size = k_default_basis,
                        double guard_band = 2.0 * pi * 50e6);

// I_p = (1/2)|d(E1 - E0)/dPhi| at a fixed 0.003 Phi0 offset from the bias.
double persistent_current(const CircuitParams& params, const BiasPoint& bias,
                          int basis_size = k_default_basis);

namespace detail {
// Eigenpairs of the reduced 2D charge-basis Hamiltonian; vectors are in the
// flattened (n1, n2) charge basis with index i1 * (2N+1) + i2.
struct EigenSystem {
  Eigen::VectorXd energies;            // joules, ascending
  Eigen::MatrixXcd vectors;            // one column per level
  int basis_size = 0;
};
EigenSystem solve_charge_basis(const CircuitParams& params,
                               const BiasPoint& bias, int n_levels,
                               int basis_size, bool want_vectors);
// Charge operator weights w = C^-1 D c for a gate capacitance column c.
Eigen::Vector3d charge_weights(const CapacitanceSet& caps,
                               const Eigen::Vector3d& gate_column);
}  // namespace detail

}  // namespace csfq
