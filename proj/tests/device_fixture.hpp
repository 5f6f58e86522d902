#pragma once

#include "csfq/circuit.hpp"

// Fabricated-device parameters used across the test suite.
inline csfq::CapacitanceSet device_caps() {
  csfq::CapacitanceSet c;
  c.c13 = 17.91e-15;
  c.c21 = 18.13e-15;
  c.c32 = 10.56e-15;
  c.c01 = 62.9e-15;
  c.c02 = 30.4e-15;
  c.c03 = 32.9e-15;
  c.c1b = 2.60e-15;
  c.c2b = 2.61e-15;
  c.c3b = 0.21e-15;
  c.c1d = 0.15e-15;
  c.c2d = 0.02e-15;
  c.c3d = 0.11e-15;
  return c;
}

inline csfq::CircuitParams device_params() {
  csfq::CircuitParams p;
  p.jc = 3.96e6;              // A/m^2
  p.alpha_j = 0.61;
  p.area_large = 0.042419e-12;  // m^2, calibrated against the spectrum
  p.c_tilde = 45e-3;            // F/m^2
  p.caps = device_caps();
  return p;
}

// Device flux-noise PSD amplitude in qubit angular-frequency units at
// 0.501 Phi0: A_phi = 1.8e-14 scaled by the flux sensitivity squared.
inline constexpr double device_sensitivity_0501 = 7.307991e11;  // rad/s/Phi0
inline constexpr double device_a_phi = 1.8e-14;
inline constexpr double device_alpha = 0.68;
inline constexpr double device_a_omega =
    device_a_phi * device_sensitivity_0501 * device_sensitivity_0501;
