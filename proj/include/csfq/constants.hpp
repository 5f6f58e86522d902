#pragma once

#include <numbers>

namespace csfq {

inline constexpr double pi = std::numbers::pi;

// 2019 SI exact values
inline constexpr double k_planck = 6.62607015e-34;           // J s
inline constexpr double k_hbar = k_planck / (2.0 * pi);      // J s
inline constexpr double k_e = 1.602176634e-19;               // C
inline constexpr double k_boltzmann = 1.380649e-23;          // J/K
inline constexpr double k_phi0 = k_planck / (2.0 * k_e);     // Wb, flux quantum h/2e
inline constexpr double k_phi0_reduced = k_phi0 / (2.0 * pi);

inline constexpr double ghz_to_rad = 2.0 * pi * 1e9;

}  // namespace csfq
