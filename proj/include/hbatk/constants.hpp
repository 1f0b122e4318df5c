#pragma once

#include <cmath>
#include <numbers>

namespace hbatk::constants {

// CODATA 2018 (exact in the revised SI).
inline constexpr double planck = 6.62607015e-34;        // J s
inline constexpr double speed_of_light = 299792458.0;   // m/s
inline constexpr double boltzmann = 1.380649e-23;       // J/K
inline constexpr double avogadro = 6.02214076e23;       // 1/mol

inline constexpr double speed_of_light_cm = speed_of_light * 100.0;  // cm/s

/// 1 GM in cm^4 s / photon.
inline constexpr double goeppert_mayer = 1e-50;

/// Molar decadic extinction (M^-1 cm^-1) to cross section (cm^2), rounded
/// form of ln(10) * 1e3 / N_A.
inline constexpr double extinction_to_cross_section = 3.82e-21;

inline constexpr double default_temperature_k = 298.15;

}  // namespace hbatk::constants
