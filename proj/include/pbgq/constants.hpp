#pragma once

#include <numbers>

namespace pbgq::constants {

inline constexpr double hbar = 1.054571817e-34; // J s
inline constexpr double c = 2.99792458e8;       // m/s
inline constexpr double pi = std::numbers::pi;

/// Angular frequency of light with vacuum wavelength `lambda` (m).
constexpr double omega_from_wavelength(double lambda) { return 2.0 * pi * c / lambda; }
constexpr double wavelength_from_omega(double omega) { return 2.0 * pi * c / omega; }

} // namespace pbgq::constants
