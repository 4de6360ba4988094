#pragma once

// Reference parameter sets: the Rb 780 nm defect-pass geometry and the
// Rb 5.9 mm microwave transition.

#include "pbgq/constants.hpp"
#include "pbgq/state.hpp"

namespace pbgq::scenarios {

inline constexpr double optical_omega_a = 2.4e15;    // rad/s
inline constexpr double optical_omega_0 = 1.1e10;    // rad/s, peak Rabi frequency
inline constexpr double optical_d21 = 1.0e-29;       // C m
inline constexpr double microwave_wavelength = 5.9e-3; // m
inline constexpr double microwave_d21 = 2.0e-26;     // C m
inline constexpr double entangling_speed = 278;      // m/s

/// a = R_def = 0.8 x transition wavelength.
inline double optical_lattice_constant() { return 0.8 * constants::wavelength_from_omega(optical_omega_a); }

inline AtomSpecies rb_optical() { return {optical_omega_a, optical_d21, "Rb 780 nm"}; }

inline AtomSpecies rb_microwave()
{
    return {constants::omega_from_wavelength(microwave_wavelength), microwave_d21, "Rb 5.9 mm"};
}

/// Symmetric (phi = 0) optical point defect resonant with the atom.
inline DefectMode optical_defect(std::string name = "p")
{
    const double a = optical_lattice_constant();
    return {std::move(name), optical_omega_a, a, a, 0.0};
}

} // namespace pbgq::scenarios
