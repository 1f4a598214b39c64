#pragma once

namespace lev2d::constants {

// CODATA 2018 values, SI units.
inline constexpr double hbar = 1.054571817e-34;     // reduced Planck [J s]
inline constexpr double k_boltzmann = 1.380649e-23; // [J/K]
inline constexpr double c_light = 2.99792458e8;     // [m/s]
inline constexpr double eps0 = 8.8541878128e-12;    // vacuum permittivity [F/m]

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// atomic mass unit [kg]; nitrogen N2 is 28.0134 u
inline constexpr double amu = 1.66053906660e-27;

} // namespace lev2d::constants
