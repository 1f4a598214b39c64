#pragma once

#include <cstdint>
#include <string>

namespace lev2d {

// Full optomechanical parameter set of the linearized 2D model.
// All rates and frequencies are angular [rad/s]; file I/O converts to/from
// ordinary frequency [Hz] at the boundary.
struct SystemParams {
    double detuning = 0.0;  // Delta = omega_L - omega_c; negative = red-detuned
    double kappa = 0.0;     // cavity amplitude decay (FWHM) [rad/s]
    double omega_x = 0.0;   // mechanical frequency, X mode [rad/s]
    double omega_y = 0.0;   // mechanical frequency, Y mode [rad/s]
    double g_x = 0.0;       // optomechanical coupling, X [rad/s]
    double g_y = 0.0;       // optomechanical coupling, Y [rad/s]
    double gamma_m = 0.0;   // gas damping rate [rad/s]
    double gamma_x = 0.0;   // total decoherence rate, X [rad/s]
    double gamma_y = 0.0;   // total decoherence rate, Y [rad/s]
    double eta = 1.0;       // detection efficiency, in [0,1]
    double omega_lo = 0.0;  // heterodyne local-oscillator offset [rad/s]

    // Throws std::invalid_argument when a field is non-finite or violates
    // kappa > 0, omega_x/y > 0, gamma_m >= 0, gamma_x/y >= 0, 0 <= eta <= 1.
    void validate() const;

    // FNV-1a hash of the canonical serialization; identifies a parameter set
    // in spectrum metadata.
    std::uint64_t hash() const;
};

// Physical particle/gas/tweezer quantities feeding the calibration formulas.
struct ParticleEnvironment {
    double radius = 0.0;            // nanosphere radius R [m]
    double mass = 0.0;              // nanosphere mass m [kg]
    double gas_mass = 0.0;          // gas molecule mass [kg]
    double temperature = 0.0;       // gas temperature T [K]
    double pressure = 0.0;          // chamber pressure P [Pa]
    double tweezer_intensity = 0.0; // I_tw at the particle [W/m^2]
    double cross_section = 0.0;     // dipole scattering cross-section [m^2]
    double laser_omega = 0.0;       // tweezer laser angular frequency [rad/s]
    double cavity_omega = 0.0;      // cavity resonance angular frequency [rad/s]
    double cavity_volume = 0.0;     // cavity mode volume V_c [m^3]
    double polarizability = 0.0;    // alpha [C m^2 / V]
    double theta = 0.0;             // tweezer polarization angle [rad], in [0, pi)

    // Throws std::invalid_argument on non-finite / non-positive quantities
    // (pressure may be zero; theta must lie in [0, pi)).
    void validate() const;
};

// Convert between file-facing ordinary frequency [Hz] and internal [rad/s].
double hz_to_angular(double f_hz);
double angular_to_hz(double omega);

} // namespace lev2d
