#pragma once

#include "lev2d/params.hpp"

namespace lev2d {

// Per-mode decoherence budget: total = thermal (gas) + photon recoil + extra
// technical noise.  All rates angular [rad/s].
struct DecoherenceBudget {
    double gamma_m = 0.0;    // gas damping
    double thermal_x = 0.0;  // k_B T Gamma_m / (hbar Omega_x)
    double thermal_y = 0.0;
    double recoil_x = 0.0;   // dipole shot-noise rates
    double recoil_y = 0.0;
    double extra_x = 0.0;    // additional technical noise, default 0
    double extra_y = 0.0;

    double total_x() const { return thermal_x + recoil_x + extra_x; }
    double total_y() const { return thermal_y + recoil_y + extra_y; }
};

// Coupling-vs-polarization-angle model:
//   g_x = g_max sin^2(theta),
//   g_y = g_max sqrt(Omega_x/Omega_y) sin(theta) cos(theta).
struct CouplingModel {
    double g_max = 0.0; // [rad/s]
    double theta = 0.0; // [rad]
    double g_x = 0.0;
    double g_y = 0.0;
};

// Free-molecular-regime collisional damping (assumed, not checked):
//   Gamma_m = (8 sqrt(pi)/3) (R^2/m) sqrt(m_gas / (2 k_B T)) (2 + pi/4) P.
// Proportional to pressure.
double gas_damping(const ParticleEnvironment& env);

// Photon-recoil decoherence for linear tweezer polarization:
//   recoil_y = (1/5) (hbar w_L^2 / (2 m c^2 Omega_y)) (I_tw sigma / (hbar w_L)),
//   recoil_x = 2 recoil_y (Omega_y / Omega_x)
// (X is perpendicular to both the polarization and propagation axes).
struct RecoilRates {
    double x = 0.0;
    double y = 0.0;
};
RecoilRates recoil_rates(const ParticleEnvironment& env, double omega_x,
                         double omega_y);

// Assembles the full budget: thermal parts from gas damping, recoil parts
// from the dipole-scattering model, plus optional technical terms.
DecoherenceBudget total_decoherence(const ParticleEnvironment& env, double omega_x,
                                    double omega_y, double extra_x = 0.0,
                                    double extra_y = 0.0);

// Measured-slope pathway (kept distinct from the ab-initio route): the linear
// laws Gamma_j = a_j + b_j P fitted to decoherence-vs-pressure data.
// All coefficients angular: a [rad/s], b [rad/s/Pa].
struct MeasuredDecoherenceLaw {
    double a_x = 0.0;
    double b_x = 0.0;
    double a_y = 0.0;
    double b_y = 0.0;
    double temperature = 293.0; // [K], for the slope -> gas damping conversion
};

// Budget with totals from the measured law; gamma_m from the mean of the two
// slope conversions b_j hbar Omega_j / (k_B T); recoil parts set to the
// intercepts (the zero-pressure limit of the law).
DecoherenceBudget budget_from_measured_law(const MeasuredDecoherenceLaw& law,
                                           double pressure, double omega_x,
                                           double omega_y);

// Maximum coupling
//   g_max = (alpha eps_c eps_tw w_c / (2 hbar c)) sqrt(hbar / (2 m Omega_x)),
//   eps_c = sqrt(hbar w_c / (2 eps0 V_c)),  eps_tw = sqrt(2 I_tw / (eps0 c)),
// then g_x, g_y from the polarization-angle rules.
CouplingModel coupling_from_angle(const ParticleEnvironment& env, double omega_x,
                                  double omega_y);

// Rayleigh helpers for particles much smaller than the wavelength (extension;
// the calibration formulas accept alpha and sigma as direct inputs).
inline constexpr double silica_refractive_index = 1.45;
inline constexpr double silica_density = 1850.0; // [kg/m^3]

double rayleigh_polarizability(double radius, double refractive_index);
double rayleigh_cross_section(double radius, double refractive_index,
                              double laser_omega);
double sphere_mass(double radius, double density);

// Builds a full SystemParams from the calibration pipeline
// environment -> budget + coupling -> parameter set.
SystemParams system_params_from_environment(const ParticleEnvironment& env,
                                            double omega_x, double omega_y,
                                            double detuning, double kappa,
                                            double eta, double omega_lo,
                                            double extra_x = 0.0,
                                            double extra_y = 0.0);

} // namespace lev2d
