#include "lev2d/noise_models.hpp"

#include <cmath>
#include <stdexcept>

#include "lev2d/constants.hpp"

namespace lev2d {

namespace c = constants;

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("noise-models: ") + what +
                                    " must be > 0");
}

} // namespace

double gas_damping(const ParticleEnvironment& env) {
    require_positive(env.radius, "radius");
    require_positive(env.mass, "mass");
    require_positive(env.gas_mass, "gas_mass");
    require_positive(env.temperature, "temperature");
    if (env.pressure < 0.0 || !std::isfinite(env.pressure))
        throw std::invalid_argument("noise-models: pressure must be >= 0");

    const double r2_over_m = env.radius * env.radius / env.mass;
    const double vth = std::sqrt(env.gas_mass / (2.0 * c::k_boltzmann * env.temperature));
    return (8.0 * std::sqrt(c::pi) / 3.0) * r2_over_m * vth * (2.0 + c::pi / 4.0) *
           env.pressure;
}

RecoilRates recoil_rates(const ParticleEnvironment& env, double omega_x,
                         double omega_y) {
    require_positive(env.mass, "mass");
    require_positive(env.tweezer_intensity, "tweezer_intensity");
    require_positive(env.cross_section, "cross_section");
    require_positive(env.laser_omega, "laser_omega");
    require_positive(omega_x, "omega_x");
    require_positive(omega_y, "omega_y");

    const double photon_rate = env.tweezer_intensity * env.cross_section /
                               (c::hbar * env.laser_omega);
    RecoilRates rates;
    rates.y = 0.2 * (c::hbar * env.laser_omega * env.laser_omega /
                     (2.0 * env.mass * c::c_light * c::c_light * omega_y)) *
              photon_rate;
    rates.x = 2.0 * rates.y * omega_y / omega_x;
    return rates;
}

DecoherenceBudget total_decoherence(const ParticleEnvironment& env, double omega_x,
                                    double omega_y, double extra_x, double extra_y) {
    if (extra_x < 0.0 || extra_y < 0.0)
        throw std::invalid_argument("noise-models: extra terms must be >= 0");
    DecoherenceBudget budget;
    budget.gamma_m = gas_damping(env);
    const double kt = c::k_boltzmann * env.temperature / c::hbar;
    budget.thermal_x = kt * budget.gamma_m / omega_x;
    budget.thermal_y = kt * budget.gamma_m / omega_y;
    const RecoilRates rates = recoil_rates(env, omega_x, omega_y);
    budget.recoil_x = rates.x;
    budget.recoil_y = rates.y;
    budget.extra_x = extra_x;
    budget.extra_y = extra_y;
    return budget;
}

DecoherenceBudget budget_from_measured_law(const MeasuredDecoherenceLaw& law,
                                           double pressure, double omega_x,
                                           double omega_y) {
    if (pressure < 0.0)
        throw std::invalid_argument("noise-models: pressure must be >= 0");
    require_positive(law.temperature, "temperature");
    DecoherenceBudget budget;
    const double kt = c::k_boltzmann * law.temperature;
    const double gm_x = law.b_x * c::hbar * omega_x / kt;
    const double gm_y = law.b_y * c::hbar * omega_y / kt;
    budget.gamma_m = 0.5 * (gm_x + gm_y) * pressure;
    budget.thermal_x = law.b_x * pressure;
    budget.thermal_y = law.b_y * pressure;
    budget.recoil_x = law.a_x;
    budget.recoil_y = law.a_y;
    return budget;
}

CouplingModel coupling_from_angle(const ParticleEnvironment& env, double omega_x,
                                  double omega_y) {
    require_positive(env.polarizability, "polarizability");
    require_positive(env.cavity_omega, "cavity_omega");
    require_positive(env.cavity_volume, "cavity_volume");
    require_positive(env.tweezer_intensity, "tweezer_intensity");
    require_positive(env.mass, "mass");
    require_positive(omega_x, "omega_x");
    require_positive(omega_y, "omega_y");

    const double eps_cavity =
        std::sqrt(c::hbar * env.cavity_omega / (2.0 * c::eps0 * env.cavity_volume));
    const double eps_tweezer =
        std::sqrt(2.0 * env.tweezer_intensity / (c::eps0 * c::c_light));
    const double x_zpf = std::sqrt(c::hbar / (2.0 * env.mass * omega_x));

    CouplingModel model;
    model.theta = env.theta;
    model.g_max = env.polarizability * eps_cavity * eps_tweezer * env.cavity_omega /
                  (2.0 * c::hbar * c::c_light) * x_zpf;
    const double s = std::sin(env.theta);
    const double cth = std::cos(env.theta);
    model.g_x = model.g_max * s * s;
    model.g_y = model.g_max * std::sqrt(omega_x / omega_y) * s * cth;
    return model;
}

double rayleigh_polarizability(double radius, double refractive_index) {
    require_positive(radius, "radius");
    require_positive(refractive_index, "refractive_index");
    const double n2 = refractive_index * refractive_index;
    return 4.0 * c::pi * c::eps0 * radius * radius * radius * (n2 - 1.0) / (n2 + 2.0);
}

double rayleigh_cross_section(double radius, double refractive_index,
                              double laser_omega) {
    require_positive(laser_omega, "laser_omega");
    const double alpha = rayleigh_polarizability(radius, refractive_index);
    const double k = laser_omega / c::c_light;
    const double a_over_eps0 = alpha / c::eps0;
    return k * k * k * k * a_over_eps0 * a_over_eps0 / (6.0 * c::pi);
}

double sphere_mass(double radius, double density) {
    require_positive(radius, "radius");
    require_positive(density, "density");
    return 4.0 / 3.0 * c::pi * radius * radius * radius * density;
}

SystemParams system_params_from_environment(const ParticleEnvironment& env,
                                            double omega_x, double omega_y,
                                            double detuning, double kappa,
                                            double eta, double omega_lo,
                                            double extra_x, double extra_y) {
    env.validate();
    const DecoherenceBudget budget =
        total_decoherence(env, omega_x, omega_y, extra_x, extra_y);
    const CouplingModel coupling = coupling_from_angle(env, omega_x, omega_y);
    SystemParams params;
    params.detuning = detuning;
    params.kappa = kappa;
    params.omega_x = omega_x;
    params.omega_y = omega_y;
    params.g_x = coupling.g_x;
    params.g_y = coupling.g_y;
    params.gamma_m = budget.gamma_m;
    params.gamma_x = budget.total_x();
    params.gamma_y = budget.total_y();
    params.eta = eta;
    params.omega_lo = omega_lo;
    params.validate();
    return params;
}

} // namespace lev2d
