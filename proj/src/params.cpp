#include "lev2d/params.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "lev2d/constants.hpp"

namespace lev2d {

namespace {

void require(bool ok, const char* what) {
    if (!ok)
        throw std::invalid_argument(std::string("SystemParams: ") + what);
}

void require_env(bool ok, const char* what) {
    if (!ok)
        throw std::invalid_argument(std::string("ParticleEnvironment: ") + what);
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

void SystemParams::validate() const {
    for (double v : {detuning, kappa, omega_x, omega_y, g_x, g_y, gamma_m,
                     gamma_x, gamma_y, eta, omega_lo})
        require(finite(v), "non-finite field");
    require(kappa > 0.0, "kappa must be > 0");
    require(omega_x > 0.0 && omega_y > 0.0, "mechanical frequencies must be > 0");
    require(gamma_m >= 0.0, "gamma_m must be >= 0");
    require(gamma_x >= 0.0 && gamma_y >= 0.0, "decoherence rates must be >= 0");
    require(eta >= 0.0 && eta <= 1.0, "eta must lie in [0,1]");
}

std::uint64_t SystemParams::hash() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g",
                  detuning, kappa, omega_x, omega_y, g_x, g_y, gamma_m, gamma_x,
                  gamma_y, eta, omega_lo);
    std::uint64_t h = 1469598103934665603ull; // FNV offset basis
    for (const char* p = buf; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 1099511628211ull;
    }
    return h;
}

void ParticleEnvironment::validate() const {
    for (double v : {radius, mass, gas_mass, temperature, pressure, tweezer_intensity,
                     cross_section, laser_omega, cavity_omega, cavity_volume,
                     polarizability, theta})
        require_env(finite(v), "non-finite field");
    require_env(radius > 0.0, "radius must be > 0");
    require_env(mass > 0.0, "mass must be > 0");
    require_env(gas_mass > 0.0, "gas_mass must be > 0");
    require_env(temperature > 0.0, "temperature must be > 0");
    require_env(pressure >= 0.0, "pressure must be >= 0");
    require_env(tweezer_intensity > 0.0, "tweezer_intensity must be > 0");
    require_env(cross_section > 0.0, "cross_section must be > 0");
    require_env(laser_omega > 0.0, "laser_omega must be > 0");
    require_env(cavity_omega > 0.0, "cavity_omega must be > 0");
    require_env(cavity_volume > 0.0, "cavity_volume must be > 0");
    require_env(polarizability > 0.0, "polarizability must be > 0");
    require_env(theta >= 0.0 && theta < constants::pi, "theta must lie in [0, pi)");
}

double hz_to_angular(double f_hz) { return constants::two_pi * f_hz; }
double angular_to_hz(double omega) { return omega / constants::two_pi; }

} // namespace lev2d
