#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lev2d/fitting.hpp"
#include "lev2d/noise_models.hpp"
#include "lev2d/params.hpp"
#include "lev2d/spectra.hpp"
#include "lev2d/welch.hpp"

namespace lev2d {

inline constexpr int schema_version = 1;

// Deterministic shortest round-trip float formatting (%.17g).
std::string format_double(double v);

// ---- configuration -------------------------------------------------------
//
// Flat key-value text (key = value, '#' comments) or a JSON object with the
// same keys.  All frequencies in Hz, pressure in Pa, temperature in K, angles
// in degrees.  System keys:
//   detuning_hz kappa_hz omega_x_hz omega_y_hz g_x_hz g_y_hz
//   gamma_m_hz gamma_x_hz gamma_y_hz eta omega_lo_hz
// Optional coupling-model keys: g_max_hz theta_deg (resolve g_x/g_y when the
// direct keys are absent or an angle override is applied).
// Optional measured-decoherence-law keys:
//   law_a_x_hz law_b_x_hz_per_pa law_a_y_hz law_b_y_hz_per_pa law_temperature_k
//   pressure_pa (resolve gamma_m/gamma_x/gamma_y when the direct keys are
//   absent or a pressure override is applied).
// Optional environment keys (for the calibration pipeline):
//   radius_m mass_kg gas_mass_kg temperature_k tweezer_intensity_w_m2
//   cross_section_m2 laser_freq_hz cavity_freq_hz cavity_volume_m3
//   polarizability_si

struct Config {
    std::map<std::string, double> values;
    bool has(const std::string& key) const { return values.count(key) != 0; }
    double get(const std::string& key) const;
    double get_or(const std::string& key, double fallback) const;
};

Config read_config(const std::string& path); // dispatches on .json extension
Config parse_config_text(const std::string& text);
Config parse_config_json(const std::string& text);

// Resolves a SystemParams from a config, applying the coupling-model and
// measured-law blocks when the direct keys are missing.
struct ResolvedConfig {
    SystemParams params;
    std::optional<double> g_max;        // [rad/s], when the config carries one
    std::optional<double> theta;        // [rad]
    std::optional<MeasuredDecoherenceLaw> law;
    std::optional<double> pressure_pa;
    std::optional<ParticleEnvironment> environment;
};

ResolvedConfig resolve_config(const Config& cfg);

std::string config_to_text(const SystemParams& params);
std::string params_to_json(const SystemParams& params);
SystemParams params_from_json(const std::string& text);

// ---- spectra and profiles --------------------------------------------------

// CSV: header "frequency_hz,value" (plus ",valid" for asymmetry spectra).
void write_spectrum_csv(const Spectrum& spec, const std::string& path);
Spectrum read_spectrum_csv(const std::string& path);

// JSON metadata sidecar: schema_version, kind, normalization, grid spec,
// optional parameter set.
void write_spectrum_sidecar(const Spectrum& spec, const SystemParams* params,
                            const std::string& path);

struct OccupancyProfile;
void write_occupancy_csv(const std::vector<double>& phi_rad,
                         const std::vector<double>& n_eff,
                         const std::string& path);

// ---- time series -----------------------------------------------------------

// Binary format: JSON header {schema_version, sample_rate_hz, n_samples,
// dtype "float64-le", data_file, metadata...} next to a raw little-endian
// float64 payload.  CSV fallback: two columns time_s,value on a uniform grid.
TimeSeries read_timeseries(const std::string& path);
void write_timeseries(const TimeSeries& ts, const std::string& json_path,
                      const std::string& bin_path);

// ---- fit and regression artifacts -------------------------------------------

std::string fit_result_to_json(const FitResult& fit);
std::vector<PressurePoint> read_pressure_points_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace lev2d
