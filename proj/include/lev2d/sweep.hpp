#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lev2d/noise_models.hpp"
#include "lev2d/occupancy.hpp"
#include "lev2d/params.hpp"
#include "lev2d/spectra.hpp"

namespace lev2d {

enum class SweepVariable { detuning, angle, pressure };

struct SweepOutputs {
    bool spectrum = false;
    bool asymmetry = false;
    bool occupancy = true;
};

// One sweep: a grid over the swept variable applied to a base parameter set.
// Angle sweeps need a coupling g_max; pressure sweeps need either a measured
// decoherence law or a particle environment.
struct SweepSpec {
    SweepVariable variable = SweepVariable::detuning;
    std::vector<double> grid; // detuning [rad/s] | theta [rad] | pressure [Pa]
    SystemParams base;
    std::optional<double> g_max;                  // [rad/s], angle sweeps
    std::optional<MeasuredDecoherenceLaw> law;    // pressure sweeps
    std::optional<ParticleEnvironment> environment;
    SweepOutputs outputs;
    int occupancy_samples = 720;
    int spectrum_points = 1 << 14;

    void validate() const; // non-empty grid, required blocks present
};

// Per-grid-point record; embeds the exact parameter set used.  Unstable
// points carry diagnostics and no outputs.
struct SweepRecord {
    double value = 0.0; // swept variable, natural units (rad/s, rad, Pa)
    SystemParams params;
    bool stable = false;
    double max_re_lambda = 0.0;
    std::optional<OccupancyProfile> occupancy;
    std::optional<Spectrum> spectrum;
    std::optional<Spectrum> asymmetry;
};

struct SweepArchive {
    SweepSpec spec;
    std::vector<SweepRecord> records; // deterministic: input grid order
};

SystemParams params_at_sweep_point(const SweepSpec& spec, double value);

SweepArchive run_sweep(const SweepSpec& spec);

// JSON archive: self-describing, one record per grid point (parameter set,
// stability, occupancy summary).  Spectra go to per-point CSVs when requested.
std::string sweep_archive_to_json(const SweepArchive& archive);

} // namespace lev2d
