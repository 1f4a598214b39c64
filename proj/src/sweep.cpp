#include "lev2d/sweep.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "lev2d/constants.hpp"
#include "lev2d/io.hpp"

namespace lev2d {

using nlohmann::ordered_json;

void SweepSpec::validate() const {
    base.validate();
    if (grid.empty())
        throw std::invalid_argument("SweepSpec: empty grid");
    if (variable == SweepVariable::angle && !g_max)
        throw std::invalid_argument("SweepSpec: angle sweep needs g_max");
    if (variable == SweepVariable::pressure && !law && !environment)
        throw std::invalid_argument(
            "SweepSpec: pressure sweep needs a measured law or an environment");
    if (occupancy_samples < 16)
        throw std::invalid_argument("SweepSpec: occupancy_samples >= 16");
}

SystemParams params_at_sweep_point(const SweepSpec& spec, double value) {
    SystemParams p = spec.base;
    switch (spec.variable) {
    case SweepVariable::detuning:
        p.detuning = value;
        break;
    case SweepVariable::angle: {
        const double s = std::sin(value), c = std::cos(value);
        p.g_x = *spec.g_max * s * s;
        p.g_y = *spec.g_max * std::sqrt(p.omega_x / p.omega_y) * s * c;
        break;
    }
    case SweepVariable::pressure: {
        DecoherenceBudget budget;
        if (spec.law) {
            budget = budget_from_measured_law(*spec.law, value, p.omega_x,
                                              p.omega_y);
        } else {
            ParticleEnvironment env = *spec.environment;
            env.pressure = value;
            budget = total_decoherence(env, p.omega_x, p.omega_y);
        }
        p.gamma_m = budget.gamma_m;
        p.gamma_x = budget.total_x();
        p.gamma_y = budget.total_y();
        break;
    }
    }
    return p;
}

SweepArchive run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepArchive archive;
    archive.spec = spec;
    archive.records.reserve(spec.grid.size());

    for (double value : spec.grid) {
        SweepRecord rec;
        rec.value = value;
        rec.params = params_at_sweep_point(spec, value);
        const DriftSystem sys = build_drift(rec.params);
        const EigenStructure es = eigenmodes(sys);
        rec.stable = es.stable;
        rec.max_re_lambda = es.max_real;
        if (rec.stable) {
            if (spec.outputs.occupancy)
                rec.occupancy = occupancy_profile(rec.params, spec.occupancy_samples);
            if (spec.outputs.spectrum)
                rec.spectrum = output_spectrum(
                    rec.params,
                    default_heterodyne_grid(rec.params, spec.spectrum_points));
            if (spec.outputs.asymmetry) {
                const double lo = 0.2 * std::min(rec.params.omega_x, rec.params.omega_y);
                const double hi =
                    std::max(rec.params.omega_x, rec.params.omega_y) +
                    3.0 * rec.params.kappa;
                rec.asymmetry = sideband_asymmetry(
                    rec.params,
                    FrequencyGrid::centered(0.5 * (lo + hi), 0.5 * (hi - lo),
                                            spec.spectrum_points / 4));
            }
        }
        archive.records.push_back(std::move(rec));
    }
    return archive;
}

std::string sweep_archive_to_json(const SweepArchive& archive) {
    ordered_json j;
    j["schema_version"] = schema_version;
    switch (archive.spec.variable) {
    case SweepVariable::detuning: j["variable"] = "detuning"; break;
    case SweepVariable::angle: j["variable"] = "angle"; break;
    case SweepVariable::pressure: j["variable"] = "pressure"; break;
    }
    ordered_json records = ordered_json::array();
    for (const auto& rec : archive.records) {
        ordered_json r;
        switch (archive.spec.variable) {
        case SweepVariable::detuning:
            r["detuning_hz"] = angular_to_hz(rec.value);
            break;
        case SweepVariable::angle:
            r["theta_deg"] = rec.value * 180.0 / constants::pi;
            break;
        case SweepVariable::pressure:
            r["pressure_pa"] = rec.value;
            break;
        }
        r["params"] = ordered_json::parse(params_to_json(rec.params));
        r["stable"] = rec.stable;
        r["max_re_lambda"] = rec.max_re_lambda;
        if (rec.occupancy) {
            const auto& prof = *rec.occupancy;
            r["occupancy"] = {{"n_min", prof.n_min},
                              {"n_max", prof.n_max},
                              {"phi_min_deg", prof.phi_min * 180.0 / constants::pi},
                              {"phi_max_deg", prof.phi_max * 180.0 / constants::pi},
                              {"n_y", prof.n_y},
                              {"n_x", prof.n_x}};
        }
        records.push_back(std::move(r));
    }
    j["records"] = std::move(records);
    return j.dump(2) + "\n";
}

} // namespace lev2d
