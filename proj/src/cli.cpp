#include "lev2d/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "lev2d/constants.hpp"
#include "lev2d/io.hpp"
#include "lev2d/occupancy.hpp"
#include "lev2d/sweep.hpp"
#include "lev2d/welch.hpp"

namespace lev2d {

namespace {

namespace fs = std::filesystem;

struct CommonFlags {
    std::string config;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::optional<double> eta;
    std::optional<double> detuning_khz;
    std::optional<double> angle_deg;
    std::optional<double> pressure_pa;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_config) {
    auto* c = cmd->add_option("--config", flags.config,
                              "parameter config (key=value text or JSON)");
    if (needs_config)
        c->required();
    cmd->add_option("--out-dir", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "RNG seed for synthetic operations");
    cmd->add_option("--eta", flags.eta, "override detection efficiency");
    cmd->add_option("--detuning-khz", flags.detuning_khz, "override detuning [kHz]");
    cmd->add_option("--angle-deg", flags.angle_deg,
                    "override polarization angle (needs g_max in config)");
    cmd->add_option("--pressure-pa", flags.pressure_pa,
                    "override pressure (needs measured-law keys in config)");
}

SystemParams load_params(const CommonFlags& flags) {
    const Config cfg = read_config(flags.config);
    ResolvedConfig resolved = resolve_config(cfg);
    SystemParams p = resolved.params;
    if (flags.detuning_khz)
        p.detuning = hz_to_angular(*flags.detuning_khz * 1e3);
    if (flags.eta)
        p.eta = *flags.eta;
    if (flags.angle_deg) {
        if (!resolved.g_max)
            throw std::invalid_argument("--angle-deg needs g_max_hz in the config");
        const double theta = *flags.angle_deg * constants::pi / 180.0;
        const double s = std::sin(theta), c = std::cos(theta);
        p.g_x = *resolved.g_max * s * s;
        p.g_y = *resolved.g_max * std::sqrt(p.omega_x / p.omega_y) * s * c;
    }
    if (flags.pressure_pa) {
        if (!resolved.law)
            throw std::invalid_argument(
                "--pressure-pa needs measured-law keys in the config");
        const DecoherenceBudget budget = budget_from_measured_law(
            *resolved.law, *flags.pressure_pa, p.omega_x, p.omega_y);
        p.gamma_m = budget.gamma_m;
        p.gamma_x = budget.total_x();
        p.gamma_y = budget.total_y();
    }
    p.validate();
    return p;
}

std::string out_path(const CommonFlags& flags, const std::string& name) {
    fs::create_directories(flags.out_dir);
    return (fs::path(flags.out_dir) / name).string();
}

bool parse_grid_2(const std::string& text, int& n, double& span_khz) {
    double a = 0.0;
    double b = 0.0;
    const int got = std::sscanf(text.c_str(), "%lf:%lf", &a, &b);
    if (got >= 1 && a >= 2) {
        n = static_cast<int>(a);
        if (got == 2)
            span_khz = b;
        return true;
    }
    return false;
}

bool parse_grid_3(const std::string& text, double& start, double& stop, int& n) {
    double c = 0.0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &c) == 3 && c >= 1) {
        n = static_cast<int>(c);
        return true;
    }
    return false;
}

int run_simulate(const CommonFlags& flags, const std::string& grid_text) {
    const SystemParams p = load_params(flags);
    int n = 1 << 16;
    double span_khz = 0.0;
    if (!grid_text.empty() && !parse_grid_2(grid_text, n, span_khz))
        throw std::invalid_argument("--grid must be N or N:span_khz");
    const FrequencyGrid grid =
        span_khz > 0.0
            ? FrequencyGrid::centered(p.omega_lo, hz_to_angular(span_khz * 1e3), n)
            : default_heterodyne_grid(p, n);
    const Spectrum spec = output_spectrum(p, grid);
    write_spectrum_csv(spec, out_path(flags, "spectrum.csv"));
    write_spectrum_sidecar(spec, &p, out_path(flags, "spectrum.meta.json"));
    std::printf("wrote spectrum.csv (%d bins)\n", spec.grid.n);
    return cli_ok;
}

int run_asymmetry(const CommonFlags& flags, const std::string& grid_text) {
    const SystemParams p = load_params(flags);
    int n = 1 << 13;
    double span_khz = 0.0;
    if (!grid_text.empty() && !parse_grid_2(grid_text, n, span_khz))
        throw std::invalid_argument("--grid must be N or N:span_khz");
    const double hi = span_khz > 0.0
                          ? hz_to_angular(span_khz * 1e3)
                          : std::max(p.omega_x, p.omega_y) + 3.0 * p.kappa;
    const double lo = 0.2 * std::min(p.omega_x, p.omega_y);
    const Spectrum asym = sideband_asymmetry(
        p, FrequencyGrid::centered(0.5 * (lo + hi), 0.5 * (hi - lo), n));
    write_spectrum_csv(asym, out_path(flags, "asymmetry.csv"));
    write_spectrum_sidecar(asym, &p, out_path(flags, "asymmetry.meta.json"));
    std::printf("wrote asymmetry.csv (%d bins)\n", asym.grid.n);
    return cli_ok;
}

int run_occupancy(const CommonFlags& flags, int samples) {
    const SystemParams p = load_params(flags);
    const OccupancyProfile prof = occupancy_profile(p, samples);
    write_occupancy_csv(prof.phi, prof.n, out_path(flags, "occupancy.csv"));
    std::ostringstream j;
    j << "{\n"
      << "  \"schema_version\": " << schema_version << ",\n"
      << "  \"n_min\": " << format_double(prof.n_min) << ",\n"
      << "  \"n_max\": " << format_double(prof.n_max) << ",\n"
      << "  \"phi_min_deg\": " << format_double(prof.phi_min * 180.0 / constants::pi)
      << ",\n"
      << "  \"phi_max_deg\": " << format_double(prof.phi_max * 180.0 / constants::pi)
      << ",\n"
      << "  \"n_eff_y\": " << format_double(prof.n_y) << ",\n"
      << "  \"n_eff_x\": " << format_double(prof.n_x) << "\n"
      << "}\n";
    write_text_file(out_path(flags, "occupancy_summary.json"), j.str());
    std::printf("n_min=%.4f n_max=%.4f (wrote occupancy.csv)\n", prof.n_min,
                prof.n_max);
    return cli_ok;
}

int run_fit(const CommonFlags& flags, const std::string& data_path,
            const std::string& free_list, bool amplitude) {
    const SystemParams base = load_params(flags);
    Spectrum data = read_spectrum_csv(data_path);
    data.norm = Normalization::shot_noise; // documented contract of `fit`

    FitConfig cfg;
    cfg.base = base;
    std::stringstream ss(free_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        bool known = false;
        for (FitParam fp : all_fit_params)
            if (tok == to_string(fp)) {
                cfg.free.push_back(fp);
                known = true;
            }
        if (!known)
            throw std::invalid_argument("unknown free parameter: " + tok);
    }
    if (cfg.free.empty())
        cfg.free.assign(all_fit_params.begin(), all_fit_params.end());
    for (FitParam fp : cfg.free) {
        const double x0 = get_param(base, fp);
        cfg.lower.push_back(x0 * 0.2);
        cfg.upper.push_back(x0 * 5.0);
    }
    cfg.amplitude_nuisance = amplitude;

    const FitResult fit = fit_spectrum(data, cfg);
    write_text_file(out_path(flags, "fit.json"), fit_result_to_json(fit));
    std::printf("fit %s, chi2 = %.6g (wrote fit.json)\n",
                to_string(fit.status).c_str(), fit.chi2);
    return fit.converged() ? cli_ok : cli_fit_failure;
}

int run_regress(const CommonFlags& flags, const std::string& data_path) {
    const auto points = read_pressure_points_csv(data_path);
    const LinearFit fit = regress_gamma_vs_pressure(points);
    std::ostringstream j;
    j << "{\n"
      << "  \"schema_version\": " << schema_version << ",\n"
      << "  \"intercept_hz\": " << format_double(angular_to_hz(fit.intercept))
      << ",\n"
      << "  \"slope_hz_per_pa\": " << format_double(angular_to_hz(fit.slope))
      << ",\n"
      << "  \"sigma_intercept_hz\": "
      << format_double(angular_to_hz(fit.sigma_intercept)) << ",\n"
      << "  \"sigma_slope_hz_per_pa\": "
      << format_double(angular_to_hz(fit.sigma_slope)) << ",\n"
      << "  \"chi2\": " << format_double(fit.chi2) << ",\n"
      << "  \"n_points\": " << fit.n_points << "\n"
      << "}\n";
    write_text_file(out_path(flags, "regression.json"), j.str());
    std::printf("Gamma/2pi = %.4g + %.4g * P  (wrote regression.json)\n",
                angular_to_hz(fit.intercept), angular_to_hz(fit.slope));
    return cli_ok;
}

int run_sweep_cmd(const CommonFlags& flags, const std::string& variable,
                  const std::string& grid_text, const std::string& outputs) {
    SweepSpec spec;
    const Config cfg = read_config(flags.config);
    ResolvedConfig resolved = resolve_config(cfg);
    spec.base = resolved.params;
    if (flags.eta)
        spec.base.eta = *flags.eta;
    spec.g_max = resolved.g_max;
    spec.law = resolved.law;
    spec.environment = resolved.environment;

    double start = 0.0, stop = 0.0;
    int n = 0;
    if (!parse_grid_3(grid_text, start, stop, n))
        throw std::invalid_argument("--grid must be start:stop:n");

    if (variable == "detuning")
        spec.variable = SweepVariable::detuning;
    else if (variable == "angle")
        spec.variable = SweepVariable::angle;
    else if (variable == "pressure")
        spec.variable = SweepVariable::pressure;
    else
        throw std::invalid_argument("--variable must be detuning|angle|pressure");

    for (int i = 0; i < n; ++i) {
        const double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
        double v = start + t * (stop - start);
        switch (spec.variable) {
        case SweepVariable::detuning: v = hz_to_angular(v * 1e3); break;  // kHz
        case SweepVariable::angle: v = v * constants::pi / 180.0; break;  // deg
        case SweepVariable::pressure: break;                              // Pa
        }
        spec.grid.push_back(v);
    }

    spec.outputs.spectrum = outputs.find("spectrum") != std::string::npos;
    spec.outputs.asymmetry = outputs.find("asymmetry") != std::string::npos;
    spec.outputs.occupancy = outputs.find("occupancy") != std::string::npos;

    const SweepArchive archive = run_sweep(spec);
    write_text_file(out_path(flags, "sweep.json"), sweep_archive_to_json(archive));
    int unstable = 0;
    for (std::size_t i = 0; i < archive.records.size(); ++i) {
        const auto& rec = archive.records[i];
        if (!rec.stable)
            ++unstable;
        char name[64];
        if (rec.spectrum) {
            std::snprintf(name, sizeof(name), "sweep_%03zu_spectrum.csv", i);
            write_spectrum_csv(*rec.spectrum, out_path(flags, name));
        }
        if (rec.asymmetry) {
            std::snprintf(name, sizeof(name), "sweep_%03zu_asymmetry.csv", i);
            write_spectrum_csv(*rec.asymmetry, out_path(flags, name));
        }
    }
    std::printf("sweep: %zu points, %d unstable (wrote sweep.json)\n",
                archive.records.size(), unstable);
    return cli_ok;
}

int run_psd(const CommonFlags& flags, const std::string& input, int segment,
            double overlap, const std::string& window_name) {
    const TimeSeries ts = read_timeseries(input);
    const int seg = segment > 0 ? segment
                                : segment_length_for_resolution(ts.sample_rate, 50.0);
    const Spectrum psd = welch_psd(ts, seg, overlap, window_from_name(window_name));
    write_spectrum_csv(psd, out_path(flags, "psd.csv"));
    write_spectrum_sidecar(psd, nullptr, out_path(flags, "psd.meta.json"));
    std::printf("wrote psd.csv (%d bins, %d segments)\n", psd.grid.n,
                psd.welch_segments);
    return cli_ok;
}

int run_normalize(const CommonFlags& flags, const std::string& input,
                  const std::string& band_text) {
    double lo_hz = 0.0, hi_hz = 0.0;
    if (std::sscanf(band_text.c_str(), "%lf:%lf", &lo_hz, &hi_hz) != 2)
        throw std::invalid_argument("--band must be lo_hz:hi_hz");
    Spectrum psd = read_spectrum_csv(input);
    psd.norm = Normalization::raw;
    const NormalizeResult res =
        normalize_to_shot_noise(psd, hz_to_angular(lo_hz), hz_to_angular(hi_hz));
    if (res.suspicious_bins > 0)
        std::fprintf(stderr,
                     "warning: %d band bins exceed 5x the median; the noise band "
                     "may overlap signal peaks\n",
                     res.suspicious_bins);
    write_spectrum_csv(res.spectrum, out_path(flags, "normalized.csv"));
    write_spectrum_sidecar(res.spectrum, nullptr,
                           out_path(flags, "normalized.meta.json"));
    std::printf("noise floor %.6g (wrote normalized.csv)\n", res.noise_floor);
    return cli_ok;
}

} // namespace

int cli_dispatch(const std::vector<std::string>& args) {
    CLI::App app{"lev2d: linearized 2D cavity optomechanics of a levitated "
                 "nanosphere (spectra, sideband asymmetry, occupancy, fits)"};
    app.require_subcommand(1);
    app.footer("exit codes: 0 ok, 2 bad arguments, 3 unstable system, "
               "4 fit failure, 5 I/O error");

    CommonFlags flags;
    std::string grid_text, free_list, data_path, variable, outputs = "occupancy";
    std::string input, band_text, window_name = "hann";
    int samples = 720, segment = 0;
    double overlap = 0.5;
    bool amplitude = false;

    auto* simulate = app.add_subcommand("simulate", "heterodyne spectrum");
    add_common(simulate, flags, true);
    simulate->add_option("--grid", grid_text, "N or N:span_khz");

    auto* asym = app.add_subcommand("asymmetry", "corrected sideband asymmetry");
    add_common(asym, flags, true);
    asym->add_option("--grid", grid_text, "N or N:span_khz");

    auto* occ = app.add_subcommand("occupancy", "effective occupancy vs direction");
    add_common(occ, flags, true);
    occ->add_option("--samples", samples, "phi samples in [0, pi)");

    auto* fit = app.add_subcommand("fit", "fit the model to a spectrum CSV");
    add_common(fit, flags, true);
    fit->add_option("--data", data_path, "shot-noise-normalized spectrum CSV")
        ->required();
    fit->add_option("--free", free_list,
                    "comma list of omega_x,omega_y,g_x,g_y,gamma_x,gamma_y "
                    "(default: all)");
    fit->add_flag("--amplitude", amplitude, "free overall (S-1) amplitude");

    auto* regress = app.add_subcommand("regress", "Gamma vs pressure line fit");
    add_common(regress, flags, false);
    regress->add_option("--data", data_path, "CSV pressure_pa,gamma_hz[,sigma_hz]")
        ->required();

    auto* sweep = app.add_subcommand("sweep", "parameter sweep driver");
    add_common(sweep, flags, true);
    sweep->add_option("--variable", variable, "detuning|angle|pressure")
        ->required();
    sweep->add_option("--grid", grid_text, "start:stop:n (kHz, deg, or Pa)")
        ->required();
    sweep->add_option("--outputs", outputs,
                      "comma list of occupancy,spectrum,asymmetry");

    auto* psd = app.add_subcommand("psd", "Welch PSD of a time series");
    add_common(psd, flags, false);
    psd->add_option("--input", input, "time series (.json header or .csv)")
        ->required();
    psd->add_option("--segment", segment, "segment length (default: 50 Hz resolution)");
    psd->add_option("--overlap", overlap, "segment overlap fraction [0, 0.9]");
    psd->add_option("--window", window_name, "rect|hann|hamming");

    auto* normalize_cmd = app.add_subcommand("normalize", "divide a PSD by its noise floor");
    add_common(normalize_cmd, flags, false);
    normalize_cmd->add_option("--input", input, "raw PSD CSV")->required();
    normalize_cmd->add_option("--band", band_text, "noise band lo_hz:hi_hz")->required();

    std::vector<std::string> argv_copy = args;
    std::vector<char*> argv;
    argv.reserve(argv_copy.size() + 1);
    static std::string prog = "lev2d";
    argv.push_back(prog.data());
    for (auto& a : argv_copy)
        argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli_ok : cli_bad_args;
    }

    try {
        if (simulate->parsed())
            return run_simulate(flags, grid_text);
        if (asym->parsed())
            return run_asymmetry(flags, grid_text);
        if (occ->parsed())
            return run_occupancy(flags, samples);
        if (fit->parsed())
            return run_fit(flags, data_path, free_list, amplitude);
        if (regress->parsed())
            return run_regress(flags, data_path);
        if (sweep->parsed())
            return run_sweep_cmd(flags, variable, grid_text, outputs);
        if (psd->parsed())
            return run_psd(flags, input, segment, overlap, window_name);
        if (normalize_cmd->parsed())
            return run_normalize(flags, input, band_text);
    } catch (const UnstableSystemError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return cli_unstable;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return cli_bad_args;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return cli_io_error;
    }
    return cli_bad_args;
}

} // namespace lev2d
