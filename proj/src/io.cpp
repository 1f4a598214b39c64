#include "lev2d/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lev2d/constants.hpp"

namespace lev2d {

using nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double Config::get(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end())
        throw std::invalid_argument("config: missing key '" + key + "'");
    return it->second;
}

double Config::get_or(const std::string& key, double fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

Config parse_config_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = true;
            for (char ch : line)
                if (!std::isspace(static_cast<unsigned char>(ch)))
                    blank = false;
            if (blank)
                continue;
            throw std::invalid_argument("config: malformed line " +
                                        std::to_string(lineno));
        }
        auto trim = [](std::string s) {
            const char* ws = " \t\r\n";
            const auto b = s.find_first_not_of(ws);
            const auto e = s.find_last_not_of(ws);
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::invalid_argument("config: empty key or value at line " +
                                        std::to_string(lineno));
        char* end = nullptr;
        const double parsed = std::strtod(val.c_str(), &end);
        if (end == val.c_str() || *end != '\0')
            throw std::invalid_argument("config: non-numeric value for '" + key +
                                        "'");
        cfg.values[key] = parsed;
    }
    return cfg;
}

Config parse_config_json(const std::string& text) {
    Config cfg;
    const auto j = ordered_json::parse(text);
    if (!j.is_object())
        throw std::invalid_argument("config: JSON root must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "schema_version")
            continue;
        if (!value.is_number())
            throw std::invalid_argument("config: non-numeric JSON value for '" +
                                        key + "'");
        cfg.values[key] = value.get<double>();
    }
    return cfg;
}

Config read_config(const std::string& path) {
    const std::string text = read_text_file(path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        return parse_config_json(text);
    return parse_config_text(text);
}

ResolvedConfig resolve_config(const Config& cfg) {
    ResolvedConfig out;
    SystemParams& p = out.params;
    p.detuning = hz_to_angular(cfg.get("detuning_hz"));
    p.kappa = hz_to_angular(cfg.get("kappa_hz"));
    p.omega_x = hz_to_angular(cfg.get("omega_x_hz"));
    p.omega_y = hz_to_angular(cfg.get("omega_y_hz"));
    p.eta = cfg.get("eta");
    p.omega_lo = hz_to_angular(cfg.get("omega_lo_hz"));

    if (cfg.has("g_max_hz")) {
        out.g_max = hz_to_angular(cfg.get("g_max_hz"));
        out.theta = cfg.get_or("theta_deg", 90.0) * constants::pi / 180.0;
    }
    if (cfg.has("g_x_hz") && cfg.has("g_y_hz")) {
        p.g_x = hz_to_angular(cfg.get("g_x_hz"));
        p.g_y = hz_to_angular(cfg.get("g_y_hz"));
    } else if (out.g_max) {
        const double s = std::sin(*out.theta), c = std::cos(*out.theta);
        p.g_x = *out.g_max * s * s;
        p.g_y = *out.g_max * std::sqrt(p.omega_x / p.omega_y) * s * c;
    } else {
        throw std::invalid_argument(
            "config: need g_x_hz/g_y_hz or g_max_hz (+theta_deg)");
    }

    if (cfg.has("law_a_x_hz")) {
        MeasuredDecoherenceLaw law;
        law.a_x = hz_to_angular(cfg.get("law_a_x_hz"));
        law.b_x = hz_to_angular(cfg.get("law_b_x_hz_per_pa"));
        law.a_y = hz_to_angular(cfg.get("law_a_y_hz"));
        law.b_y = hz_to_angular(cfg.get("law_b_y_hz_per_pa"));
        law.temperature = cfg.get_or("law_temperature_k", 293.0);
        out.law = law;
    }
    if (cfg.has("pressure_pa"))
        out.pressure_pa = cfg.get("pressure_pa");

    if (cfg.has("gamma_m_hz") && cfg.has("gamma_x_hz") && cfg.has("gamma_y_hz")) {
        p.gamma_m = hz_to_angular(cfg.get("gamma_m_hz"));
        p.gamma_x = hz_to_angular(cfg.get("gamma_x_hz"));
        p.gamma_y = hz_to_angular(cfg.get("gamma_y_hz"));
    } else if (out.law && out.pressure_pa) {
        const DecoherenceBudget budget = budget_from_measured_law(
            *out.law, *out.pressure_pa, p.omega_x, p.omega_y);
        p.gamma_m = budget.gamma_m;
        p.gamma_x = budget.total_x();
        p.gamma_y = budget.total_y();
    } else {
        throw std::invalid_argument(
            "config: need gamma_m_hz/gamma_x_hz/gamma_y_hz or a measured law "
            "block with pressure_pa");
    }

    if (cfg.has("radius_m")) {
        ParticleEnvironment env;
        env.radius = cfg.get("radius_m");
        env.mass = cfg.get("mass_kg");
        env.gas_mass = cfg.get("gas_mass_kg");
        env.temperature = cfg.get_or("temperature_k", 293.0);
        env.pressure = cfg.get_or("pressure_pa", 0.0);
        env.tweezer_intensity = cfg.get("tweezer_intensity_w_m2");
        env.cross_section = cfg.get("cross_section_m2");
        env.laser_omega = hz_to_angular(cfg.get("laser_freq_hz"));
        env.cavity_omega = hz_to_angular(cfg.get("cavity_freq_hz"));
        env.cavity_volume = cfg.get("cavity_volume_m3");
        env.polarizability = cfg.get("polarizability_si");
        env.theta = cfg.get_or("theta_deg", 90.0) * constants::pi / 180.0;
        out.environment = env;
    }

    p.validate();
    return out;
}

std::string config_to_text(const SystemParams& p) {
    std::ostringstream out;
    out << "# lev2d system parameters (Hz / dimensionless)\n";
    out << "detuning_hz = " << format_double(angular_to_hz(p.detuning)) << "\n";
    out << "kappa_hz = " << format_double(angular_to_hz(p.kappa)) << "\n";
    out << "omega_x_hz = " << format_double(angular_to_hz(p.omega_x)) << "\n";
    out << "omega_y_hz = " << format_double(angular_to_hz(p.omega_y)) << "\n";
    out << "g_x_hz = " << format_double(angular_to_hz(p.g_x)) << "\n";
    out << "g_y_hz = " << format_double(angular_to_hz(p.g_y)) << "\n";
    out << "gamma_m_hz = " << format_double(angular_to_hz(p.gamma_m)) << "\n";
    out << "gamma_x_hz = " << format_double(angular_to_hz(p.gamma_x)) << "\n";
    out << "gamma_y_hz = " << format_double(angular_to_hz(p.gamma_y)) << "\n";
    out << "eta = " << format_double(p.eta) << "\n";
    out << "omega_lo_hz = " << format_double(angular_to_hz(p.omega_lo)) << "\n";
    return out.str();
}

namespace {

ordered_json params_json_object(const SystemParams& p) {
    ordered_json j;
    j["schema_version"] = schema_version;
    j["detuning_hz"] = angular_to_hz(p.detuning);
    j["kappa_hz"] = angular_to_hz(p.kappa);
    j["omega_x_hz"] = angular_to_hz(p.omega_x);
    j["omega_y_hz"] = angular_to_hz(p.omega_y);
    j["g_x_hz"] = angular_to_hz(p.g_x);
    j["g_y_hz"] = angular_to_hz(p.g_y);
    j["gamma_m_hz"] = angular_to_hz(p.gamma_m);
    j["gamma_x_hz"] = angular_to_hz(p.gamma_x);
    j["gamma_y_hz"] = angular_to_hz(p.gamma_y);
    j["eta"] = p.eta;
    j["omega_lo_hz"] = angular_to_hz(p.omega_lo);
    return j;
}

const char* kind_name(SpectrumKind k) {
    switch (k) {
    case SpectrumKind::heterodyne_full: return "heterodyne-full";
    case SpectrumKind::anti_stokes: return "anti-Stokes";
    case SpectrumKind::stokes: return "Stokes";
    case SpectrumKind::position: return "position";
    case SpectrumKind::momentum: return "momentum";
    case SpectrumKind::asymmetry: return "asymmetry";
    case SpectrumKind::raw_psd: return "raw-psd";
    }
    return "?";
}

} // namespace

std::string params_to_json(const SystemParams& p) {
    return params_json_object(p).dump(2) + "\n";
}

SystemParams params_from_json(const std::string& text) {
    const Config cfg = parse_config_json(text);
    SystemParams p;
    p.detuning = hz_to_angular(cfg.get("detuning_hz"));
    p.kappa = hz_to_angular(cfg.get("kappa_hz"));
    p.omega_x = hz_to_angular(cfg.get("omega_x_hz"));
    p.omega_y = hz_to_angular(cfg.get("omega_y_hz"));
    p.g_x = hz_to_angular(cfg.get("g_x_hz"));
    p.g_y = hz_to_angular(cfg.get("g_y_hz"));
    p.gamma_m = hz_to_angular(cfg.get("gamma_m_hz"));
    p.gamma_x = hz_to_angular(cfg.get("gamma_x_hz"));
    p.gamma_y = hz_to_angular(cfg.get("gamma_y_hz"));
    p.eta = cfg.get("eta");
    p.omega_lo = hz_to_angular(cfg.get("omega_lo_hz"));
    p.validate();
    return p;
}

void write_spectrum_csv(const Spectrum& spec, const std::string& path) {
    std::ostringstream out;
    const bool with_valid = !spec.valid.empty();
    out << (with_valid ? "frequency_hz,value,valid\n" : "frequency_hz,value\n");
    for (int i = 0; i < spec.grid.n; ++i) {
        out << format_double(angular_to_hz(spec.grid.omega(i))) << ","
            << format_double(spec.values[i]);
        if (with_valid)
            out << "," << (spec.valid[i] ? 1 : 0);
        out << "\n";
    }
    write_text_file(path, out.str());
}

Spectrum read_spectrum_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("spectrum csv: empty file " + path);
    const bool with_valid = line.find("valid") != std::string::npos;
    std::vector<double> freqs, values;
    std::vector<std::uint8_t> valid;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        double f = 0.0, v = 0.0;
        int ok = 1;
        if (with_valid) {
            if (std::sscanf(line.c_str(), "%lf,%lf,%d", &f, &v, &ok) != 3)
                throw std::invalid_argument("spectrum csv: malformed row");
        } else if (std::sscanf(line.c_str(), "%lf,%lf", &f, &v) != 2) {
            throw std::invalid_argument("spectrum csv: malformed row");
        }
        freqs.push_back(hz_to_angular(f));
        values.push_back(v);
        if (with_valid)
            valid.push_back(static_cast<std::uint8_t>(ok));
    }
    if (freqs.size() < 2)
        throw std::invalid_argument("spectrum csv: need at least two rows");

    Spectrum spec;
    spec.grid.omega_start = freqs.front();
    spec.grid.n = static_cast<int>(freqs.size());
    spec.grid.domega = (freqs.back() - freqs.front()) / (freqs.size() - 1);
    spec.grid.validate();
    for (std::size_t i = 1; i < freqs.size(); ++i) {
        const double step = freqs[i] - freqs[i - 1];
        if (std::abs(step - spec.grid.domega) > 1e-9 * std::abs(spec.grid.domega))
            throw std::invalid_argument("spectrum csv: grid not uniform");
    }
    spec.values = std::move(values);
    spec.valid = std::move(valid);
    return spec;
}

void write_spectrum_sidecar(const Spectrum& spec, const SystemParams* params,
                            const std::string& path) {
    ordered_json j;
    j["schema_version"] = schema_version;
    j["kind"] = kind_name(spec.kind);
    j["normalization"] =
        spec.norm == Normalization::shot_noise ? "shot-noise-normalized" : "raw";
    j["grid"] = {{"n", spec.grid.n},
                 {"f_start_hz", angular_to_hz(spec.grid.omega_start)},
                 {"df_hz", angular_to_hz(spec.grid.domega)}};
    if (spec.welch_segments > 0)
        j["welch_segments"] = spec.welch_segments;
    if (params != nullptr) {
        j["params"] = params_json_object(*params);
        j["params_hash"] = params->hash();
    }
    write_text_file(path, j.dump(2) + "\n");
}

void write_occupancy_csv(const std::vector<double>& phi_rad,
                         const std::vector<double>& n_eff,
                         const std::string& path) {
    std::ostringstream out;
    out << "phi_deg,n_eff\n";
    for (std::size_t i = 0; i < phi_rad.size(); ++i)
        out << format_double(phi_rad[i] * 180.0 / constants::pi) << ","
            << format_double(n_eff[i]) << "\n";
    write_text_file(path, out.str());
}

TimeSeries read_timeseries(const std::string& path) {
    TimeSeries ts;
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
        std::istringstream in(read_text_file(path));
        std::string line;
        std::getline(in, line); // header
        std::vector<double> t, x;
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            double a = 0.0, b = 0.0;
            if (std::sscanf(line.c_str(), "%lf,%lf", &a, &b) != 2)
                throw std::invalid_argument("timeseries csv: malformed row");
            t.push_back(a);
            x.push_back(b);
        }
        if (t.size() < 3)
            throw std::invalid_argument("timeseries csv: too short");
        const double dt = (t.back() - t.front()) / (t.size() - 1);
        for (std::size_t i = 1; i < t.size(); ++i)
            if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt)
                throw std::invalid_argument("timeseries csv: non-uniform sampling");
        ts.sample_rate = 1.0 / dt;
        ts.samples = std::move(x);
        return ts;
    }

    const auto j = ordered_json::parse(read_text_file(path));
    ts.sample_rate = j.at("sample_rate_hz").get<double>();
    const auto n = j.at("n_samples").get<std::size_t>();
    if (j.at("dtype").get<std::string>() != "float64-le")
        throw std::invalid_argument("timeseries: unsupported dtype");
    std::string bin_path = j.value("data_file", std::string());
    if (bin_path.empty()) {
        bin_path = path;
        const auto dot = bin_path.rfind('.');
        bin_path = bin_path.substr(0, dot) + ".bin";
    } else if (bin_path.find('/') == std::string::npos) {
        const auto slash = path.rfind('/');
        if (slash != std::string::npos)
            bin_path = path.substr(0, slash + 1) + bin_path;
    }
    ts.pressure_pa = j.value("pressure_pa", 0.0);
    ts.detuning_hz = j.value("detuning_hz", 0.0);
    ts.angle_deg = j.value("angle_deg", 0.0);
    ts.timestamp = j.value("timestamp", std::string());

    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin)
        throw std::runtime_error("timeseries: cannot open " + bin_path);
    ts.samples.resize(n);
    bin.read(reinterpret_cast<char*>(ts.samples.data()),
             static_cast<std::streamsize>(n * sizeof(double)));
    if (static_cast<std::size_t>(bin.gcount()) != n * sizeof(double))
        throw std::runtime_error("timeseries: short read from " + bin_path);
    return ts;
}

void write_timeseries(const TimeSeries& ts, const std::string& json_path,
                      const std::string& bin_path) {
    ordered_json j;
    j["schema_version"] = schema_version;
    j["sample_rate_hz"] = ts.sample_rate;
    j["n_samples"] = ts.samples.size();
    j["dtype"] = "float64-le";
    const auto slash = bin_path.rfind('/');
    j["data_file"] = slash == std::string::npos ? bin_path
                                                : bin_path.substr(slash + 1);
    if (ts.pressure_pa != 0.0)
        j["pressure_pa"] = ts.pressure_pa;
    if (ts.detuning_hz != 0.0)
        j["detuning_hz"] = ts.detuning_hz;
    if (ts.angle_deg != 0.0)
        j["angle_deg"] = ts.angle_deg;
    if (!ts.timestamp.empty())
        j["timestamp"] = ts.timestamp;
    write_text_file(json_path, j.dump(2) + "\n");

    std::ofstream bin(bin_path, std::ios::binary);
    if (!bin)
        throw std::runtime_error("timeseries: cannot write " + bin_path);
    bin.write(reinterpret_cast<const char*>(ts.samples.data()),
              static_cast<std::streamsize>(ts.samples.size() * sizeof(double)));
}

std::string fit_result_to_json(const FitResult& fit) {
    ordered_json j;
    j["schema_version"] = schema_version;
    j["status"] = to_string(fit.status);
    j["converged"] = fit.converged();
    j["chi2"] = fit.chi2;
    j["reduced_chi2"] = fit.reduced_chi2;
    j["n_iterations"] = fit.n_iterations;
    j["n_evaluations"] = fit.n_evaluations;
    j["penalty_rejections"] = fit.penalty_rejections;
    j["label_swapped"] = fit.label_swapped;
    ordered_json fitted;
    for (std::size_t k = 0; k < fit.free.size(); ++k) {
        ordered_json row;
        row["value_hz"] = angular_to_hz(fit.values[k]);
        row["sigma_hz"] = angular_to_hz(fit.sigmas[k]);
        row["at_bound"] = static_cast<bool>(fit.at_bound[k]);
        fitted[to_string(fit.free[k])] = row;
    }
    j["fitted"] = fitted;
    if (fit.amplitude != 1.0 || fit.amplitude_sigma != 0.0) {
        j["amplitude"] = fit.amplitude;
        j["amplitude_sigma"] = fit.amplitude_sigma;
    }
    j["params"] = params_json_object(fit.params);
    return j.dump(2) + "\n";
}

std::vector<PressurePoint> read_pressure_points_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::getline(in, line); // header: pressure_pa,gamma_hz[,sigma_hz]
    std::vector<PressurePoint> points;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        PressurePoint pt;
        double gamma_hz = 0.0, sigma_hz = 0.0;
        const int n =
            std::sscanf(line.c_str(), "%lf,%lf,%lf", &pt.pressure, &gamma_hz,
                        &sigma_hz);
        if (n < 2)
            throw std::invalid_argument("pressure csv: malformed row");
        pt.gamma = hz_to_angular(gamma_hz);
        pt.sigma = n == 3 ? hz_to_angular(sigma_hz) : 0.0;
        points.push_back(pt);
    }
    return points;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out)
        throw std::runtime_error("short write to " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace lev2d
