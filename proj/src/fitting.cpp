#include "lev2d/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "lev2d/constants.hpp"
#include "lev2d/occupancy.hpp"

namespace lev2d {

const char* to_string(FitParam p) {
    switch (p) {
    case FitParam::omega_x: return "omega_x";
    case FitParam::omega_y: return "omega_y";
    case FitParam::g_x: return "g_x";
    case FitParam::g_y: return "g_y";
    case FitParam::gamma_x: return "gamma_x";
    case FitParam::gamma_y: return "gamma_y";
    }
    return "?";
}

double get_param(const SystemParams& params, FitParam p) {
    switch (p) {
    case FitParam::omega_x: return params.omega_x;
    case FitParam::omega_y: return params.omega_y;
    case FitParam::g_x: return params.g_x;
    case FitParam::g_y: return params.g_y;
    case FitParam::gamma_x: return params.gamma_x;
    case FitParam::gamma_y: return params.gamma_y;
    }
    return 0.0;
}

void set_param(SystemParams& params, FitParam p, double value) {
    switch (p) {
    case FitParam::omega_x: params.omega_x = value; break;
    case FitParam::omega_y: params.omega_y = value; break;
    case FitParam::g_x: params.g_x = value; break;
    case FitParam::g_y: params.g_y = value; break;
    case FitParam::gamma_x: params.gamma_x = value; break;
    case FitParam::gamma_y: params.gamma_y = value; break;
    }
}

void FitConfig::validate() const {
    base.validate();
    if (free.empty())
        throw std::invalid_argument("FitConfig: no free parameters");
    std::set<FitParam> seen(free.begin(), free.end());
    if (seen.size() != free.size())
        throw std::invalid_argument("FitConfig: duplicate free parameter");
    if (lower.size() != free.size() || upper.size() != free.size())
        throw std::invalid_argument("FitConfig: bounds must match free list");
    for (std::size_t j = 0; j < free.size(); ++j) {
        const double x0 = get_param(base, free[j]);
        if (!(lower[j] <= x0 && x0 <= upper[j]))
            throw std::invalid_argument(
                std::string("FitConfig: initial guess for ") + to_string(free[j]) +
                " outside bounds");
    }
    if (weights == WeightMode::explicit_sigma && sigma.empty())
        throw std::invalid_argument("FitConfig: explicit_sigma needs sigma vector");
}

namespace {

std::vector<double> bin_sigmas(const Spectrum& data, const FitConfig& cfg) {
    std::vector<double> sig(data.values.size(), 1.0);
    switch (cfg.weights) {
    case WeightMode::unit:
        break;
    case WeightMode::welch: {
        const int navg =
            data.welch_segments > 0 ? data.welch_segments : cfg.welch_segments;
        const double inv_sqrt = 1.0 / std::sqrt(std::max(navg, 1));
        for (std::size_t i = 0; i < sig.size(); ++i)
            sig[i] = std::max(std::abs(data.values[i]) * inv_sqrt, 1e-12);
        break;
    }
    case WeightMode::explicit_sigma:
        if (cfg.sigma.size() != data.values.size())
            throw std::invalid_argument("fit_spectrum: sigma size mismatch");
        sig = cfg.sigma;
        break;
    }
    return sig;
}

struct ModelContext {
    const Spectrum& data;
    const FitConfig& cfg;
    std::vector<double> sigma;
    bool with_amplitude;
    mutable int penalty_hits = 0;

    SystemParams params_at(const Eigen::VectorXd& x) const {
        SystemParams p = cfg.base;
        for (std::size_t j = 0; j < cfg.free.size(); ++j)
            set_param(p, cfg.free[j], x(static_cast<Eigen::Index>(j)));
        return p;
    }

    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
        const Eigen::Index m = static_cast<Eigen::Index>(data.values.size());
        Eigen::VectorXd r(m);
        SystemParams p = params_at(x);
        const double amp =
            with_amplitude ? x(static_cast<Eigen::Index>(cfg.free.size())) : 1.0;

        DriftSystem sys;
        bool ok = true;
        try {
            p.validate();
            sys = build_drift(p);
        } catch (const std::invalid_argument&) {
            ok = false;
        }
        double margin = 0.0;
        if (ok) {
            const EigenStructure es = eigenmodes(sys);
            margin = es.max_real;
            ok = es.stable;
        }
        if (!ok) {
            // smooth penalty pushing trial parameters back into the stable
            // region; counted and reported
            ++penalty_hits;
            const double pen = 1e6 * (1.0 + std::abs(margin));
            r.setConstant(pen);
            return r;
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            const double w = data.grid.omega(static_cast<int>(i));
            const double model = p.eta * (output_saa(p, w - p.omega_lo) +
                                          output_sadad(p, w + p.omega_lo)) +
                                 (1.0 - p.eta);
            const double scaled = 1.0 + amp * (model - 1.0);
            r(i) = (scaled - data.values[i]) / sigma[i];
        }
        return r;
    }
};

} // namespace

FitResult fit_spectrum(const Spectrum& data, const FitConfig& cfg) {
    cfg.validate();
    data.grid.validate();
    if (data.norm != Normalization::shot_noise)
        throw std::invalid_argument(
            "fit_spectrum: data must be shot-noise normalized");
    if (data.values.size() != static_cast<std::size_t>(data.grid.n))
        throw std::invalid_argument("fit_spectrum: value/grid size mismatch");

    ModelContext model{data, cfg, bin_sigmas(data, cfg), cfg.amplitude_nuisance, 0};

    const std::size_t nfree = cfg.free.size() + (cfg.amplitude_nuisance ? 1 : 0);
    Eigen::VectorXd x0(nfree), lo(nfree), hi(nfree);
    for (std::size_t j = 0; j < cfg.free.size(); ++j) {
        x0(j) = get_param(cfg.base, cfg.free[j]);
        lo(j) = cfg.lower[j];
        hi(j) = cfg.upper[j];
    }
    if (cfg.amplitude_nuisance) {
        x0(nfree - 1) = 1.0;
        lo(nfree - 1) = 0.1;
        hi(nfree - 1) = 10.0;
    }

    const LsqResult lsq = least_squares(model, x0, lo, hi, cfg.optimizer);

    FitResult res;
    res.free = cfg.free;
    res.params = model.params_at(lsq.x);
    res.status = lsq.status;
    res.n_iterations = lsq.n_iterations;
    res.n_evaluations = lsq.n_evaluations;
    res.penalty_rejections = model.penalty_hits;
    res.accepted_chi2 = lsq.accepted_chi2;
    res.chi2 = lsq.chi2;
    const int dof = static_cast<int>(data.values.size()) - static_cast<int>(nfree);
    res.reduced_chi2 = res.chi2 / std::max(dof, 1);
    const Eigen::VectorXd r = model(lsq.x);
    res.residuals.assign(r.data(), r.data() + r.size());

    res.values.resize(cfg.free.size());
    res.sigmas.resize(cfg.free.size());
    res.at_bound.resize(cfg.free.size());
    for (std::size_t j = 0; j < cfg.free.size(); ++j) {
        res.values[j] = lsq.x(j);
        res.sigmas[j] = std::sqrt(std::max(lsq.covariance(j, j), 0.0));
        res.at_bound[j] = lsq.at_lower[j] || lsq.at_upper[j];
    }
    if (cfg.amplitude_nuisance) {
        res.amplitude = lsq.x(nfree - 1);
        res.amplitude_sigma =
            std::sqrt(std::max(lsq.covariance(nfree - 1, nfree - 1), 0.0));
    }

    // Label convention: X is the higher-frequency mode.  Swap the X/Y triple
    // when both frequencies were free and came out inverted.
    auto index_of = [&](FitParam p) -> int {
        for (std::size_t j = 0; j < cfg.free.size(); ++j)
            if (cfg.free[j] == p)
                return static_cast<int>(j);
        return -1;
    };
    const int jx = index_of(FitParam::omega_x), jy = index_of(FitParam::omega_y);
    if (jx >= 0 && jy >= 0 && res.values[jx] < res.values[jy]) {
        auto swap_pair = [&](FitParam a, FitParam b) {
            const int ja = index_of(a), jb = index_of(b);
            if (ja >= 0 && jb >= 0) {
                std::swap(res.values[ja], res.values[jb]);
                std::swap(res.sigmas[ja], res.sigmas[jb]);
                std::swap(res.at_bound[ja], res.at_bound[jb]);
            }
        };
        swap_pair(FitParam::omega_x, FitParam::omega_y);
        swap_pair(FitParam::g_x, FitParam::g_y);
        swap_pair(FitParam::gamma_x, FitParam::gamma_y);
        res.label_swapped = true;
        for (std::size_t j = 0; j < cfg.free.size(); ++j)
            set_param(res.params, cfg.free[j], res.values[j]);
    }
    return res;
}

LinearFit regress_gamma_vs_pressure(const std::vector<PressurePoint>& points) {
    if (points.size() < 2)
        throw std::invalid_argument("regress: need at least two points");
    double pmin = points.front().pressure, pmax = pmin;
    for (const auto& pt : points) {
        pmin = std::min(pmin, pt.pressure);
        pmax = std::max(pmax, pt.pressure);
    }
    if (!(pmax > pmin))
        throw std::invalid_argument("regress: all pressures equal (rank deficient)");

    // standard weighted straight-line estimator
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& pt : points) {
        const double w = pt.sigma > 0.0 ? 1.0 / (pt.sigma * pt.sigma) : 1.0;
        sw += w;
        sx += w * pt.pressure;
        sy += w * pt.gamma;
        sxx += w * pt.pressure * pt.pressure;
        sxy += w * pt.pressure * pt.gamma;
    }
    const double det = sw * sxx - sx * sx;
    LinearFit fit;
    fit.n_points = static_cast<int>(points.size());
    fit.intercept = (sxx * sy - sx * sxy) / det;
    fit.slope = (sw * sxy - sx * sy) / det;
    fit.sigma_intercept = std::sqrt(sxx / det);
    fit.sigma_slope = std::sqrt(sw / det);
    fit.cov_ab = -sx / det;
    for (const auto& pt : points) {
        const double w = pt.sigma > 0.0 ? 1.0 / (pt.sigma * pt.sigma) : 1.0;
        const double dres = pt.gamma - fit.intercept - fit.slope * pt.pressure;
        fit.chi2 += w * dres * dres;
    }
    return fit;
}

RatioEstimate intercept_ratio(const LinearFit& num, const LinearFit& den) {
    RatioEstimate r;
    r.value = num.intercept / den.intercept;
    const double rel_num = num.sigma_intercept / num.intercept;
    const double rel_den = den.sigma_intercept / den.intercept;
    r.sigma = std::abs(r.value) * std::sqrt(rel_num * rel_num + rel_den * rel_den);
    return r;
}

double gamma_m_from_slope(double slope, double omega, double temperature) {
    if (!(omega > 0.0) || !(temperature > 0.0))
        throw std::invalid_argument("gamma_m_from_slope: need positive inputs");
    return slope * constants::hbar * omega / (constants::k_boltzmann * temperature);
}

namespace {

struct AsymmetryData {
    Spectrum spectrum;
    std::vector<double> sigma; // empty = unit weights
};

// Data asymmetry from a sampled heterodyne spectrum, with a floor raised well
// above the bin noise level (the ratio estimator is biased when the sideband
// signal is comparable to the noise) and first-order error propagation.
AsymmetryData asymmetry_data_from_spectrum(const Spectrum& sout,
                                           const SystemParams& params,
                                           int welch_segments) {
    const double rel_noise =
        welch_segments > 0 ? 1.0 / std::sqrt(double(welch_segments)) : 0.0;
    const double floor = std::max(default_asymmetry_floor, 20.0 * rel_noise);
    AsymmetryData data;
    data.spectrum = asymmetry_from_spectrum(sout, params, floor);
    if (rel_noise <= 0.0)
        return data;

    const int n = sout.grid.n;
    const int half = data.spectrum.grid.n;
    data.sigma.assign(half, 0.0);
    for (int k = 0; k < half; ++k) {
        if (!data.spectrum.bin_valid(k))
            continue;
        const int i_upper = n - half + k;
        const int i_lower = n - 1 - i_upper;
        const double num = sout.values[i_lower] - 1.0;
        const double den = sout.values[i_upper] - 1.0;
        const double rel = std::hypot(rel_noise * sout.values[i_lower] / num,
                                      rel_noise * sout.values[i_upper] / den);
        data.sigma[k] = std::abs(data.spectrum.values[k]) * rel;
    }
    return data;
}

double asymmetry_chi2(const AsymmetryData& data, const SystemParams& params) {
    const Spectrum& asym = data.spectrum;
    double chi2 = 0.0;
    int used = 0;
    for (int i = 0; i < asym.grid.n; ++i) {
        if (!asym.bin_valid(i))
            continue;
        const auto model = sideband_asymmetry_at(params, asym.grid.omega(i));
        if (!model)
            continue;
        double d = *model - asym.values[i];
        if (!data.sigma.empty() && data.sigma[i] > 0.0)
            d /= data.sigma[i];
        chi2 += d * d;
        ++used;
    }
    return used > 0 ? chi2 / used : 0.0;
}

} // namespace

EfficiencyScan efficiency_scan(const Spectrum& spectrum_data,
                               const std::optional<Spectrum>& asymmetry_data,
                               const std::vector<double>& eta_grid,
                               const FitConfig& base_cfg, bool refit) {
    base_cfg.validate();
    if (eta_grid.empty())
        throw std::invalid_argument("efficiency_scan: empty eta grid");
    for (double e : eta_grid)
        if (!(e > 0.0 && e <= 1.0))
            throw std::invalid_argument("efficiency_scan: eta must lie in (0,1]");

    EfficiencyScan scan;
    AsymmetryData asym;
    if (asymmetry_data) {
        asym.spectrum = *asymmetry_data; // caller-supplied: unit weights
    } else {
        // welch_segments == 0 means noiseless model data: keep the default floor
        asym = asymmetry_data_from_spectrum(spectrum_data, base_cfg.base,
                                            spectrum_data.welch_segments);
    }

    for (double eta : eta_grid) {
        EfficiencyScanRow row;
        row.eta = eta;
        FitConfig cfg = base_cfg;
        cfg.base.eta = eta;
        if (refit) {
            try {
                const FitResult fit = fit_spectrum(spectrum_data, cfg);
                row.converged = fit.converged();
                row.params = fit.params;
                row.chi2_spectrum = fit.chi2;
            } catch (const std::exception&) {
                // leave a gap in the curve, do not abort the scan
                row.converged = false;
                row.params = cfg.base;
                row.chi2_spectrum = std::numeric_limits<double>::quiet_NaN();
                scan.rows.push_back(row);
                continue;
            }
        } else {
            row.params = cfg.base;
            row.converged = true;
            ModelContext model{spectrum_data, cfg, bin_sigmas(spectrum_data, cfg),
                               false, 0};
            Eigen::VectorXd x0(cfg.free.size());
            for (std::size_t j = 0; j < cfg.free.size(); ++j)
                x0(j) = get_param(cfg.base, cfg.free[j]);
            row.chi2_spectrum = model(x0).squaredNorm();
        }
        row.chi2_asymmetry = asymmetry_chi2(asym, row.params);
        scan.rows.push_back(row);
    }

    double best_s = std::numeric_limits<double>::infinity();
    double best_a = std::numeric_limits<double>::infinity();
    for (const auto& row : scan.rows) {
        if (row.converged && row.chi2_spectrum < best_s) {
            best_s = row.chi2_spectrum;
            scan.argmin_spectrum = row.eta;
        }
        if (row.converged && row.chi2_asymmetry < best_a) {
            best_a = row.chi2_asymmetry;
            scan.argmin_asymmetry = row.eta;
        }
    }
    return scan;
}

} // namespace lev2d
