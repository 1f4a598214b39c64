#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lev2d/levmar.hpp"
#include "lev2d/params.hpp"
#include "lev2d/spectra.hpp"

namespace lev2d {

// Parameters that may be freed in a spectrum fit.  Delta, kappa, eta and
// omega_lo are measured independently and stay fixed.
enum class FitParam { omega_x, omega_y, g_x, g_y, gamma_x, gamma_y };

inline constexpr std::array<FitParam, 6> all_fit_params{
    FitParam::omega_x, FitParam::omega_y, FitParam::g_x,
    FitParam::g_y,     FitParam::gamma_x, FitParam::gamma_y};

const char* to_string(FitParam p);
double get_param(const SystemParams& params, FitParam p);
void set_param(SystemParams& params, FitParam p, double value);

enum class WeightMode {
    unit,     // sigma_i = 1
    welch,    // sigma_i = data_i / sqrt(n_segments): chi-squared statistics of
              // averaged periodograms
    explicit_sigma,
};

struct FitConfig {
    SystemParams base;             // fixed values + initial guesses for free ones
    std::vector<FitParam> free;    // subset of the six fit parameters
    std::vector<double> lower;     // bounds per free parameter [rad/s]
    std::vector<double> upper;
    WeightMode weights = WeightMode::welch;
    int welch_segments = 100;      // used by WeightMode::welch when the
                                   // spectrum carries no segment count
    std::vector<double> sigma;     // WeightMode::explicit_sigma
    bool amplitude_nuisance = false; // optional overall (S-1) scale factor
    LsqOptions optimizer;

    // Throws std::invalid_argument unless bounds bracket the initial guesses
    // and the free list has no duplicates.
    void validate() const;
};

struct FitResult {
    SystemParams params;            // full set with fitted values substituted
    std::vector<FitParam> free;
    std::vector<double> values;     // fitted values, X/Y label convention applied
    std::vector<double> sigmas;     // 1-sigma from the residual covariance
    double amplitude = 1.0;         // nuisance factor (1 when disabled)
    double amplitude_sigma = 0.0;
    double chi2 = 0.0;
    double reduced_chi2 = 0.0;
    LsqStatus status = LsqStatus::max_iterations;
    int n_iterations = 0;
    int n_evaluations = 0;
    int penalty_rejections = 0;     // unstable trial parameter sets hit
    std::vector<double> accepted_chi2;
    std::vector<double> residuals;
    std::vector<bool> at_bound;
    bool label_swapped = false;     // X/Y relabeled to enforce omega_x > omega_y

    bool converged() const {
        return status == LsqStatus::converged_ftol ||
               status == LsqStatus::converged_xtol ||
               status == LsqStatus::converged_gtol;
    }
};

// Weighted least-squares fit of the heterodyne model to a shot-noise-
// normalized spectrum.  Unstable trial parameter sets are rejected by a
// smooth penalty on the stability margin (and counted).  Reported results
// enforce omega_x > omega_y by relabeling when both frequencies are free.
FitResult fit_spectrum(const Spectrum& data, const FitConfig& cfg);

// Weighted linear regression Gamma = a + b P.
struct PressurePoint {
    double pressure = 0.0; // [Pa]
    double gamma = 0.0;    // [rad/s]
    double sigma = 0.0;    // 1-sigma uncertainty on gamma [rad/s]; 0 = unit weight
};

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double sigma_intercept = 0.0;
    double sigma_slope = 0.0;
    double cov_ab = 0.0;
    double chi2 = 0.0;
    int n_points = 0;
};

// Throws std::invalid_argument when fewer than two distinct pressures are
// given (rank deficiency).
LinearFit regress_gamma_vs_pressure(const std::vector<PressurePoint>& points);

// Ratio of two regression intercepts with first-order error propagation.
struct RatioEstimate {
    double value = 0.0;
    double sigma = 0.0;
};
RatioEstimate intercept_ratio(const LinearFit& num, const LinearFit& den);

// Pressure-normalized gas damping from a fitted slope:
//   Gamma_m / P = b hbar Omega / (k_B T).
// Linear in b, so angular in -> angular out (or Hz/Pa in -> Hz/Pa out).
double gamma_m_from_slope(double slope, double omega, double temperature);

// Chi-squared versus assumed detection efficiency.  For each eta the free
// parameters are refitted to the spectrum; the asymmetry objective evaluates
// the refitted model against the data-derived asymmetry.
struct EfficiencyScanRow {
    double eta = 0.0;
    double chi2_spectrum = 0.0;
    double chi2_asymmetry = 0.0;
    bool converged = false;
    SystemParams params;
};

struct EfficiencyScan {
    std::vector<EfficiencyScanRow> rows;
    double argmin_spectrum = 0.0;
    double argmin_asymmetry = 0.0;
};

// When refit = false the asymmetry is computed from the base parameters alone;
// eta cancels exactly and the asymmetry chi2 column is constant.
EfficiencyScan efficiency_scan(const Spectrum& spectrum_data,
                               const std::optional<Spectrum>& asymmetry_data,
                               const std::vector<double>& eta_grid,
                               const FitConfig& base_cfg, bool refit = true);

} // namespace lev2d
