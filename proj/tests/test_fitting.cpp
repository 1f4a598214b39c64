#include <doctest.h>

#include <random>

#include "lev2d/fitting.hpp"
#include "test_helpers.hpp"

using namespace lev2d;
using namespace lev2d::testing;

namespace {

Spectrum synthetic_spectrum(const SystemParams& p, int n, double noise_frac,
                            std::uint64_t seed) {
    Spectrum s = output_spectrum(p, default_heterodyne_grid(p, n));
    if (noise_frac > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (double& v : s.values)
            v *= 1.0 + noise_frac * gauss(rng);
        // welch-mode weights: sigma = v / sqrt(n_segments)
        s.welch_segments =
            static_cast<int>(std::lround(1.0 / (noise_frac * noise_frac)));
    }
    return s;
}

FitConfig config_for(const SystemParams& truth, std::vector<FitParam> free,
                     double perturb, std::uint64_t seed) {
    FitConfig cfg;
    cfg.base = truth;
    cfg.free = std::move(free);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (FitParam fp : cfg.free) {
        const double x0 = get_param(truth, fp);
        set_param(cfg.base, fp, x0 * (1.0 + perturb * uni(rng)));
        cfg.lower.push_back(x0 * 0.3);
        cfg.upper.push_back(x0 * 3.0);
    }
    return cfg;
}

} // namespace

TEST_CASE("noiseless synthetic data is recovered exactly") {
    const SystemParams truth = fig6_params();
    const Spectrum data = synthetic_spectrum(truth, 4096, 0.0, 0);
    FitConfig cfg = config_for(
        truth, {FitParam::omega_x, FitParam::omega_y, FitParam::g_x, FitParam::g_y,
                FitParam::gamma_x, FitParam::gamma_y},
        0.03, 11);
    cfg.weights = WeightMode::unit;

    const FitResult fit = fit_spectrum(data, cfg);
    CHECK(fit.converged());
    for (std::size_t j = 0; j < fit.free.size(); ++j)
        CHECK(rel_diff(fit.values[j], get_param(truth, fit.free[j])) < 1e-6);
    CHECK(fit.chi2 < 1e-12);
}

TEST_CASE("accepted chi2 history is monotone non-increasing") {
    const SystemParams truth = fig6_params();
    const Spectrum data = synthetic_spectrum(truth, 2048, 0.01, 42);
    const FitConfig cfg = config_for(
        truth, {FitParam::g_x, FitParam::g_y, FitParam::gamma_x, FitParam::gamma_y},
        0.05, 12);
    const FitResult fit = fit_spectrum(data, cfg);
    REQUIRE(fit.accepted_chi2.size() >= 2);
    for (std::size_t k = 1; k < fit.accepted_chi2.size(); ++k)
        CHECK(fit.accepted_chi2[k] <= fit.accepted_chi2[k - 1]);
}

TEST_CASE("noisy synthetic data is recovered within 3 sigma") {
    const SystemParams truth = fig6_params();
    const Spectrum data = synthetic_spectrum(truth, 4096, 0.01, 777);
    const FitConfig cfg = config_for(
        truth, {FitParam::omega_x, FitParam::omega_y, FitParam::g_x, FitParam::g_y,
                FitParam::gamma_x, FitParam::gamma_y},
        0.02, 13);
    const FitResult fit = fit_spectrum(data, cfg);
    CHECK(fit.converged());
    for (std::size_t j = 0; j < fit.free.size(); ++j) {
        const double err = std::abs(fit.values[j] - get_param(truth, fit.free[j]));
        CHECK(err < 3.0 * fit.sigmas[j]);
    }
    // reduced chi2 near one for correctly weighted noise
    CHECK(fit.reduced_chi2 > 0.7);
    CHECK(fit.reduced_chi2 < 1.3);
}

TEST_CASE("fixed seed and data give bit-identical results") {
    const SystemParams truth = fig6_params();
    const Spectrum data = synthetic_spectrum(truth, 1024, 0.01, 5);
    const FitConfig cfg = config_for(
        truth, {FitParam::g_x, FitParam::gamma_x}, 0.05, 14);
    const FitResult a = fit_spectrum(data, cfg);
    const FitResult b = fit_spectrum(data, cfg);
    CHECK(a.values == b.values);
    CHECK(a.sigmas == b.sigmas);
    CHECK(a.chi2 == b.chi2);
    CHECK(a.accepted_chi2 == b.accepted_chi2);
}

TEST_CASE("X/Y label convention is enforced by relabeling") {
    // same physical system with the labels swapped at construction
    SystemParams swapped = fig6_params();
    std::swap(swapped.omega_x, swapped.omega_y);
    std::swap(swapped.g_x, swapped.g_y);
    std::swap(swapped.gamma_x, swapped.gamma_y);

    const Spectrum data = synthetic_spectrum(swapped, 2048, 0.0, 0);
    const FitConfig cfg = config_for(
        swapped, {FitParam::omega_x, FitParam::omega_y, FitParam::g_x, FitParam::g_y,
                  FitParam::gamma_x, FitParam::gamma_y},
        0.01, 15);
    const FitResult fit = fit_spectrum(data, cfg);
    CHECK(fit.converged());
    CHECK(fit.label_swapped);
    CHECK(fit.params.omega_x > fit.params.omega_y);
    CHECK(rel_diff(fit.params.omega_x, fig6_params().omega_x) < 1e-5);
    CHECK(rel_diff(fit.params.g_x, fig6_params().g_x) < 1e-4);
}

TEST_CASE("amplitude nuisance recovers an overall signal scale") {
    const SystemParams truth = fig6_params();
    Spectrum data = synthetic_spectrum(truth, 2048, 0.0, 0);
    for (double& v : data.values)
        v = 1.0 + 1.3 * (v - 1.0);
    FitConfig cfg =
        config_for(truth, {FitParam::g_x, FitParam::g_y}, 0.02, 16);
    cfg.amplitude_nuisance = true;
    cfg.weights = WeightMode::unit;
    const FitResult fit = fit_spectrum(data, cfg);
    CHECK(fit.converged());
    CHECK(fit.amplitude == doctest::Approx(1.3).epsilon(1e-4));
    CHECK(rel_diff(fit.params.g_x, truth.g_x) < 1e-5);
}

TEST_CASE("parameter pinned at a bound is flagged") {
    const SystemParams truth = fig6_params();
    const Spectrum data = synthetic_spectrum(truth, 1024, 0.0, 0);
    FitConfig cfg = config_for(truth, {FitParam::g_x}, 0.0, 17);
    // exclude the truth from the box: the fit must end pinned at the upper bound
    set_param(cfg.base, FitParam::g_x, truth.g_x * 0.90);
    cfg.lower[0] = truth.g_x * 0.5;
    cfg.upper[0] = truth.g_x * 0.95;
    const FitResult fit = fit_spectrum(data, cfg);
    CHECK(fit.at_bound[0]);
    CHECK(fit.values[0] == doctest::Approx(truth.g_x * 0.95).epsilon(1e-9));
}

TEST_CASE("config validation") {
    const SystemParams truth = fig6_params();
    FitConfig cfg = config_for(truth, {FitParam::g_x}, 0.0, 18);
    cfg.lower[0] = truth.g_x * 2.0; // guess below the bracket
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = config_for(truth, {FitParam::g_x, FitParam::g_x}, 0.0, 19);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("regression: exact line through two points") {
    std::vector<PressurePoint> pts{{1e-6, two_pi * (2.0e3 + 7.0e8 * 1e-6), 0.0},
                                   {1e-5, two_pi * (2.0e3 + 7.0e8 * 1e-5), 0.0}};
    const LinearFit fit = regress_gamma_vs_pressure(pts);
    CHECK(rel_diff(angular_to_hz(fit.intercept), 2.0e3) < 1e-12);
    CHECK(rel_diff(angular_to_hz(fit.slope), 7.0e8) < 1e-12);
    CHECK(fit.chi2 < 1e-12 * fit.intercept * fit.intercept);
}

TEST_CASE("regression: residuals on exact linear data stay at rounding level") {
    std::vector<PressurePoint> pts;
    for (int k = 0; k < 12; ++k) {
        const double pr = 1e-6 * std::pow(10.0, k / 6.0);
        pts.push_back({pr, two_pi * (2.79e3 + 7.05e8 * pr), two_pi * 50.0});
    }
    const LinearFit fit = regress_gamma_vs_pressure(pts);
    CHECK(rel_diff(angular_to_hz(fit.intercept), 2.79e3) < 1e-12);
    CHECK(rel_diff(angular_to_hz(fit.slope), 7.05e8) < 1e-12);
}

TEST_CASE("regression: noisy synthetic slope/intercept within 3 sigma") {
    std::mt19937_64 rng(2718);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double a_true = two_pi * 2.79e3, b_true = two_pi * 7.05e8;
    std::vector<PressurePoint> pts;
    for (int k = 0; k < 24; ++k) {
        const double pr = 1e-6 * std::pow(10.0, 1.5 * k / 23.0);
        const double gamma = a_true + b_true * pr;
        const double sigma = 0.05 * gamma;
        pts.push_back({pr, gamma + sigma * gauss(rng), sigma});
    }
    const LinearFit fit = regress_gamma_vs_pressure(pts);
    CHECK(std::abs(fit.intercept - a_true) < 3.0 * fit.sigma_intercept);
    CHECK(std::abs(fit.slope - b_true) < 3.0 * fit.sigma_slope);
}

TEST_CASE("regression: rank deficiency is rejected") {
    std::vector<PressurePoint> pts{{1e-6, 1.0, 0.0}, {1e-6, 2.0, 0.0}};
    CHECK_THROWS_AS(regress_gamma_vs_pressure(pts), std::invalid_argument);
}

TEST_CASE("intercept ratio with propagated error") {
    // noiseless intercepts at the published values reproduce a_x/a_y = 1.42
    LinearFit fx, fy;
    fx.intercept = two_pi * 2.79e3;
    fx.sigma_intercept = two_pi * 0.06e3;
    fy.intercept = two_pi * 1.97e3;
    fy.sigma_intercept = two_pi * 0.15e3;
    const RatioEstimate r = intercept_ratio(fx, fy);
    CHECK(r.value == doctest::Approx(1.42).epsilon(0.01));
    CHECK(r.sigma == doctest::Approx(0.11).epsilon(0.15));
}

TEST_CASE("slope to gas damping conversion") {
    // published slopes: 14.4 Hz/Pa (X), 14.0 Hz/Pa (Y) at 293 K
    const double x = gamma_m_from_slope(7.05e8, two_pi * 128e3, 293.0);
    CHECK(x == doctest::Approx(14.4).epsilon(0.05));
    const double y = gamma_m_from_slope(7.64e8, two_pi * 115e3, 293.0);
    CHECK(y == doctest::Approx(14.0).epsilon(0.05));
    // explicit 1/T
    CHECK(gamma_m_from_slope(7.05e8, two_pi * 128e3, 586.0) ==
          doctest::Approx(x / 2));
}

TEST_CASE("efficiency scan: single-eta grid equals the plain fit") {
    const SystemParams truth = fig6_params();
    const Spectrum data = synthetic_spectrum(truth, 1024, 0.0, 0);
    FitConfig cfg = config_for(truth, {FitParam::g_x, FitParam::gamma_x}, 0.02, 20);
    const EfficiencyScan scan =
        efficiency_scan(data, std::nullopt, {truth.eta}, cfg);
    REQUIRE(scan.rows.size() == 1);
    FitConfig direct = cfg;
    direct.base.eta = truth.eta;
    const FitResult fit = fit_spectrum(data, direct);
    CHECK(scan.rows[0].chi2_spectrum == doctest::Approx(fit.chi2));
    CHECK(scan.argmin_spectrum == truth.eta);
}

TEST_CASE("efficiency scan without refit has a constant asymmetry objective") {
    const SystemParams truth = fig6_params();
    const Spectrum data = synthetic_spectrum(truth, 2048, 0.0, 0);
    const FitConfig cfg =
        config_for(truth, {FitParam::g_x, FitParam::gamma_x}, 0.0, 21);
    const EfficiencyScan scan = efficiency_scan(
        data, std::nullopt, {0.15, 0.25, 0.35, 0.45}, cfg, /*refit=*/false);
    REQUIRE(scan.rows.size() == 4);
    for (const auto& row : scan.rows)
        CHECK(row.chi2_asymmetry == scan.rows[0].chi2_asymmetry);
}

TEST_CASE("efficiency scan locates the true efficiency") {
    const SystemParams truth = fig6_params(); // eta = 0.295
    const Spectrum data = synthetic_spectrum(truth, 8192, 0.01, 3141);
    const FitConfig cfg = config_for(
        truth, {FitParam::g_x, FitParam::g_y, FitParam::gamma_x, FitParam::gamma_y},
        0.0, 22);
    const std::vector<double> etas{0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45};
    const EfficiencyScan scan = efficiency_scan(data, std::nullopt, etas, cfg);
    CHECK(std::abs(scan.argmin_spectrum - truth.eta) <= 0.05);
    CHECK(std::abs(scan.argmin_asymmetry - truth.eta) <= 0.05);
}
