#include <doctest.h>

#include <algorithm>
#include <random>
#include <thread>

#include "lev2d/occupancy.hpp"
#include "lev2d/spectra.hpp"
#include "test_helpers.hpp"

using namespace lev2d;
using namespace lev2d::testing;

namespace {

// index of the sample nearest a target frequency
int nearest_bin(const FrequencyGrid& grid, double omega) {
    const int i = static_cast<int>(std::lround((omega - grid.omega_start) /
                                               grid.domega));
    return std::clamp(i, 0, grid.n - 1);
}

// true when the window around omega contains a strict local maximum
bool has_local_peak(const Spectrum& s, double omega, double half_width) {
    const int lo = std::max(1, nearest_bin(s.grid, omega - half_width));
    const int hi = std::min(s.grid.n - 2, nearest_bin(s.grid, omega + half_width));
    int best = lo;
    for (int i = lo; i <= hi; ++i)
        if (s.values[i] > s.values[best])
            best = i;
    return best > lo && best < hi && s.values[best] > s.values[best - 1] &&
           s.values[best] > s.values[best + 1];
}

} // namespace

TEST_CASE("transfer matrix solves its defining linear relation on every bin") {
    const SystemParams p = fig3_params();
    const Mat6c m = complex_system_matrix(p);
    const Mat6c l = input_coupling_matrix(p);
    const FrequencyGrid grid =
        FrequencyGrid::centered(0.0, p.omega_x + 10 * p.kappa, 2048);
    const std::complex<double> i(0.0, 1.0);
    for (int k = 0; k < grid.n; ++k) {
        const double w = grid.omega(k);
        const Mat6c t = transfer_matrix(p, w);
        const Mat6c defect = (-i * w * Mat6c::Identity() - m) * t - l;
        CHECK(defect.norm() < 1e-10 * l.norm());
    }
}

TEST_CASE("decoupled cavity responds as a single-mode Lorentzian") {
    SystemParams p = fig3_params();
    p.g_x = p.g_y = 0.0;
    // |T_00|^2 peaks at the cavity resonance (Omega = -Delta) with value
    // kappa / (kappa/2)^2
    const Mat6c t_res = transfer_matrix(p, -p.detuning);
    CHECK(rel_diff(std::norm(t_res(0, 0)), 4.0 / p.kappa) < 1e-12);
    const Mat6c t_off = transfer_matrix(p, -p.detuning + 3 * p.kappa);
    CHECK(std::norm(t_off(0, 0)) < std::norm(t_res(0, 0)) / 10);
}

TEST_CASE("cavity response is maximal near the polariton frequencies") {
    const SystemParams p = fig3_params();
    const auto modes = eigenmodes(build_drift(p)).modes();
    const double probe = two_pi * 500e3; // far from every feature
    const double off = transfer_matrix(p, probe).row(0).norm();
    for (const auto& mode : {modes[0], modes[2]}) {
        const double at_peak = transfer_matrix(p, mode.center).row(0).norm();
        CHECK(at_peak > 3.0 * off);
    }
}

TEST_CASE("eta = 0: no signal reaches the detector, S_out = 1") {
    SystemParams p = fig3_params();
    p.eta = 0.0;
    const Spectrum s = output_spectrum(p, default_heterodyne_grid(p, 512));
    for (double v : s.values)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("heterodyne floor and shot-noise limit") {
    const SystemParams p = fig3_params();
    const FrequencyGrid grid =
        FrequencyGrid::centered(p.omega_lo, p.omega_x + 14 * p.kappa, 8192);
    const Spectrum s = output_spectrum(p, grid);
    const auto modes = eigenmodes(build_drift(p)).modes();
    for (int i = 0; i < grid.n; ++i) {
        CHECK(s.values[i] >= 1.0 - p.eta - 1e-12);
        // bins farther than 10 kappa from every eigenfrequency sit on the
        // shot-noise floor
        const double offset = grid.omega(i) - p.omega_lo;
        double dist = 1e300;
        for (const auto& mode : modes)
            dist = std::min({dist, std::abs(std::abs(offset) - mode.center)});
        if (dist > 10 * p.kappa)
            CHECK(std::abs(s.values[i] - 1.0) < 1e-3);
    }
}

TEST_CASE("anti-Stokes sideband shows the three-peak structure") {
    const SystemParams p = fig3_params();
    const Spectrum s = output_spectrum(p, default_heterodyne_grid(p));
    const Spectrum anti = extract_sideband(s, p, SpectrumKind::anti_stokes);
    const auto modes = eigenmodes(build_drift(p)).modes();
    REQUIRE(modes.size() == 3);
    for (const auto& mode : modes) {
        const double center = p.omega_lo + mode.center;
        const double window = std::max(2.0 * mode.width, 10.0 * anti.grid.domega);
        CHECK(has_local_peak(anti, center, window));
        // peak rises above the shot-noise floor
        CHECK(anti.values[nearest_bin(anti.grid, center)] > 1.05);
    }
}

TEST_CASE("output spectrum integral matches the photon-flux oracle") {
    const SystemParams p = fig3_params();
    // s_aa over the refined grid integrates to the Lyapunov-route flux
    const std::vector<double> grid = variance_integration_grid(p);
    std::vector<double> saa(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        saa[i] = output_saa(p, grid[i]);
    CHECK(rel_diff(integrate_samples(grid, saa, true), output_photon_flux(p)) <
          1e-4);
}

TEST_CASE("grid coverage of both sidebands is enforced") {
    const SystemParams p = fig3_params();
    const FrequencyGrid narrow =
        FrequencyGrid::centered(p.omega_lo, p.omega_x + 2 * p.kappa, 256);
    CHECK_THROWS_AS(output_spectrum(p, narrow), std::invalid_argument);
    const FrequencyGrid offcenter = FrequencyGrid::centered(
        p.omega_lo + 5 * p.kappa, p.omega_x + 6 * p.kappa, 256);
    CHECK_THROWS_AS(output_spectrum(p, offcenter), std::invalid_argument);
}

TEST_CASE("asymmetry is independent of the detection efficiency") {
    SystemParams lo = fig3_params();
    SystemParams hi = fig3_params();
    lo.eta = 0.15;
    hi.eta = 0.45;
    const FrequencyGrid grid = FrequencyGrid::centered(two_pi * 120e3,
                                                       two_pi * 35e3, 512);
    const Spectrum a_lo = sideband_asymmetry(lo, grid);
    const Spectrum a_hi = sideband_asymmetry(hi, grid);
    for (int i = 0; i < grid.n; ++i) {
        REQUIRE(a_lo.bin_valid(i) == a_hi.bin_valid(i));
        if (a_lo.bin_valid(i))
            CHECK(rel_diff(a_lo.values[i], a_hi.values[i]) < 1e-9);
    }
}

TEST_CASE("asymmetry features at the strong-coupling acquisition") {
    const SystemParams p = fig3_params();
    const FrequencyGrid grid =
        FrequencyGrid::centered(two_pi * 122.5e3, two_pi * 27.5e3, 2201);
    const Spectrum a = sideband_asymmetry(p, grid);

    double a_max = 0.0, f_max = 0.0, dip = 1e300, f_dip = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        if (!a.bin_valid(i))
            continue;
        const double f = angular_to_hz(grid.omega(i));
        if (a.values[i] > a_max) {
            a_max = a.values[i];
            f_max = f;
        }
        if (f > 113e3 && f < 119e3 && a.values[i] < dip) {
            dip = a.values[i];
            f_dip = f;
        }
    }
    CHECK(a_max == doctest::Approx(9.15).epsilon(0.02));
    CHECK(f_max == doctest::Approx(122.3e3).epsilon(0.01));
    CHECK(dip == doctest::Approx(1.0).epsilon(0.01));
    CHECK(f_dip == doctest::Approx(116.16e3).epsilon(0.005));
}

TEST_CASE("asymmetry >= 1 on valid bins for red-detuned stable draws") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        const SystemParams p = random_stable_params(rng);
        const double lo = 0.5 * p.omega_y;
        const double hi = p.omega_x + 2 * p.kappa;
        const Spectrum a = sideband_asymmetry(
            p, FrequencyGrid::centered(0.5 * (lo + hi), 0.5 * (hi - lo), 401));
        for (int i = 0; i < a.grid.n; ++i)
            if (a.bin_valid(i))
                CHECK(a.values[i] >= 1.0 - 1e-6);
    }
}

TEST_CASE("hot classical limit: asymmetry -> 1 at the mechanical peaks") {
    SystemParams p = fig3_params();
    p.gamma_x = two_pi * 1e7; // >> kappa, g
    p.gamma_y = two_pi * 1e7;
    const auto modes = eigenmodes(build_drift(p)).modes();
    for (const auto& mode : modes) {
        const FrequencyGrid grid =
            FrequencyGrid::centered(mode.center, two_pi * 100.0, 16);
        const Spectrum a = sideband_asymmetry(p, grid);
        for (int i = 0; i < grid.n; ++i)
            if (a.bin_valid(i))
                CHECK(std::abs(a.values[i] - 1.0) < 0.01);
    }
}

TEST_CASE("asymmetry floor flags bins without signal") {
    const SystemParams p = fig3_params();
    // far from every resonance both sidebands sit on the shot-noise floor
    const FrequencyGrid far =
        FrequencyGrid::centered(p.omega_x + 25 * p.kappa, two_pi * 1e3, 16);
    const Spectrum a = sideband_asymmetry(p, far);
    int invalid = 0;
    for (int i = 0; i < far.n; ++i)
        if (!a.bin_valid(i))
            ++invalid;
    CHECK(invalid == far.n);
}

TEST_CASE("asymmetry from a sampled spectrum matches the direct evaluation") {
    const SystemParams p = fig3_params();
    const Spectrum s = output_spectrum(p, default_heterodyne_grid(p, 1 << 15));
    const Spectrum a_data = asymmetry_from_spectrum(s, p);
    int compared = 0;
    for (int i = 0; i < a_data.grid.n; i += 7) {
        if (!a_data.bin_valid(i))
            continue;
        const double w = a_data.grid.omega(i);
        if (w < two_pi * 95e3 || w > two_pi * 150e3)
            continue;
        const auto direct = sideband_asymmetry_at(p, w);
        REQUIRE(direct.has_value());
        CHECK(rel_diff(a_data.values[i], *direct) < 1e-9);
        ++compared;
    }
    CHECK(compared > 100);
}

TEST_CASE("bare quadrature spectrum is the oscillator Lorentzian") {
    SystemParams p = fig4_params();
    p.g_x = p.g_y = 0.0;
    p.gamma_m = two_pi * 50.0;
    const FrequencyGrid grid =
        FrequencyGrid::centered(p.omega_x, two_pi * 2e3, 8001);
    const Spectrum s =
        quadrature_spectrum(p, grid, constants::pi / 2, QuadratureKind::position);

    int peak = 0;
    for (int i = 0; i < grid.n; ++i)
        if (s.values[i] > s.values[peak])
            peak = i;
    CHECK(std::abs(grid.omega(peak) - p.omega_x) <= grid.domega);

    const double half = s.values[peak] / 2;
    int left = peak, right = peak;
    while (left > 0 && s.values[left] > half)
        --left;
    while (right < grid.n - 1 && s.values[right] > half)
        ++right;
    const double fwhm = grid.omega(right) - grid.omega(left);
    CHECK(fwhm == doctest::Approx(p.gamma_m).epsilon(0.05));
}

TEST_CASE("coupled quadrature spectra show two or three peaks") {
    const FrequencyGrid grid =
        FrequencyGrid::centered(two_pi * 120e3, two_pi * 45e3, 60001);

    // weak coupling (g < kappa/4): two peaks at the near-bare frequencies
    SystemParams weak = fig4_params();
    weak.g_x = two_pi * 2e3;
    weak.g_y = two_pi * 1e3;
    const Spectrum s_weak =
        quadrature_spectrum(weak, grid, 0.7, QuadratureKind::position);
    CHECK(has_local_peak(s_weak, weak.omega_x, two_pi * 2e3));
    CHECK(has_local_peak(s_weak, weak.omega_y, two_pi * 2e3));
    // the mechanical peaks dominate the residual cavity bump by far
    const double cavity_bump = s_weak.values[nearest_bin(grid, -weak.detuning)];
    CHECK(s_weak.values[nearest_bin(grid, weak.omega_x)] > 50.0 * cavity_bump);

    // strong coupling: all three hybridized eigenmodes appear
    const SystemParams strong = fig4_params();
    const Spectrum s_strong =
        quadrature_spectrum(strong, grid, 0.7, QuadratureKind::position);
    for (const auto& mode : eigenmodes(build_drift(strong)).modes())
        CHECK(has_local_peak(s_strong, mode.center,
                             std::max(1.5 * mode.width, two_pi * 1e3)));
}

TEST_CASE("grid refinement changes the integral by < 1e-4 relative") {
    const SystemParams p = fig3_params();
    const Spectrum coarse = output_spectrum(p, default_heterodyne_grid(p, 1 << 16));
    const Spectrum fine = output_spectrum(p, default_heterodyne_grid(p, 1 << 17));
    // compare the signal mass (the flat shot floor is grid-independent)
    auto signal_mass = [](const Spectrum& s) {
        Spectrum shifted = s;
        for (double& v : shifted.values)
            v -= 1.0;
        return integrate_spectrum(shifted);
    };
    CHECK(rel_diff(signal_mass(coarse), signal_mass(fine)) < 1e-4);

    const FrequencyGrid qc = FrequencyGrid::centered(0.0, p.omega_x + 10 * p.kappa,
                                                     1 << 16);
    const FrequencyGrid qf = FrequencyGrid::centered(0.0, p.omega_x + 10 * p.kappa,
                                                     1 << 17);
    const double ic = integrate_spectrum(
        quadrature_spectrum(p, qc, 0.9, QuadratureKind::position));
    const double iff = integrate_spectrum(
        quadrature_spectrum(p, qf, 0.9, QuadratureKind::position));
    CHECK(rel_diff(ic, iff) < 1e-4);
}

TEST_CASE("per-bin evaluation is safe to run concurrently") {
    const SystemParams p = fig3_params();
    const FrequencyGrid grid = default_heterodyne_grid(p, 2048);
    const Spectrum reference = output_spectrum(p, grid);
    std::array<Spectrum, 4> results;
    std::vector<std::thread> workers;
    for (auto& slot : results)
        workers.emplace_back([&p, &grid, &slot] { slot = output_spectrum(p, grid); });
    for (auto& t : workers)
        t.join();
    for (const auto& s : results)
        CHECK(s.values == reference.values);
}

TEST_CASE("noise correlation matrix has exactly the stated entries") {
    const Mat6c n = noise_correlation();
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) {
            const bool expected = (r == 0 && c == 1) || (r == 2 && c == 3) ||
                                  (r == 3 && c == 2) || (r == 4 && c == 5) ||
                                  (r == 5 && c == 4);
            CHECK(n(r, c) == std::complex<double>(expected ? 1.0 : 0.0, 0.0));
        }
}
