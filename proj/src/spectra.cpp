#include "lev2d/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lev2d/constants.hpp"

namespace lev2d {

using constants::two_pi;

FrequencyGrid FrequencyGrid::centered(double center, double half_width, int n) {
    FrequencyGrid g;
    g.n = n;
    g.omega_start = center - half_width;
    g.domega = (n > 1) ? 2.0 * half_width / (n - 1) : 0.0;
    g.validate();
    return g;
}

void FrequencyGrid::validate() const {
    if (n < 2 || !(domega > 0.0) || !std::isfinite(omega_start) ||
        !std::isfinite(domega))
        throw std::invalid_argument("FrequencyGrid: need n >= 2 and domega > 0");
}

FrequencyGrid default_heterodyne_grid(const SystemParams& p, int n) {
    const double w = std::max(p.omega_x, p.omega_y) + 10.0 * p.kappa;
    return FrequencyGrid::centered(p.omega_lo, w, n);
}

Mat6c noise_correlation() {
    Mat6c n = Mat6c::Zero();
    n(0, 1) = 1.0;            // <a_in a_in^dag>
    n(2, 3) = n(3, 2) = 1.0;  // <b_nx b_nx^dag> = <b_nx^dag b_nx>
    n(4, 5) = n(5, 4) = 1.0;
    return n;
}

Mat6c transfer_matrix(const SystemParams& p, double omega) {
    const Mat6c m = complex_system_matrix(p);
    const Mat6c l = input_coupling_matrix(p);
    const std::complex<double> i(0.0, 1.0);
    Mat6c lhs = -i * omega * Mat6c::Identity() - m;
    Eigen::PartialPivLU<Mat6c> lu(lhs);
    // A vanishing pivot only happens for marginal/unstable systems where
    // -i Omega hits an eigenvalue of M.
    const Mat6c t = lu.solve(l);
    if (!t.allFinite())
        throw UnstableSystemError("transfer_matrix: singular resolvent at Omega = " +
                                  std::to_string(omega) + " rad/s");
    return t;
}

namespace {

// Output-operator coefficient row w(Omega): a~(Omega) = w(Omega) . n~(Omega)
// with a = sqrt(kappa) a_c - a_in.
Vec6c output_row(const SystemParams& p, const Mat6c& t) {
    Vec6c w = std::sqrt(p.kappa) * t.row(0).transpose();
    w(0) -= 1.0;
    return w;
}

double saa_from_row(const Vec6c& w) {
    // Normal ordering drops the a_in column: S_aa = sum_{k>=1} |w_k|^2.
    double s = 0.0;
    for (int k = 1; k < 6; ++k)
        s += std::norm(w(k));
    return s;
}

double sadad_from_row(const Vec6c& wneg) {
    // Anti-normal ordering keeps the vacuum column and drops a_in^dag:
    // S_a+a+(Omega) = |w_0(-Omega)|^2 + sum_{k>=2} |w_k(-Omega)|^2.
    double s = std::norm(wneg(0));
    for (int k = 2; k < 6; ++k)
        s += std::norm(wneg(k));
    return s;
}

} // namespace

double output_saa(const SystemParams& p, double omega) {
    return saa_from_row(output_row(p, transfer_matrix(p, omega)));
}

double output_sadad(const SystemParams& p, double omega) {
    return sadad_from_row(output_row(p, transfer_matrix(p, -omega)));
}

Spectrum output_spectrum(const SystemParams& p, const FrequencyGrid& grid) {
    p.validate();
    grid.validate();
    require_stable(build_drift(p));

    const double w_needed = std::max(p.omega_x, p.omega_y) + 5.0 * p.kappa;
    if (grid.omega_start > p.omega_lo - w_needed ||
        grid.omega_end() < p.omega_lo + w_needed)
        throw std::invalid_argument(
            "output_spectrum: grid must cover both sidebands "
            "[omega_lo - W, omega_lo + W], W >= max(omega_x, omega_y) + 5 kappa");

    Spectrum out;
    out.grid = grid;
    out.kind = SpectrumKind::heterodyne_full;
    out.norm = Normalization::shot_noise;
    out.params_hash = p.hash();
    out.values.resize(grid.n);
    // Bins are independent; evaluation order does not affect the result.
    for (int i = 0; i < grid.n; ++i) {
        const double w = grid.omega(i);
        out.values[i] = p.eta * (output_saa(p, w - p.omega_lo) +
                                 output_sadad(p, w + p.omega_lo)) +
                        (1.0 - p.eta);
    }
    return out;
}

namespace {

double cavity_filter_correction(const SystemParams& p, double omega) {
    const double hk = p.kappa / 2.0;
    const double num = (omega - p.detuning) * (omega - p.detuning) + hk * hk;
    const double den = (omega + p.detuning) * (omega + p.detuning) + hk * hk;
    return num / den;
}

} // namespace

std::optional<double> sideband_asymmetry_at(const SystemParams& p, double omega,
                                            double floor) {
    if (omega <= 0.0)
        throw std::invalid_argument("sideband_asymmetry_at: offset must be > 0");
    // S_out - 1 = eta (s_aa + s_adad - 1); eta cancels in the ratio, so the
    // floor is applied to the eta-free signal.
    const double stokes = output_saa(p, -omega) +
                          output_sadad(p, 2.0 * p.omega_lo - omega) - 1.0;
    const double anti = output_saa(p, omega) +
                        output_sadad(p, 2.0 * p.omega_lo + omega) - 1.0;
    if (std::abs(stokes) <= floor || std::abs(anti) <= floor)
        return std::nullopt;
    return (stokes / anti) * cavity_filter_correction(p, omega);
}

Spectrum sideband_asymmetry(const SystemParams& p, const FrequencyGrid& grid,
                            double floor) {
    p.validate();
    grid.validate();
    if (grid.omega_start <= 0.0)
        throw std::invalid_argument("sideband_asymmetry: offset grid must be > 0");
    require_stable(build_drift(p));

    Spectrum out;
    out.grid = grid;
    out.kind = SpectrumKind::asymmetry;
    out.norm = Normalization::shot_noise;
    out.params_hash = p.hash();
    out.values.assign(grid.n, 0.0);
    out.valid.assign(grid.n, 0);
    for (int i = 0; i < grid.n; ++i) {
        if (const auto a = sideband_asymmetry_at(p, grid.omega(i), floor)) {
            out.values[i] = *a;
            out.valid[i] = 1;
        }
    }
    return out;
}

Spectrum asymmetry_from_spectrum(const Spectrum& sout, const SystemParams& p,
                                 double floor) {
    sout.grid.validate();
    if (sout.norm != Normalization::shot_noise)
        throw std::invalid_argument(
            "asymmetry_from_spectrum: spectrum must be shot-noise normalized");
    const int n = sout.grid.n;
    // Mirror pairs around omega_lo: bins i and j = n-1-i satisfy
    // omega_i + omega_j = 2 omega_lo when the grid is centered on omega_lo.
    const double center = sout.grid.omega(0) + 0.5 * (n - 1) * sout.grid.domega;
    if (std::abs(center - p.omega_lo) > 1e-6 * sout.grid.domega + 1e-9)
        throw std::invalid_argument(
            "asymmetry_from_spectrum: grid must be centered on omega_lo");

    Spectrum out;
    const int half = n / 2;
    out.grid.omega_start = sout.grid.omega(n - half) - p.omega_lo;
    out.grid.domega = sout.grid.domega;
    out.grid.n = half;
    out.kind = SpectrumKind::asymmetry;
    out.norm = Normalization::shot_noise;
    out.params_hash = sout.params_hash;
    out.values.assign(half, 0.0);
    out.valid.assign(half, 0);
    for (int k = 0; k < half; ++k) {
        const int i_upper = n - half + k;
        const int i_lower = n - 1 - i_upper;
        const double w = sout.grid.omega(i_upper) - p.omega_lo;
        if (w <= 0.0)
            continue;
        const double num = sout.values[i_lower] - 1.0;
        const double den = sout.values[i_upper] - 1.0;
        if (std::abs(num) <= floor || std::abs(den) <= floor)
            continue;
        out.values[k] = (num / den) * cavity_filter_correction(p, w);
        out.valid[k] = 1;
    }
    return out;
}

Vec6c quadrature_coefficients(const SystemParams& p, double phi,
                              QuadratureKind which) {
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    const double omega_ref = std::sqrt(p.omega_x * p.omega_y);
    const std::complex<double> i(0.0, 1.0);
    Vec6c coeffs = Vec6c::Zero();
    if (which == QuadratureKind::position) {
        // x_phi / x_ref = s sqrt(ref/Ox) (b_x + b_x^dag) + c sqrt(ref/Oy) (b_y + b_y^dag)
        const double wx = s * std::sqrt(omega_ref / p.omega_x);
        const double wy = c * std::sqrt(omega_ref / p.omega_y);
        coeffs(2) = coeffs(3) = wx;
        coeffs(4) = coeffs(5) = wy;
    } else {
        // p_phi / p_ref = s sqrt(Ox/ref) i(b_x^dag - b_x) + c sqrt(Oy/ref) i(b_y^dag - b_y)
        const double wx = s * std::sqrt(p.omega_x / omega_ref);
        const double wy = c * std::sqrt(p.omega_y / omega_ref);
        coeffs(2) = -i * wx;
        coeffs(3) = i * wx;
        coeffs(4) = -i * wy;
        coeffs(5) = i * wy;
    }
    return coeffs;
}

double hermitian_spectral_density(const Mat6c& transfer, const Vec6c& coeffs) {
    // For Hermitian O with row u = c^T T(Omega), the stationary spectrum
    // collapses to S_OO(Omega) = sum_{k>=1} |u_k|^2 (vacuum normal ordering
    // removes the a_in column).
    const Vec6c u = transfer.transpose() * coeffs;
    double s = 0.0;
    for (int k = 1; k < 6; ++k)
        s += std::norm(u(k));
    return s;
}

Spectrum quadrature_spectrum(const SystemParams& p, const FrequencyGrid& grid,
                             double phi, QuadratureKind which) {
    p.validate();
    grid.validate();
    require_stable(build_drift(p));

    const Vec6c coeffs = quadrature_coefficients(p, phi, which);
    Spectrum out;
    out.grid = grid;
    out.kind = (which == QuadratureKind::position) ? SpectrumKind::position
                                                   : SpectrumKind::momentum;
    out.norm = Normalization::raw;
    out.params_hash = p.hash();
    out.values.resize(grid.n);
    for (int i = 0; i < grid.n; ++i)
        out.values[i] =
            hermitian_spectral_density(transfer_matrix(p, grid.omega(i)), coeffs);
    return out;
}

double integrate_samples(const std::vector<double>& omegas,
                         const std::vector<double>& values, bool tail_correction) {
    if (omegas.size() != values.size() || omegas.size() < 2)
        throw std::invalid_argument("integrate_samples: need matching arrays, n >= 2");
    double acc = 0.0;
    for (std::size_t i = 1; i < omegas.size(); ++i)
        acc += 0.5 * (values[i] + values[i - 1]) * (omegas[i] - omegas[i - 1]);
    if (tail_correction)
        acc += values.front() * std::abs(omegas.front()) +
               values.back() * std::abs(omegas.back());
    return acc / two_pi;
}

double integrate_spectrum(const Spectrum& spec) {
    std::vector<double> omegas(spec.grid.n);
    for (int i = 0; i < spec.grid.n; ++i)
        omegas[i] = spec.grid.omega(i);
    return integrate_samples(omegas, spec.values, true);
}

std::vector<double> variance_integration_grid(const SystemParams& p) {
    const EigenStructure es = eigenmodes(build_drift(p));
    const double kappa = p.kappa;
    double max_im = 0.0;
    for (const auto& z : es.eigenvalues)
        max_im = std::max(max_im, std::abs(z.imag()));
    const double span = max_im + 60.0 * kappa;
    const double bg_step = kappa / 120.0;

    std::vector<double> pts;
    pts.reserve(80000);
    for (double w = -span; w <= span; w += bg_step)
        pts.push_back(w);

    for (const auto& z : es.eigenvalues) {
        const double mu = z.imag();
        const double width = std::max(-2.0 * z.real(), 1e-12);
        const double fine = width / 32.0;
        for (double w = mu - 150.0 * width; w <= mu + 150.0 * width; w += fine)
            pts.push_back(w);
        // geometric wings bridging the fine core to the background spacing
        double offset = 150.0 * width;
        double step = fine;
        while (step < bg_step) {
            offset += step;
            step *= 1.01;
            pts.push_back(mu + offset);
            pts.push_back(mu - offset);
        }
    }

    std::sort(pts.begin(), pts.end());
    std::vector<double> grid;
    grid.reserve(pts.size());
    for (double w : pts) {
        if (w < -span || w > span)
            continue;
        if (grid.empty() || w - grid.back() > 1e-12 * span)
            grid.push_back(w);
    }
    return grid;
}

Spectrum extract_sideband(const Spectrum& sout, const SystemParams& p,
                          SpectrumKind which) {
    if (which != SpectrumKind::anti_stokes && which != SpectrumKind::stokes)
        throw std::invalid_argument("extract_sideband: which must be a sideband kind");
    const bool upper = (which == SpectrumKind::anti_stokes);
    Spectrum out;
    out.kind = which;
    out.norm = sout.norm;
    out.params_hash = sout.params_hash;
    out.welch_segments = sout.welch_segments;

    int first = -1;
    std::vector<double> vals;
    for (int i = 0; i < sout.grid.n; ++i) {
        const double w = sout.grid.omega(i);
        const bool in = upper ? (w >= p.omega_lo) : (w <= p.omega_lo);
        if (!in)
            continue;
        if (first < 0)
            first = i;
        vals.push_back(sout.values[i]);
    }
    if (vals.size() < 2)
        throw std::invalid_argument("extract_sideband: sideband not covered by grid");
    out.grid.omega_start = sout.grid.omega(first);
    out.grid.domega = sout.grid.domega;
    out.grid.n = static_cast<int>(vals.size());
    out.values = std::move(vals);
    return out;
}

} // namespace lev2d
