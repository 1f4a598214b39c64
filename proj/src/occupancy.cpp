#include "lev2d/occupancy.hpp"

#include <cmath>
#include <stdexcept>

#include "lev2d/constants.hpp"
#include "lev2d/lyapunov.hpp"
#include "lev2d/spectra.hpp"

namespace lev2d {

CovarianceState steady_covariance(const DriftSystem& sys) {
    require_stable(sys);
    Eigen::MatrixXd a = sys.a;
    Eigen::MatrixXd q = sys.d;
    Eigen::MatrixXd v = solve_lyapunov<double>(a, q);
    CovarianceState cov;
    cov.v = 0.5 * (v + v.transpose()); // symmetrize away roundoff
    cov.residual = (sys.a * cov.v + cov.v * sys.a.transpose() + sys.d).norm() /
                   sys.d.norm();
    return cov;
}

Mat6 steady_commutator(const DriftSystem& sys, const SystemParams& params) {
    require_stable(sys);
    // <[x_in, p_in]> rate is 2i kappa in the cavity block; writing
    // <[u_i,u_j]> = i C_ij turns it into a real antisymmetric Lyapunov problem.
    Eigen::MatrixXd dcomm = Eigen::MatrixXd::Zero(6, 6);
    dcomm(0, 1) = 2.0 * params.kappa;
    dcomm(1, 0) = -2.0 * params.kappa;
    Eigen::MatrixXd a = sys.a;
    Eigen::MatrixXd c = solve_lyapunov<double>(a, dcomm);
    return 0.5 * (c - c.transpose());
}

double output_photon_flux(const SystemParams& params) {
    const DriftSystem sys = build_drift(params);
    const CovarianceState cov = steady_covariance(sys);
    const Mat6 comm = steady_commutator(sys, params);
    // <a^dag a> = (<x^2> + <p^2> + i<[x,p]>)/4 with <[x,p]> = i C_xp.
    const double n_cavity =
        (cov.v(ix_c, ix_c) + cov.v(ip_c, ip_c) - comm(ix_c, ip_c)) / 4.0;
    return params.kappa * n_cavity;
}

namespace {

// Quadratic form of the phi projection on the mechanical blocks, with the
// reduced zero-point weights of quadrature_coefficients.
QuadratureVariances project(const SystemParams& p, const Mat6& v, double phi) {
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    const double omega_ref = std::sqrt(p.omega_x * p.omega_y);
    const double ax = s * std::sqrt(omega_ref / p.omega_x);
    const double ay = c * std::sqrt(omega_ref / p.omega_y);
    const double bx = s * std::sqrt(p.omega_x / omega_ref);
    const double by = c * std::sqrt(p.omega_y / omega_ref);
    QuadratureVariances out;
    out.x_var = ax * ax * v(ix, ix) + ay * ay * v(iy, iy) + 2 * ax * ay * v(ix, iy);
    out.p_var =
        bx * bx * v(ip_x, ip_x) + by * by * v(ip_y, ip_y) + 2 * bx * by * v(ip_x, ip_y);
    return out;
}

} // namespace

QuadratureVariances variances_from_covariance(const SystemParams& params,
                                              const CovarianceState& cov,
                                              double phi) {
    return project(params, cov.v, phi);
}

QuadratureVariances variances_from_spectra(const SystemParams& params, double phi) {
    return variances_from_spectra(params, phi, variance_integration_grid(params));
}

QuadratureVariances variances_from_spectra(const SystemParams& params, double phi,
                                           const std::vector<double>& grid) {
    params.validate();
    const DriftSystem sys = build_drift(params);
    require_stable(sys);
    if (grid.size() < 2)
        throw std::invalid_argument("variances_from_spectra: empty grid");

    const EigenStructure es = eigenmodes(sys);
    double max_im = 0.0;
    for (const auto& z : es.eigenvalues)
        max_im = std::max(max_im, std::abs(z.imag()));
    if (grid.front() > -(max_im + 5.0 * params.kappa) ||
        grid.back() < (max_im + 5.0 * params.kappa))
        throw std::invalid_argument(
            "variances_from_spectra: grid does not cover all eigenfrequencies "
            "+ 5 kappa (coverage failure)");

    const Vec6c cx = quadrature_coefficients(params, phi, QuadratureKind::position);
    const Vec6c cp = quadrature_coefficients(params, phi, QuadratureKind::momentum);
    std::vector<double> sx(grid.size()), sp(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Mat6c t = transfer_matrix(params, grid[i]);
        sx[i] = hermitian_spectral_density(t, cx);
        sp[i] = hermitian_spectral_density(t, cp);
    }
    QuadratureVariances out;
    out.x_var = integrate_samples(grid, sx, true);
    out.p_var = integrate_samples(grid, sp, true);
    return out;
}

double n_eff_from_covariance(const SystemParams& params, const CovarianceState& cov,
                             double phi) {
    const QuadratureVariances q = variances_from_covariance(params, cov, phi);
    return 0.5 * (std::sqrt(q.x_var * q.p_var) - 1.0);
}

double n_eff(const SystemParams& params, double phi) {
    const CovarianceState cov = steady_covariance(build_drift(params));
    return n_eff_from_covariance(params, cov, phi);
}

namespace {

// Golden-section refinement of an extremum bracketed by three phi samples.
// sign = +1 minimizes, -1 maximizes; ties break toward smaller phi.
double golden_refine(const SystemParams& p, const CovarianceState& cov, double lo,
                     double hi, double sign, double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double phi) { return sign * n_eff_from_covariance(p, cov, phi); };
    double a = lo, b = hi;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

OccupancyProfile occupancy_profile(const SystemParams& params, int n_samples) {
    if (n_samples < 16)
        throw std::invalid_argument("occupancy_profile: need n_samples >= 16");
    const CovarianceState cov = steady_covariance(build_drift(params));

    OccupancyProfile prof;
    prof.phi.resize(n_samples);
    prof.n.resize(n_samples);
    int k_min = 0, k_max = 0;
    for (int k = 0; k < n_samples; ++k) {
        const double phi = constants::pi * k / n_samples;
        prof.phi[k] = phi;
        prof.n[k] = n_eff_from_covariance(params, cov, phi);
        if (prof.n[k] < prof.n[k_min])
            k_min = k; // strict <: ties keep the smaller phi
        if (prof.n[k] > prof.n[k_max])
            k_max = k;
    }

    const double step = constants::pi / n_samples;
    const double tol = 1e-5; // refined to well below the 1e-4 rad contract
    // n_eff is pi-periodic, so brackets may wrap.
    auto refine = [&](int k, double sign) {
        return golden_refine(params, cov, prof.phi[k] - step, prof.phi[k] + step,
                             sign, tol);
    };
    prof.phi_min = refine(k_min, +1.0);
    prof.phi_max = refine(k_max, -1.0);
    if (prof.phi_min < 0.0)
        prof.phi_min += constants::pi;
    if (prof.phi_max < 0.0)
        prof.phi_max += constants::pi;
    prof.n_min = n_eff_from_covariance(params, cov, prof.phi_min);
    prof.n_max = n_eff_from_covariance(params, cov, prof.phi_max);
    prof.n_y = n_eff_from_covariance(params, cov, 0.0);
    prof.n_x = n_eff_from_covariance(params, cov, constants::pi / 2.0);
    // The scan grid itself may sit marginally beyond the refined extremum.
    prof.n_min = std::min(prof.n_min, prof.n[k_min]);
    prof.n_max = std::max(prof.n_max, prof.n[k_max]);
    return prof;
}

} // namespace lev2d
