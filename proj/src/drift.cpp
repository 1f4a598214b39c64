#include "lev2d/drift.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>

namespace lev2d {

DriftSystem build_drift(const SystemParams& p) {
    p.validate();
    DriftSystem sys;
    Mat6& a = sys.a;

    a(ix_c, ix_c) = -p.kappa / 2;
    a(ix_c, ip_c) = -p.detuning;
    a(ip_c, ix_c) = p.detuning;
    a(ip_c, ip_c) = -p.kappa / 2;
    a(ip_c, ix) = 2 * p.g_x;
    a(ip_c, iy) = 2 * p.g_y;

    a(ix, ix) = -p.gamma_m / 2;
    a(ix, ip_x) = p.omega_x;
    a(ip_x, ix) = -p.omega_x;
    a(ip_x, ip_x) = -p.gamma_m / 2;
    a(ip_x, ix_c) = 2 * p.g_x;

    a(iy, iy) = -p.gamma_m / 2;
    a(iy, ip_y) = p.omega_y;
    a(ip_y, iy) = -p.omega_y;
    a(ip_y, ip_y) = -p.gamma_m / 2;
    a(ip_y, ix_c) = 2 * p.g_y;

    sys.d.diagonal() << p.kappa, p.kappa, 2 * p.gamma_x, 2 * p.gamma_x,
        2 * p.gamma_y, 2 * p.gamma_y;
    return sys;
}

EigenStructure eigenmodes(const DriftSystem& sys, double eps_stab) {
    Eigen::EigenSolver<Mat6> solver(sys.a);
    EigenStructure es;

    std::array<int, 6> order{0, 1, 2, 3, 4, 5};
    const auto& vals = solver.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        if (vals(i).imag() != vals(j).imag())
            return vals(i).imag() > vals(j).imag();
        return vals(i).real() < vals(j).real();
    });

    es.max_real = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 6; ++k) {
        es.eigenvalues[k] = vals(order[k]);
        es.eigenvectors.col(k) = solver.eigenvectors().col(order[k]);
        es.max_real = std::max(es.max_real, vals(order[k]).real());
    }
    es.stable = es.max_real < -eps_stab;
    return es;
}

std::vector<EigenStructure::Mode> EigenStructure::modes() const {
    std::vector<Mode> out;
    for (const auto& z : eigenvalues)
        if (z.imag() > 0.0)
            out.push_back({z.imag(), -2.0 * z.real()});
    std::sort(out.begin(), out.end(),
              [](const Mode& a, const Mode& b) { return a.center < b.center; });
    return out;
}

bool is_stable(const DriftSystem& sys, double eps_stab) {
    return eigenmodes(sys, eps_stab).stable;
}

void require_stable(const DriftSystem& sys, double eps_stab) {
    EigenStructure es = eigenmodes(sys, eps_stab);
    if (es.stable)
        return;
    std::string report = "unstable drift system; eigenvalues [rad/s]:";
    for (const auto& z : es.eigenvalues) {
        char buf[80];
        std::snprintf(buf, sizeof(buf), " (%.6g%+.6gi)", z.real(), z.imag());
        report += buf;
    }
    throw UnstableSystemError(report);
}

Mat6c complex_system_matrix(const SystemParams& p) {
    const std::complex<double> i(0.0, 1.0);
    Mat6c m = Mat6c::Zero();

    m(0, 0) = i * p.detuning - p.kappa / 2.0;
    m(0, 2) = m(0, 3) = i * p.g_x;
    m(0, 4) = m(0, 5) = i * p.g_y;
    m(1, 1) = -i * p.detuning - p.kappa / 2.0;
    m(1, 2) = m(1, 3) = -i * p.g_x;
    m(1, 4) = m(1, 5) = -i * p.g_y;

    m(2, 2) = -i * p.omega_x - p.gamma_m / 2.0;
    m(2, 0) = m(2, 1) = i * p.g_x;
    m(3, 3) = i * p.omega_x - p.gamma_m / 2.0;
    m(3, 0) = m(3, 1) = -i * p.g_x;

    m(4, 4) = -i * p.omega_y - p.gamma_m / 2.0;
    m(4, 0) = m(4, 1) = i * p.g_y;
    m(5, 5) = i * p.omega_y - p.gamma_m / 2.0;
    m(5, 0) = m(5, 1) = -i * p.g_y;
    return m;
}

Mat6c input_coupling_matrix(const SystemParams& p) {
    Mat6c l = Mat6c::Zero();
    l.diagonal() << std::sqrt(p.kappa), std::sqrt(p.kappa), std::sqrt(p.gamma_x),
        std::sqrt(p.gamma_x), std::sqrt(p.gamma_y), std::sqrt(p.gamma_y);
    return l;
}

Mat6c quadrature_change_of_basis() {
    const std::complex<double> i(0.0, 1.0);
    Mat6c q = Mat6c::Zero();
    for (int blk = 0; blk < 3; ++blk) {
        int r = 2 * blk;
        q(r, r) = 1.0;
        q(r, r + 1) = 1.0;
        q(r + 1, r) = -i;
        q(r + 1, r + 1) = i;
    }
    return q;
}

} // namespace lev2d
