#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lev2d/params.hpp"

namespace lev2d {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat6c = Eigen::Matrix<std::complex<double>, 6, 6>;
using Vec6c = Eigen::Matrix<std::complex<double>, 6, 1>;

// Quadrature basis, fixed everywhere: u = (x_c, p_c, x, p_x, y, p_y) with
//   x_c = a_c + a_c^dag,  p_c = i(a_c^dag - a_c)
// and each mechanical coordinate in its own zero-point units,
//   x = b + b^dag,  p = i(b^dag - b),
// so a ground-state oscillator has <x^2> = <p^2> = 1.
enum : int { ix_c = 0, ip_c = 1, ix = 2, ip_x = 3, iy = 4, ip_y = 5 };

// Linear stochastic model du/dt = A u + n(t) with symmetrized noise
// correlation <n_i(t) n_j(t')>_sym = D_ij delta(t - t').
//
// From the linearized evolution equations in the rotating frame:
//   dx_c/dt = -(k/2) x_c - Delta p_c                      + sqrt(k)  x_in
//   dp_c/dt = Delta x_c - (k/2) p_c + 2 g_x x + 2 g_y y   + sqrt(k)  p_in
//   dx/dt   = -(Gm/2) x + Ox p_x                          + sqrt(Gx) x_nx
//   dp_x/dt = -Ox x - (Gm/2) p_x + 2 g_x x_c              + sqrt(Gx) p_nx
// (Y identical with its own frequency and coupling.)
//
// The optical input is vacuum (<a_in a_in^dag> = delta, <a_in^dag a_in> = 0),
// giving D_cavity = kappa * I2.  The mechanical noise is symmetric/classical
// (<b_n b_n^dag> = <b_n^dag b_n> = delta, valid for k_B T >> hbar Omega),
// giving D_mech = 2 Gamma_j * I2.
struct DriftSystem {
    Mat6 a = Mat6::Zero(); // drift matrix [rad/s]
    Mat6 d = Mat6::Zero(); // diffusion matrix, symmetric PSD [rad/s]
};

// Eigen-decomposition of the drift matrix.  Eigenvalues sorted by descending
// imaginary part; conjugate pairs adjacent.  A mode with Im(lambda) > 0 has
// spectral center Im(lambda) and full width -2 Re(lambda).
struct EigenStructure {
    std::array<std::complex<double>, 6> eigenvalues{};
    Mat6c eigenvectors = Mat6c::Zero(); // columns match eigenvalue order
    double max_real = 0.0;              // max Re(lambda), stability margin
    bool stable = false;                // max_real < -eps_stab

    struct Mode {
        double center; // Im(lambda) [rad/s]
        double width;  // -2 Re(lambda) [rad/s]
    };
    // Positive-frequency modes sorted by center.
    std::vector<Mode> modes() const;
};

// Thrown when an operation requires a stable system.  Carries the
// eigenvalue report.
struct UnstableSystemError : std::runtime_error {
    explicit UnstableSystemError(const std::string& report)
        : std::runtime_error(report) {}
};

inline constexpr double default_stability_eps = 1e-6; // [rad/s]

DriftSystem build_drift(const SystemParams& params);

EigenStructure eigenmodes(const DriftSystem& sys,
                          double eps_stab = default_stability_eps);

bool is_stable(const DriftSystem& sys, double eps_stab = default_stability_eps);

// Throws UnstableSystemError with the eigenvalue report when unstable.
void require_stable(const DriftSystem& sys,
                    double eps_stab = default_stability_eps);

// Fourier-space system in the complex operator basis
// v = (a_c, a_c^dag, b_x, b_x^dag, b_y, b_y^dag):  dv/dt = M v + L n_in with
// n_in = (a_in, a_in^dag, b_nx, b_nx^dag, b_ny, b_ny^dag).
Mat6c complex_system_matrix(const SystemParams& params);
Mat6c input_coupling_matrix(const SystemParams& params); // L = diag(sqrt rates)

// Unitary-like change of basis u = Q v from complex operators to quadratures.
Mat6c quadrature_change_of_basis();

} // namespace lev2d
