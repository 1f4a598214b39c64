#pragma once

#include <vector>

#include "lev2d/drift.hpp"
#include "lev2d/params.hpp"

namespace lev2d {

// Steady-state symmetrized second moments V_ij = <{u_i, u_j}>/2 in the
// quadrature basis, zero-point units (a bare ground-state oscillator has
// <x^2> = <p^2> = 1).
struct CovarianceState {
    Mat6 v = Mat6::Zero();
    double residual = 0.0; // ||A V + V A^T + D|| relative to ||D||
};

// Solves A V + V A^T + D = 0.  Refuses unstable systems with an eigenvalue
// report (UnstableSystemError).
CovarianceState steady_covariance(const DriftSystem& sys);

// Antisymmetric commutator moments C_ij such that <[u_i, u_j]> = i * C_ij,
// from the companion Lyapunov equation driven by the optical commutator
// diffusion only (mechanical noise is classical and commutes).
Mat6 steady_commutator(const DriftSystem& sys, const SystemParams& params);

// Output photon flux <a^dag a> of a = sqrt(kappa) a_c - a_in, equal to
// kappa <a_c^dag a_c> (input-output cross terms vanish for vacuum input);
// the independent oracle for the integral of s_aa.
double output_photon_flux(const SystemParams& params);

// Reduced variances of the direction-phi quadratures in zero-point units of
// the sqrt(Ox Oy) reference oscillator (see quadrature_coefficients).  The
// product x_var * p_var equals the SI product <x_phi^2><p_phi^2> (2/hbar)^2
// of the physical coordinates; the reference choice cancels there.
struct QuadratureVariances {
    double x_var = 0.0;
    double p_var = 0.0;
};

// Lyapunov route: project the steady covariance onto the phi direction.
QuadratureVariances variances_from_covariance(const SystemParams& params,
                                              const CovarianceState& cov,
                                              double phi);

// Spectral route: integrate the quadrature spectra over an eigenstructure-
// refined grid (trapezoid + analytic tails).  Must agree with the Lyapunov
// projection to 1e-4 relative.  Throws std::invalid_argument when a supplied
// grid does not cover all eigenfrequencies + 5 kappa (grid-coverage failure).
QuadratureVariances variances_from_spectra(const SystemParams& params, double phi);
QuadratureVariances variances_from_spectra(const SystemParams& params, double phi,
                                           const std::vector<double>& grid);

// Effective thermal occupancy along direction phi:
//   n_eff = ((2/hbar) sqrt(<x_phi^2><p_phi^2>) - 1) / 2,
// evaluated in reduced units as (sqrt(x_var p_var) - 1) / 2.  Zero for a
// minimum-uncertainty state; equals n for a single-mode thermal state.
double n_eff(const SystemParams& params, double phi);
double n_eff_from_covariance(const SystemParams& params, const CovarianceState& cov,
                             double phi);

// Dense phi-scan over [0, pi) plus golden-section refinement of both extrema.
struct OccupancyProfile {
    std::vector<double> phi;   // sample directions [rad]
    std::vector<double> n;     // n_eff(phi)
    double n_min = 0.0, n_max = 0.0;
    double phi_min = 0.0, phi_max = 0.0; // refined argmin/argmax, |err| < 1e-4 rad
    double n_y = 0.0;                    // n_eff(0), Y direction
    double n_x = 0.0;                    // n_eff(pi/2), X direction
};

OccupancyProfile occupancy_profile(const SystemParams& params, int n_samples = 720);

} // namespace lev2d
