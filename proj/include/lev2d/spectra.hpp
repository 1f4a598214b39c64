#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lev2d/drift.hpp"
#include "lev2d/params.hpp"

namespace lev2d {

// Uniform frequency grid, angular units [rad/s].
struct FrequencyGrid {
    double omega_start = 0.0;
    double domega = 0.0;
    int n = 0;

    double omega(int i) const { return omega_start + i * domega; }
    double omega_end() const { return omega(n - 1); }

    // n samples on [center - half_width, center + half_width].
    static FrequencyGrid centered(double center, double half_width, int n);

    // Throws std::invalid_argument unless n >= 2 and domega > 0.
    void validate() const;
};

// Grid spanning [omega_lo - W, omega_lo + W], W = max(omega_x, omega_y) + 10 kappa,
// 2^16 points: resolves the ~100 Hz dark-mode peak while covering the
// polariton wings.
FrequencyGrid default_heterodyne_grid(const SystemParams& params,
                                      int n = 1 << 16);

enum class SpectrumKind {
    heterodyne_full,
    anti_stokes,
    stokes,
    position,
    momentum,
    asymmetry,
    raw_psd,
};

enum class Normalization { shot_noise, raw };

// Sampled one-sided / two-sided power spectral density on a frequency grid.
// Shot-noise-normalized values are dimensionless; raw PSD values are [x^2/Hz]
// interpreted against the angular grid (integrate with dOmega/2pi).
struct Spectrum {
    FrequencyGrid grid;
    std::vector<double> values;
    SpectrumKind kind = SpectrumKind::heterodyne_full;
    Normalization norm = Normalization::shot_noise;
    std::uint64_t params_hash = 0;
    int welch_segments = 0;        // >0 when produced by welch_psd
    std::vector<std::uint8_t> valid; // empty = all bins valid (asymmetry only)

    bool bin_valid(int i) const { return valid.empty() || valid[i] != 0; }
};

// Input-noise second moments in the ordered basis
// (a_in, a_in^dag, b_nx, b_nx^dag, b_ny, b_ny^dag); N_jk is the coefficient of
// 2pi delta(Omega + Omega') in <n_j(Omega) n_k(Omega')>.  Nonzero entries:
// <a_in a_in^dag> = 1 and <b_nj b_nj^dag> = <b_nj^dag b_nj> = 1.
Mat6c noise_correlation();

// T(Omega) = (-i Omega I - M)^-1 L, mapping Fourier-domain input noise to
// system operators.  Fourier convention: f~(Omega) = int f(t) e^{i Omega t} dt,
// so (f^dag)~(Omega) = (f~(-Omega))^dag.
// Throws UnstableSystemError via the singularity it implies when the resolvent
// is singular at Omega (marginal/unstable systems only).
Mat6c transfer_matrix(const SystemParams& params, double omega);

// Sideband kernels of the heterodyne formula, built from the cavity output
// operator a = sqrt(kappa) a_c - a_in:
//   s_aa(Omega)   = (1/2pi) int dOmega' <a^dag~(Omega') a~(Omega)>-density
//   s_adad(Omega) = same with a <-> a^dag.
// Both are >= 0; s_aa integrates to the output photon flux <a^dag a>.
double output_saa(const SystemParams& params, double omega);
double output_sadad(const SystemParams& params, double omega);

// Heterodyne output spectrum normalized to shot noise:
//   S_out(W) = eta (s_aa(W - W_LO) + s_adad(W + W_LO)) + (1 - eta).
// Far from all resonances S_out -> 1.  Requires a stable system and a grid
// covering [W_LO - W_max, W_LO + W_max] with W_max >= max(Ox, Oy) + 5 kappa.
Spectrum output_spectrum(const SystemParams& params, const FrequencyGrid& grid);

inline constexpr double default_asymmetry_floor = 1e-4;

// Corrected sideband asymmetry on a strictly positive offset grid:
//   A(W) = [(S_out(W_LO - W) - 1) / (S_out(W_LO + W) - 1)]
//          * [((W - Delta)^2 + (kappa/2)^2) / ((W + Delta)^2 + (kappa/2)^2)].
// Exactly independent of eta.  Bins with |S_out - 1| below the floor on either
// sideband are flagged invalid (asymmetry undefined there).
Spectrum sideband_asymmetry(const SystemParams& params, const FrequencyGrid& grid,
                            double floor = default_asymmetry_floor);

// Single-frequency evaluation; empty when the signal sits below the floor.
std::optional<double> sideband_asymmetry_at(const SystemParams& params,
                                            double omega,
                                            double floor = default_asymmetry_floor);

// Asymmetry evaluated from a sampled heterodyne spectrum by pairing bins
// mirrored around omega_lo (the grid must be uniform; mirror pairs are exact).
Spectrum asymmetry_from_spectrum(const Spectrum& sout, const SystemParams& params,
                                 double floor = default_asymmetry_floor);

enum class QuadratureKind { position, momentum };

// Spectrum of the direction-phi quadrature
//   x_phi = x sin(phi) + y cos(phi),  p_phi = p_x sin(phi) + p_y cos(phi)
// in zero-point units of a reference oscillator at Omega_ref = sqrt(Ox Oy).
// The reference scale cancels in <x^2><p^2> products and in n_eff; at
// Omega_x = Omega_y it reduces to each mode's own zero-point units.
Spectrum quadrature_spectrum(const SystemParams& params, const FrequencyGrid& grid,
                             double phi, QuadratureKind which);

// Coefficient rows of the phi-quadratures in the complex operator basis
// (used by the spectral variance integrals).
Vec6c quadrature_coefficients(const SystemParams& params, double phi,
                              QuadratureKind which);

// Spectral density of the Hermitian operator with coefficient row c in the
// complex operator basis, at a single frequency.
double hermitian_spectral_density(const Mat6c& transfer, const Vec6c& coeffs);

// Trapezoidal integral int S dOmega / 2pi over the sampled grid, plus the
// analytic 1/Omega^2 tail correction beyond both edges (wing mass ~ S_edge *
// |Omega_edge| / 2pi per side).  Raw truncation would lose ~kappa/Omega_max
// relative mass.
double integrate_spectrum(const Spectrum& spec);

// Same integral over explicit non-uniform samples.
double integrate_samples(const std::vector<double>& omegas,
                         const std::vector<double>& values, bool tail_correction);

// Piecewise refinement grid for variance integrals: a fine window around every
// eigenmode center (spacing width/8 out to +-120 widths), geometric wings, and
// a kappa/60-spaced background out to max|Im lambda| + 40 kappa.
std::vector<double> variance_integration_grid(const SystemParams& params);

// Restrict a heterodyne spectrum to one motional sideband (offsets from the
// local oscillator; anti-Stokes = upper).
Spectrum extract_sideband(const Spectrum& sout, const SystemParams& params,
                          SpectrumKind which);

} // namespace lev2d
