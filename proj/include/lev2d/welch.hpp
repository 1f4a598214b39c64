#pragma once

#include <string>
#include <vector>

#include "lev2d/spectra.hpp"

namespace lev2d {

// Real-valued photocurrent record with acquisition metadata.
// Invariant (documented, checked where possible): the sample rate must exceed
// twice the heterodyne band edge, and at least two Welch segments must fit.
struct TimeSeries {
    double sample_rate = 0.0;     // [Hz]
    std::vector<double> samples;  // arbitrary units
    double pressure_pa = 0.0;
    double detuning_hz = 0.0;
    double angle_deg = 0.0;
    std::string timestamp;
};

enum class WindowKind { rectangular, hann, hamming };

WindowKind window_from_name(const std::string& name);
const char* to_string(WindowKind w);

// Averaged one-sided Welch periodogram in power-spectral-density convention:
// PSD[k] = |X_k|^2 / (fs * sum w^2), doubled except at DC and Nyquist, averaged
// over segments.  Parseval: integral PSD df = signal mean square for a
// rectangular window with no overlap.  Grid is angular [rad/s]; integrate raw
// PSDs with dOmega/2pi.
// Throws std::invalid_argument for a series shorter than two segments or an
// overlap outside [0, 0.9].
Spectrum welch_psd(const TimeSeries& ts, int segment_length, double overlap,
                   WindowKind window = WindowKind::hann);

// Segment length giving at least the requested resolution bandwidth [Hz]
// (next power of two of fs / resolution).
int segment_length_for_resolution(double sample_rate, double resolution_hz);

struct NormalizeResult {
    Spectrum spectrum;       // tagged shot-noise normalized
    double noise_floor = 0.0; // median raw PSD over the band
    int suspicious_bins = 0;  // band bins > 5x the median (possible peaks)
};

// Divides a raw PSD by its median over [band_lo, band_hi] (angular).  The band
// must exclude signal peaks; bins well above the median are counted and
// reported as a warning.  Throws std::invalid_argument when the band is empty.
NormalizeResult normalize_to_shot_noise(const Spectrum& psd, double band_lo,
                                        double band_hi);

} // namespace lev2d
