#include "lev2d/welch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fftw3.h>

#include "lev2d/constants.hpp"

namespace lev2d {

WindowKind window_from_name(const std::string& name) {
    if (name == "rect" || name == "rectangular")
        return WindowKind::rectangular;
    if (name == "hann" || name == "hanning")
        return WindowKind::hann;
    if (name == "hamming")
        return WindowKind::hamming;
    throw std::invalid_argument("unknown window: " + name);
}

const char* to_string(WindowKind w) {
    switch (w) {
    case WindowKind::rectangular: return "rectangular";
    case WindowKind::hann: return "hann";
    case WindowKind::hamming: return "hamming";
    }
    return "?";
}

namespace {

std::vector<double> make_window(WindowKind kind, int n) {
    std::vector<double> w(n, 1.0);
    switch (kind) {
    case WindowKind::rectangular:
        break;
    case WindowKind::hann:
        for (int i = 0; i < n; ++i)
            w[i] = 0.5 * (1.0 - std::cos(constants::two_pi * i / n));
        break;
    case WindowKind::hamming:
        for (int i = 0; i < n; ++i)
            w[i] = 0.54 - 0.46 * std::cos(constants::two_pi * i / n);
        break;
    }
    return w;
}

struct FftwPlan {
    fftw_plan plan = nullptr;
    double* in = nullptr;
    fftw_complex* out = nullptr;
    int n = 0;

    explicit FftwPlan(int length) : n(length) {
        in = fftw_alloc_real(n);
        out = fftw_alloc_complex(n / 2 + 1);
        plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    }
    ~FftwPlan() {
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
    FftwPlan(const FftwPlan&) = delete;
    FftwPlan& operator=(const FftwPlan&) = delete;
};

} // namespace

Spectrum welch_psd(const TimeSeries& ts, int segment_length, double overlap,
                   WindowKind window) {
    const int n_total = static_cast<int>(ts.samples.size());
    if (!(ts.sample_rate > 0.0))
        throw std::invalid_argument("welch_psd: sample_rate must be > 0");
    if (segment_length < 4)
        throw std::invalid_argument("welch_psd: segment_length must be >= 4");
    if (overlap < 0.0 || overlap > 0.9)
        throw std::invalid_argument("welch_psd: overlap must lie in [0, 0.9]");

    const int hop = std::max(1, static_cast<int>(
                                    std::lround(segment_length * (1.0 - overlap))));
    const int n_segments =
        n_total >= segment_length ? 1 + (n_total - segment_length) / hop : 0;
    if (n_segments < 2)
        throw std::invalid_argument(
            "welch_psd: series too short, need at least two segments");

    const std::vector<double> win = make_window(window, segment_length);
    double win_power = 0.0;
    for (double w : win)
        win_power += w * w;
    const double scale = 1.0 / (ts.sample_rate * win_power);

    const int n_bins = segment_length / 2 + 1;
    std::vector<double> psd(n_bins, 0.0);
    FftwPlan fft(segment_length);
    for (int s = 0; s < n_segments; ++s) {
        const double* seg = ts.samples.data() + s * hop;
        for (int i = 0; i < segment_length; ++i)
            fft.in[i] = seg[i] * win[i];
        fftw_execute(fft.plan);
        for (int k = 0; k < n_bins; ++k) {
            const double mag2 = fft.out[k][0] * fft.out[k][0] +
                                fft.out[k][1] * fft.out[k][1];
            psd[k] += mag2 * scale;
        }
    }
    const bool even = (segment_length % 2) == 0;
    for (int k = 0; k < n_bins; ++k) {
        double v = psd[k] / n_segments;
        const bool is_dc = (k == 0);
        const bool is_nyquist = even && (k == n_bins - 1);
        if (!is_dc && !is_nyquist)
            v *= 2.0; // one-sided folding
        psd[k] = v;
    }

    Spectrum out;
    out.grid.omega_start = 0.0;
    out.grid.domega = constants::two_pi * ts.sample_rate / segment_length;
    out.grid.n = n_bins;
    out.values = std::move(psd);
    out.kind = SpectrumKind::raw_psd;
    out.norm = Normalization::raw;
    out.welch_segments = n_segments;
    return out;
}

int segment_length_for_resolution(double sample_rate, double resolution_hz) {
    if (!(sample_rate > 0.0) || !(resolution_hz > 0.0))
        throw std::invalid_argument("segment_length_for_resolution: need > 0 inputs");
    int n = 4;
    while (sample_rate / n > resolution_hz && n < (1 << 26))
        n *= 2;
    return n;
}

NormalizeResult normalize_to_shot_noise(const Spectrum& psd, double band_lo,
                                        double band_hi) {
    if (!(band_hi > band_lo))
        throw std::invalid_argument("normalize_to_shot_noise: empty band");
    std::vector<double> band;
    for (int i = 0; i < psd.grid.n; ++i) {
        const double w = psd.grid.omega(i);
        if (w >= band_lo && w <= band_hi)
            band.push_back(psd.values[i]);
    }
    if (band.empty())
        throw std::invalid_argument(
            "normalize_to_shot_noise: band contains no grid points");

    std::vector<double> sorted = band;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    const double median = (sorted.size() % 2 == 1)
                              ? sorted[mid]
                              : 0.5 * (sorted[mid - 1] + sorted[mid]);
    if (!(median > 0.0))
        throw std::invalid_argument("normalize_to_shot_noise: non-positive floor");

    NormalizeResult res;
    res.noise_floor = median;
    for (double v : band)
        if (v > 5.0 * median)
            ++res.suspicious_bins;

    res.spectrum = psd;
    for (double& v : res.spectrum.values)
        v /= median;
    res.spectrum.norm = Normalization::shot_noise;
    res.spectrum.kind = SpectrumKind::heterodyne_full;
    return res;
}

} // namespace lev2d
