#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace csadc {

enum class Window { hann, rect };

std::string window_name(Window w);
Window parse_window(const std::string& name);

/// Bins on either side of the tone peak counted as signal. Hann spreads a
/// coherent tone over +/-1 bin and a non-coherent one over a few more.
std::size_t signal_halfwidth_bins(Window w);

/// dBFS value reported for a bin holding exactly zero power.
inline constexpr double kDbfsFloor = -std::numeric_limits<double>::infinity();

/// One-sided, window-power-normalized periodogram.
///
/// `power[k]` is the power in bin k relative to a full-scale sine
/// (amplitude `full_scale`, power full_scale^2 / 2). With this normalization
/// the bins sum to the window-weighted mean square of the input, so a
/// coherent full-scale tone integrates to 0 dBFS under any window and reads
/// 0 dBFS in a single bin under the rectangular window.
struct SpectrumReport {
    std::vector<double> freqs_hz;
    std::vector<double> power;  // linear, re full-scale sine power
    std::vector<double> psd;    // dBFS per bin
    std::size_t n_fft = 0;
    std::size_t segments = 0;
    Window window = Window::hann;
    double fs_hz = 0.0;
    double band_hz = 0.0;

    double bin_hz() const { return fs_hz / static_cast<double>(n_fft); }
    double total_power() const;
};

/// Averages floor(len / n_fft) non-overlapping segments. n_fft must be a
/// power of two no larger than the signal.
SpectrumReport psd_estimate(std::span<const double> signal, double fs_hz, Window window,
                            std::size_t n_fft, double full_scale = 1.0);

/// Mean square of the window-weighted signal over the analyzed segments, in
/// the same units as SpectrumReport::power.
double windowed_mean_power(std::span<const double> signal, Window window, std::size_t n_fft,
                           double full_scale = 1.0);

struct ToneMetrics {
    bool tone_found = false;
    double sndr_db = std::numeric_limits<double>::quiet_NaN();
    double snr_db = std::numeric_limits<double>::quiet_NaN();
    double sfdr_db = std::numeric_limits<double>::quiet_NaN();
    double signal_power = 0.0;      // re full-scale sine power
    double noise_power = 0.0;       // in band, harmonics excluded
    double distortion_power = 0.0;  // harmonics 2..6 in band
    double f_peak_hz = 0.0;
};

inline constexpr int kHarmonicsCounted = 5;

/// In-band tone metrics for a tone near f_sig_hz.
///   signal      peak bin +/- signal_halfwidth_bins(window)
///   distortion  harmonics 2..6 that fall in band, same width
///   noise       everything else in (DC guard, band_hz]
/// The DC guard excludes bins 0..halfwidth. The tone is "found" when its
/// peak bin exceeds the median in-band bin by 10 dB.
ToneMetrics sndr_in_band(const SpectrumReport& spec, double f_sig_hz, double band_hz);

/// Least-squares slope of the dB spectrum against log10(f) between f_lo and
/// f_hi, after averaging bins in tenth-decade groups.
double psd_slope_db_per_decade(const SpectrumReport& spec, double f_lo_hz, double f_hi_hz);

/// Sum of bin powers with centers in [f_lo, f_hi].
double band_power(const SpectrumReport& spec, double f_lo_hz, double f_hi_hz);

}  // namespace csadc
