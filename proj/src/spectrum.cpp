#include "csadc/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace csadc {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

class RealFft {
public:
    explicit RealFft(std::size_t n)
        : n_(n),
          in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
          out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))))
    {
        if (in_ == nullptr || out_ == nullptr) {
            fftw_free(in_);
            fftw_free(out_);
            throw std::bad_alloc();
        }
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
    }

    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    ~RealFft()
    {
        {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan_);
        }
        fftw_free(in_);
        fftw_free(out_);
    }

    std::span<double> input() { return {in_, n_}; }

    void execute() { fftw_execute(plan_); }

    double magnitude_squared(std::size_t k) const
    {
        return out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
    }

private:
    std::size_t n_;
    double* in_;
    fftw_complex* out_;
    fftw_plan plan_{};
};

std::vector<double> make_window(Window w, std::size_t n)
{
    std::vector<double> out(n, 1.0);
    if (w == Window::hann) {
        // Periodic Hann, so coherent tones land on +/-1 bin exactly.
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                          static_cast<double>(n));
        }
    }
    return out;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void check_fft_length(std::size_t len, std::size_t n_fft)
{
    if (!is_power_of_two(n_fft)) {
        throw std::invalid_argument("psd_estimate: n_fft must be a power of two");
    }
    if (n_fft > len) {
        throw std::invalid_argument("psd_estimate: n_fft too large for signal length " +
                                    std::to_string(len));
    }
}

double to_dbfs(double p) { return p > 0.0 ? 10.0 * std::log10(p) : kDbfsFloor; }

}  // namespace

std::string window_name(Window w) { return w == Window::hann ? "hann" : "rect"; }

Window parse_window(const std::string& name)
{
    if (name == "hann") {
        return Window::hann;
    }
    if (name == "rect") {
        return Window::rect;
    }
    throw std::invalid_argument("unknown window '" + name + "' (expected hann or rect)");
}

std::size_t signal_halfwidth_bins(Window w) { return w == Window::hann ? 3 : 0; }

double SpectrumReport::total_power() const
{
    double sum = 0.0;
    for (double p : power) {
        sum += p;
    }
    return sum;
}

SpectrumReport psd_estimate(std::span<const double> signal, double fs_hz, Window window,
                            std::size_t n_fft, double full_scale)
{
    check_fft_length(signal.size(), n_fft);
    if (!(fs_hz > 0.0) || !(full_scale > 0.0)) {
        throw std::invalid_argument("psd_estimate: fs_hz and full_scale must be > 0");
    }

    const auto w = make_window(window, n_fft);
    double w_power = 0.0;
    for (double v : w) {
        w_power += v * v;
    }

    const std::size_t bins = n_fft / 2 + 1;
    const std::size_t segments = signal.size() / n_fft;
    std::vector<double> acc(bins, 0.0);

    RealFft fft(n_fft);
    for (std::size_t s = 0; s < segments; ++s) {
        auto in = fft.input();
        const auto seg = signal.subspan(s * n_fft, n_fft);
        for (std::size_t i = 0; i < n_fft; ++i) {
            in[i] = seg[i] * w[i];
        }
        fft.execute();
        for (std::size_t k = 0; k < bins; ++k) {
            acc[k] += fft.magnitude_squared(k);
        }
    }

    // |X_k|^2 / (N * sum w^2) is the two-sided power per bin; fold the
    // negative half onto k = 1..N/2-1, then express re full_scale^2 / 2.
    const double fs_sine = full_scale * full_scale / 2.0;
    const double scale = 1.0 / (static_cast<double>(n_fft) * w_power *
                                static_cast<double>(segments) * fs_sine);

    SpectrumReport r;
    r.n_fft = n_fft;
    r.segments = segments;
    r.window = window;
    r.fs_hz = fs_hz;
    r.band_hz = fs_hz / 2.0;
    r.freqs_hz.resize(bins);
    r.power.resize(bins);
    r.psd.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const bool edge = k == 0 || k == n_fft / 2;
        r.freqs_hz[k] = static_cast<double>(k) * fs_hz / static_cast<double>(n_fft);
        r.power[k] = acc[k] * scale * (edge ? 1.0 : 2.0);
        r.psd[k] = to_dbfs(r.power[k]);
    }
    return r;
}

double windowed_mean_power(std::span<const double> signal, Window window, std::size_t n_fft,
                           double full_scale)
{
    check_fft_length(signal.size(), n_fft);
    const auto w = make_window(window, n_fft);
    double w_power = 0.0;
    for (double v : w) {
        w_power += v * v;
    }
    const std::size_t segments = signal.size() / n_fft;
    double acc = 0.0;
    for (std::size_t s = 0; s < segments; ++s) {
        for (std::size_t i = 0; i < n_fft; ++i) {
            const double x = signal[s * n_fft + i] * w[i];
            acc += x * x;
        }
    }
    return acc / (w_power * static_cast<double>(segments)) / (full_scale * full_scale / 2.0);
}

ToneMetrics sndr_in_band(const SpectrumReport& spec, double f_sig_hz, double band_hz)
{
    if (!(f_sig_hz > 0.0) || !(f_sig_hz < band_hz) || band_hz > spec.fs_hz / 2.0) {
        throw std::invalid_argument("sndr_in_band: need 0 < f_sig < band <= fs/2");
    }
    const double bin = spec.bin_hz();
    const std::size_t hw = signal_halfwidth_bins(spec.window);
    const auto kb = std::min<std::size_t>(static_cast<std::size_t>(std::floor(band_hz / bin)),
                                          spec.power.size() - 1);
    const std::size_t k_lo = hw + 1;  // first bin past the DC guard
    if (kb < k_lo) {
        throw std::invalid_argument("sndr_in_band: band narrower than the DC guard");
    }

    // Locate the peak near the expected bin.
    const auto k_exp = static_cast<std::size_t>(std::llround(f_sig_hz / bin));
    const std::size_t search = hw + 2;
    const std::size_t s_lo = std::max(k_lo, k_exp > search ? k_exp - search : 0);
    const std::size_t s_hi = std::min(kb, k_exp + search);
    std::size_t peak = s_lo;
    for (std::size_t k = s_lo; k <= s_hi; ++k) {
        if (spec.power[k] > spec.power[peak]) {
            peak = k;
        }
    }

    enum class Tag { noise, signal, harmonic };
    std::vector<Tag> tag(kb + 1, Tag::noise);
    const auto mark = [&](std::size_t centre, Tag t) {
        const std::size_t lo = std::max(k_lo, centre > hw ? centre - hw : 0);
        const std::size_t hi = std::min(kb, centre + hw);
        for (std::size_t k = lo; k <= hi; ++k) {
            if (tag[k] == Tag::noise) {
                tag[k] = t;
            }
        }
    };
    mark(peak, Tag::signal);

    std::vector<std::pair<std::size_t, std::size_t>> harmonic_ranges;
    for (int h = 2; h <= kHarmonicsCounted + 1; ++h) {
        const auto kh = static_cast<std::size_t>(h) * peak;
        if (kh > kb) {
            break;
        }
        mark(kh, Tag::harmonic);
        harmonic_ranges.emplace_back(kh > hw ? kh - hw : 0, std::min(kb, kh + hw));
    }

    ToneMetrics m;
    m.f_peak_hz = spec.freqs_hz[peak];
    std::vector<double> noise_bins;
    for (std::size_t k = k_lo; k <= kb; ++k) {
        switch (tag[k]) {
        case Tag::signal: m.signal_power += spec.power[k]; break;
        case Tag::harmonic: m.distortion_power += spec.power[k]; break;
        case Tag::noise:
            m.noise_power += spec.power[k];
            noise_bins.push_back(spec.power[k]);
            break;
        }
    }

    double median = 0.0;
    if (!noise_bins.empty()) {
        auto mid = noise_bins.begin() + static_cast<std::ptrdiff_t>(noise_bins.size() / 2);
        std::nth_element(noise_bins.begin(), mid, noise_bins.end());
        median = *mid;
    }
    m.tone_found = spec.power[peak] > 0.0 && spec.power[peak] > 10.0 * median;
    if (!m.tone_found) {
        return m;
    }

    // Largest spur: each harmonic group, and the group around the largest
    // remaining noise bin.
    double spur = 0.0;
    for (const auto& [lo, hi] : harmonic_ranges) {
        double p = 0.0;
        for (std::size_t k = std::max(lo, k_lo); k <= hi; ++k) {
            if (tag[k] == Tag::harmonic) {
                p += spec.power[k];
            }
        }
        spur = std::max(spur, p);
    }
    std::size_t loudest = 0;
    for (std::size_t k = k_lo; k <= kb; ++k) {
        if (tag[k] == Tag::noise && (loudest == 0 || spec.power[k] > spec.power[loudest])) {
            loudest = k;
        }
    }
    if (loudest != 0) {
        double p = 0.0;
        for (std::size_t k = std::max(k_lo, loudest > hw ? loudest - hw : 0);
             k <= std::min(kb, loudest + hw); ++k) {
            if (tag[k] == Tag::noise) {
                p += spec.power[k];
            }
        }
        spur = std::max(spur, p);
    }

    const auto ratio_db = [](double num, double den) {
        return den > 0.0 ? 10.0 * std::log10(num / den) : std::numeric_limits<double>::infinity();
    };
    m.sndr_db = ratio_db(m.signal_power, m.noise_power + m.distortion_power);
    m.snr_db = ratio_db(m.signal_power, m.noise_power);
    m.sfdr_db = ratio_db(m.signal_power, spur);
    return m;
}

double psd_slope_db_per_decade(const SpectrumReport& spec, double f_lo_hz, double f_hi_hz)
{
    if (!(f_lo_hz > 0.0) || !(f_hi_hz > f_lo_hz)) {
        throw std::invalid_argument("psd_slope_db_per_decade: need 0 < f_lo < f_hi");
    }
    constexpr double kGroupsPerDecade = 10.0;
    const double l0 = std::log10(f_lo_hz);
    const auto groups =
        static_cast<std::size_t>(std::ceil((std::log10(f_hi_hz) - l0) * kGroupsPerDecade));

    std::vector<double> sum(groups, 0.0);
    std::vector<std::size_t> count(groups, 0);
    for (std::size_t k = 1; k < spec.power.size(); ++k) {
        const double f = spec.freqs_hz[k];
        if (f < f_lo_hz || f > f_hi_hz) {
            continue;
        }
        const auto g = std::min(groups - 1,
                                static_cast<std::size_t>((std::log10(f) - l0) * kGroupsPerDecade));
        sum[g] += spec.power[k];
        ++count[g];
    }

    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    double n = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
        if (count[g] == 0 || sum[g] <= 0.0) {
            continue;
        }
        const double x = l0 + (static_cast<double>(g) + 0.5) / kGroupsPerDecade;
        const double y = 10.0 * std::log10(sum[g] / static_cast<double>(count[g]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        n += 1.0;
    }
    if (n < 2.0) {
        throw std::invalid_argument("psd_slope_db_per_decade: fewer than two populated groups");
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double band_power(const SpectrumReport& spec, double f_lo_hz, double f_hi_hz)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < spec.power.size(); ++k) {
        if (spec.freqs_hz[k] >= f_lo_hz && spec.freqs_hz[k] <= f_hi_hz) {
            sum += spec.power[k];
        }
    }
    return sum;
}

}  // namespace csadc
