#include "csadc/stimulus.hpp"

#include <charconv>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace csadc {

Waveform gen_tone(double amp_dbfs, double f_sig_hz, double fs_hz, std::size_t n,
                  double full_scale_amp, double phase_rad)
{
    if (!(fs_hz > 0.0)) {
        throw std::invalid_argument("gen_tone: fs_hz must be > 0");
    }
    if (n == 0) {
        throw std::invalid_argument("gen_tone: n must be > 0");
    }
    if (!(f_sig_hz >= 0.0) || f_sig_hz >= fs_hz / 2.0) {
        throw std::invalid_argument("gen_tone: f_sig_hz must be below fs/2 (aliasing)");
    }

    Waveform w{std::vector<double>(n, 0.0), fs_hz};
    if (amp_dbfs == kSilentDbfs) {
        return w;
    }
    const double peak = full_scale_amp * std::pow(10.0, amp_dbfs / 20.0);
    const double step = 2.0 * std::numbers::pi * f_sig_hz / fs_hz;
    for (std::size_t k = 0; k < n; ++k) {
        w.samples[k] = peak * std::sin(step * static_cast<double>(k) + phase_rad);
    }
    return w;
}

Waveform gen_dc(double level_amp, double fs_hz, std::size_t n)
{
    if (n == 0) {
        throw std::invalid_argument("gen_dc: n must be > 0");
    }
    return Waveform{std::vector<double>(n, level_amp), fs_hz};
}

double coherent_frequency(double f_hz, double fs_hz, std::size_t n)
{
    const double bin = fs_hz / static_cast<double>(n);
    auto k = static_cast<long long>(std::llround(f_hz / bin));
    if (k % 2 == 0) {
        k += (f_hz / bin >= static_cast<double>(k)) ? 1 : -1;
    }
    if (k < 1) {
        k = 1;
    }
    return static_cast<double>(k) * bin;
}

Waveform nanopore_filter(const Waveform& w, const NanoporeModel& m, Diagnostics* diag)
{
    validate_nanopore(m);
    const double tau = m.r_pore_ohm * m.c_mem_farad;
    if (tau == 0.0 || w.samples.empty()) {
        return w;
    }
    if (tau < 0.1 / w.fs_hz) {
        const std::string msg = "nanopore_filter: tau*fs = " + std::to_string(tau * w.fs_hz) +
                                " is below 0.1; pole is poorly resolved at this rate";
        if (diag != nullptr) {
            diag->warnings.push_back(msg);
        } else {
            std::clog << "warning: " << msg << '\n';
        }
    }

    const double k = 2.0 * w.fs_hz * tau;
    const double b = 1.0 / (1.0 + k);
    const double a = (1.0 - k) / (1.0 + k);

    Waveform out{std::vector<double>(w.samples.size()), w.fs_hz};
    double x_prev = w.samples.front();
    double y_prev = w.samples.front();
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
        const double x = w.samples[i];
        const double y = b * (x + x_prev) - a * y_prev;
        out.samples[i] = y;
        x_prev = x;
        y_prev = y;
    }
    return out;
}

double nanopore_source_current(const NanoporeModel& m)
{
    validate_nanopore(m);
    return m.v_bias_volt / m.r_pore_ohm;
}

void write_waveform_csv(std::ostream& out, const Waveform& w)
{
    char buf[64];
    auto hdr = std::to_chars(buf, buf + sizeof buf, w.fs_hz);
    out << "# fs_hz=" << std::string_view(buf, hdr.ptr - buf) << '\n' << "time_s,current_a\n";
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
        const double t = static_cast<double>(i) / w.fs_hz;
        auto r = std::to_chars(buf, buf + sizeof buf, t);
        out.write(buf, r.ptr - buf);
        out.put(',');
        r = std::to_chars(buf, buf + sizeof buf, w.samples[i]);
        out.write(buf, r.ptr - buf);
        out.put('\n');
    }
}

Waveform read_waveform_csv(std::istream& in)
{
    Waveform w;
    std::vector<double> times;
    double header_fs = 0.0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with("# fs_hz=")) {
            const char* s = line.data() + 8;
            std::from_chars(s, line.data() + line.size(), header_fs);
            continue;
        }
        if (line.empty() || line[0] == '#' || line.starts_with("time_s")) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("waveform csv: expected 'time_s,current_a', got: " + line);
        }
        double t = 0.0;
        double v = 0.0;
        const char* s = line.data();
        const auto r1 = std::from_chars(s, s + comma, t);
        const auto r2 = std::from_chars(s + comma + 1, s + line.size(), v);
        if (r1.ec != std::errc{} || r2.ec != std::errc{}) {
            throw std::runtime_error("waveform csv: malformed row: " + line);
        }
        times.push_back(t);
        w.samples.push_back(v);
    }
    if (w.samples.empty()) {
        throw std::runtime_error("waveform csv: no samples");
    }
    if (header_fs > 0.0) {
        w.fs_hz = header_fs;
    } else if (times.size() >= 2 && times.back() > times.front()) {
        w.fs_hz = static_cast<double>(times.size() - 1) / (times.back() - times.front());
    } else {
        throw std::runtime_error("waveform csv: cannot determine sample rate");
    }
    for (double v : w.samples) {
        if (!std::isfinite(v)) {
            throw std::runtime_error("waveform csv: non-finite sample");
        }
    }
    return w;
}

}  // namespace csadc
