#include "csadc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace csadc {

namespace {

// to_chars gives "inf"/"-inf"/"nan", which read back through from_chars.
void put(std::string& s, double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    s.append(buf, ptr);
}

}  // namespace

void write_spectrum_csv(std::ostream& out, const SpectrumReport& spec)
{
    std::string s = "# fs_hz=" + format_number(spec.fs_hz) + " n_fft=" + std::to_string(spec.n_fft) +
                    " window=" + window_name(spec.window) +
                    " band_hz=" + format_number(spec.band_hz) + "\nfreq_hz,psd_dbfs\n";
    for (std::size_t k = 0; k < spec.psd.size(); ++k) {
        put(s, spec.freqs_hz[k]);
        s += ',';
        put(s, spec.psd[k]);
        s += '\n';
    }
    out << s;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> sweep, std::uint64_t seed)
{
    std::string s = "# seed=" + std::to_string(seed) + "\namp_dbfs,sndr_db\n";
    for (const auto& p : sweep) {
        put(s, p.amp_dbfs);
        s += ',';
        put(s, p.sndr_db);
        s += '\n';
    }
    out << s;
}

std::vector<SweepPoint> read_sweep_csv(std::istream& in)
{
    std::vector<SweepPoint> sweep;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.starts_with("amp_dbfs")) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("sweep csv: malformed row: " + line);
        }
        SweepPoint p;
        const char* s = line.data();
        const auto r1 = std::from_chars(s, s + comma, p.amp_dbfs);
        const auto r2 = std::from_chars(s + comma + 1, s + line.size(), p.sndr_db);
        if (r1.ec != std::errc{} || r2.ec != std::errc{}) {
            throw std::runtime_error("sweep csv: malformed row: " + line);
        }
        sweep.push_back(p);
    }
    return sweep;
}

void write_decimated_csv(std::ostream& out, const DecimatedRecord& rec, double full_scale_amp)
{
    std::string s = "# rate_hz=" + format_number(rec.rate_hz) + " ratio=" +
                    std::to_string(rec.ratio) + " full_scale_amp=" + format_number(full_scale_amp) +
                    "\ntime_s,sample\n";
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        put(s, static_cast<double>(i) / rec.rate_hz);
        s += ',';
        put(s, rec.samples[i]);
        s += '\n';
    }
    out << s;
}

void write_noise_csv(std::ostream& out, const NoiseTraces& traces, double fs_hz,
                     std::uint64_t seed)
{
    std::string s = "# fs_hz=" + format_number(fs_hz) + " seed=" + std::to_string(seed) +
                    "\ntime_s,dac_noise_a,amplifier_noise_a\n";
    const std::size_t n = std::max(traces.dac_amp.size(), traces.amplifier_amp.size());
    for (std::size_t i = 0; i < n; ++i) {
        put(s, static_cast<double>(i) / fs_hz);
        s += ',';
        put(s, i < traces.dac_amp.size() ? traces.dac_amp[i] : 0.0);
        s += ',';
        put(s, i < traces.amplifier_amp.size() ? traces.amplifier_amp[i] : 0.0);
        s += '\n';
    }
    out << s;
}

}  // namespace csadc
