#include "csadc/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace csadc {

DynamicRangeFit fit_dynamic_range(std::vector<SweepPoint> sweep)
{
    std::erase_if(sweep, [](const SweepPoint& p) {
        return !std::isfinite(p.amp_dbfs) || !std::isfinite(p.sndr_db);
    });
    if (sweep.size() < 4) {
        throw std::invalid_argument("dynamic_range: need at least 4 usable sweep points");
    }
    std::sort(sweep.begin(), sweep.end(),
              [](const SweepPoint& a, const SweepPoint& b) { return a.amp_dbfs < b.amp_dbfs; });

    std::vector<double> resid(sweep.size());
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        resid[i] = sweep[i].sndr_db - sweep[i].amp_dbfs;
    }

    std::size_t best_first = 0;
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < resid.size(); ++i) {
        double lo = resid[i];
        double hi = resid[i];
        std::size_t j = i + 1;
        for (; j < resid.size(); ++j) {
            const double nlo = std::min(lo, resid[j]);
            const double nhi = std::max(hi, resid[j]);
            if (nhi - nlo > kDrLinearSpreadDb) {
                break;
            }
            lo = nlo;
            hi = nhi;
        }
        if (j - i > best_len) {
            best_len = j - i;
            best_first = i;
        }
    }
    if (best_len < 3) {
        throw std::invalid_argument("dynamic_range: no monotone linear region found");
    }

    double sum = 0.0;
    for (std::size_t i = best_first; i < best_first + best_len; ++i) {
        sum += resid[i];
    }
    return {sum / static_cast<double>(best_len), sweep[best_first].amp_dbfs,
            sweep[best_first + best_len - 1].amp_dbfs, best_len};
}

double dynamic_range(const std::vector<SweepPoint>& sweep)
{
    return fit_dynamic_range(sweep).dr_db;
}

double cross_scale_dr(double i_max_amp, double i_min_amp)
{
    if (!(i_max_amp > 0.0) || !(i_min_amp > 0.0)) {
        throw std::invalid_argument("cross_scale_dr: currents must be > 0");
    }
    return 20.0 * std::log10(i_max_amp / i_min_amp);
}

double fom_schreier(double dr_db, double f_conv_hz, double power_watt)
{
    if (!(f_conv_hz > 0.0) || !(power_watt > 0.0)) {
        throw std::invalid_argument("fom_schreier: f_conv_hz and power_watt must be > 0");
    }
    return dr_db + 10.0 * std::log10((f_conv_hz / 2.0) / power_watt);
}

double min_detectable_signal(double inband_noise_rms_amp)
{
    if (!(inband_noise_rms_amp >= 0.0)) {
        throw std::invalid_argument("min_detectable_signal: noise rms must be >= 0");
    }
    return std::sqrt(2.0) * inband_noise_rms_amp;
}

std::string format_number(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_metrics(const MetricsReport& m)
{
    std::ostringstream out;
    out << "sndr_db=" << format_number(m.sndr_db) << '\n'
        << "snr_db=" << format_number(m.snr_db) << '\n'
        << "sfdr_db=" << format_number(m.sfdr_db) << '\n'
        << "dr_db=" << format_number(m.dr_db) << '\n'
        << "fom_db=" << format_number(m.fom_db) << '\n'
        << "band_hz=" << format_number(m.band_hz) << '\n'
        << "f_conv_hz=" << format_number(m.f_conv_hz) << '\n'
        << "power_watt=" << format_number(m.power_watt) << '\n';
    return out.str();
}

KeyValues parse_key_values(std::string_view text)
{
    KeyValues kv;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        const auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return kv;
}

}  // namespace csadc
