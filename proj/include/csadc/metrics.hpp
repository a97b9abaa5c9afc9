#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace csadc {

struct SweepPoint {
    double amp_dbfs = 0.0;
    double sndr_db = 0.0;
};

struct DynamicRangeFit {
    double dr_db = 0.0;
    double from_dbfs = 0.0;  // amplitude span of the fitted run
    double to_dbfs = 0.0;
    std::size_t points = 0;
};

/// Largest residual spread (max - min of sndr - amp) tolerated inside the
/// linear region.
inline constexpr double kDrLinearSpreadDb = 2.0;

/// Fits sndr = amp + DR with the slope held at 1 dB/dB. The linear region
/// is the longest amplitude-contiguous run whose residuals sndr - amp stay
/// within kDrLinearSpreadDb (ties go to the lower-amplitude run); DR is the
/// mean residual over it, i.e. minus the dBFS intercept at SNDR = 0.
/// Non-finite points (no tone, unstable) are dropped first.
/// Needs at least four usable points and a run of at least three.
DynamicRangeFit fit_dynamic_range(std::vector<SweepPoint> sweep);
double dynamic_range(const std::vector<SweepPoint>& sweep);

/// 20 log10(i_max / i_min).
double cross_scale_dr(double i_max_amp, double i_min_amp);

/// DR + 10 log10((f_conv / 2) / power).
double fom_schreier(double dr_db, double f_conv_hz, double power_watt);

/// Tone amplitude whose power equals the in-band noise power: sqrt(2) * rms.
double min_detectable_signal(double inband_noise_rms_amp);

struct MetricsReport {
    double sndr_db = 0.0;
    double snr_db = 0.0;
    double sfdr_db = 0.0;
    double dr_db = 0.0;
    double fom_db = 0.0;
    double band_hz = 0.0;
    double f_conv_hz = 0.0;
    double power_watt = 0.0;
};

using KeyValues = std::map<std::string, std::string, std::less<>>;

/// `key=value` lines, one per field, in declaration order.
std::string format_metrics(const MetricsReport& m);

/// Parses a `key=value` block; `#` comments and blank lines are skipped.
KeyValues parse_key_values(std::string_view text);

/// Shortest round-trip decimal for a double.
std::string format_number(double v);

}  // namespace csadc
