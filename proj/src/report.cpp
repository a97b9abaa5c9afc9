#include "csadc/report.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "csadc/metrics.hpp"

namespace csadc {

namespace {

std::string row(const char* label, double computed, double published, const char* unit)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-34s %12.2f %12.2f %+9.2f  %s\n", label, computed, published,
                  computed - published, unit);
    return buf;
}

constexpr const char* kComparison =
    "Comparison designs (quoted)\n"
    "                                   [1]                  [2]                  [6]\n"
    "  Power/channel [uW]               295                  1011                 5220\n"
    "  Supply [V]                       1.8                  1.2                  1.8\n"
    "  Channels                         1                    1                    1\n"
    "  Area/channel [mm^2]              0.2                  0.585                0.091\n"
    "  Max input measured               10 uA                200 uA               11.6 uA\n"
    "  Reference for min input          10 uA                200 uA               11.6 uA\n"
    "  Min input @ F_conv [pA]          123@3.6kHz           25@4kHz              0.204@200Hz\n"
    "                                   0.122@3.6Hz          7.75@512Hz\n"
    "  DR @ BW [dB]                     100@3.6kHz 120@360Hz 127@15kHz 136@7.8kHz 155@200Hz\n"
    "                                   140@36Hz 160@3.6Hz   140@4kHz 150@512Hz\n"
    "  FoM_Schreier [dB]                167@3.6kHz 177@360Hz 196@15kHz 202@7.8kHz 194@200Hz\n"
    "                                   187@36Hz 197@3.6Hz   203@4kHz 204@512Hz\n";

}  // namespace

const PublishedPoint& published_point_for(double band_hz)
{
    return std::abs(band_hz - kPublished15k.band_hz) < std::abs(band_hz - kPublished4k.band_hz)
               ? kPublished15k
               : kPublished4k;
}

std::string render_report(const ReportInputs& in)
{
    if (!(in.cfg.power_watt > 0.0)) {
        throw ConfigError("power_watt", "power_watt: must be > 0 for figure-of-merit arithmetic");
    }
    const auto vc = validate_config(in.cfg);
    const auto& pub = published_point_for(in.band_hz);

    const double max_input = effective_full_scale(vc->i_ref_amp, vc->alpha);
    const double cross_dr = cross_scale_dr(max_input, in.min_input_amp);
    const double fixed_fom = fom_schreier(in.fixed_dr_db, in.band_hz, vc->power_watt);
    const double cross_fom = fom_schreier(cross_dr, in.band_hz, vc->power_watt);

    char head[200];
    std::snprintf(head, sizeof head, "%-34s %12s %12s %9s\n", "This Work @ F_conv", "computed",
                  "published", "delta");

    std::string out = "PERFORMANCE SUMMARY\n";
    out += "F_conv = " + format_number(in.band_hz) + " Hz, published column @ " +
           format_number(pub.band_hz) + " Hz\n\n";
    out += head;
    out += row("Power/channel", vc->power_watt * 1e6, pub.power_uw, "uW");
    out += row("Supply", vc->supply_volt, pub.supply_v, "V");
    out += row("Active area/channel (quoted)", pub.area_mm2, pub.area_mm2, "mm^2");
    out += row("Max input (i_ref / alpha)", max_input * 1e6, pub.max_input_amp * 1e6, "uA");
    out += row("Min input", in.min_input_amp * 1e12, pub.min_input_amp * 1e12, "pA");
    out += row("Fixed DR", in.fixed_dr_db, pub.fixed_dr_db, "dB");
    out += row("Cross-scale DR", cross_dr, pub.cross_dr_db, "dB");
    out += row("Fixed FoM_Schreier", fixed_fom, pub.fixed_fom_db, "dB");
    out += row("Cross-scale FoM_Schreier", cross_fom, pub.cross_fom_db, "dB");
    out += "\nFoM_Schreier = DR + 10 log10(F_conv / 2 / Power)\n\n";
    out += kComparison;
    return out;
}

}  // namespace csadc
