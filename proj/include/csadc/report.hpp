#pragma once

#include <string>

#include "csadc/core_model.hpp"

namespace csadc {

/// Printed "This Work" figures for one bandwidth column of the comparison
/// table. Area is a layout figure and is quoted, never computed.
struct PublishedPoint {
    double band_hz;
    double power_uw;
    double supply_v;
    double area_mm2;
    double max_input_amp;
    double min_input_amp;
    double fixed_dr_db;
    double cross_dr_db;
    double fixed_fom_db;
    double cross_fom_db;
};

inline constexpr PublishedPoint kPublished4k{4e3,   125.0,  1.0,   0.042, 1e-6,
                                             0.6e-12, 81.0, 125.0, 153.0, 197.0};
inline constexpr PublishedPoint kPublished15k{15e3,  125.0, 1.0,   0.042, 1e-6,
                                              0.6e-12, 72.0, 112.2, 150.0, 190.0};

/// Published point whose band is closest to band_hz.
const PublishedPoint& published_point_for(double band_hz);

struct ReportInputs {
    ModulatorConfig cfg;
    double band_hz = 0.0;        // F_conv used in the FoM
    double fixed_dr_db = 0.0;    // from an amplitude sweep
    double min_input_amp = 0.0;  // minimum detectable signal
};

/// Table with computed, published and delta columns, followed by the
/// comparison designs quoted verbatim. Throws ConfigError when power_watt
/// is not positive, before any arithmetic.
std::string render_report(const ReportInputs& in);

}  // namespace csadc
