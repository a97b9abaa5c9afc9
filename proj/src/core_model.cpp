#include "csadc/core_model.hpp"

#include <cmath>

namespace csadc {

namespace {

void require(bool ok, const char* field, const std::string& msg)
{
    if (!ok) {
        throw ConfigError(field, std::string(field) + ": " + msg);
    }
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

ValidatedConfig validate_config(const ModulatorConfig& cfg)
{
    require(finite_positive(cfg.fs_hz), "fs_hz", "must be finite and > 0");
    require(cfg.osr >= 2, "osr", "must be an integer >= 2");
    require(finite_positive(cfg.c2_farad), "c2_farad", "must be > 0");
    require(finite_positive(cfg.c3_farad), "c3_farad", "must be > 0");

    const double ratio = cfg.c3_farad / cfg.c2_farad;
    require(std::isfinite(cfg.alpha) &&
                std::abs(cfg.alpha - ratio) <= 1e-9 * std::abs(ratio),
            "alpha", "inconsistent with c3_farad/c2_farad");

    require(finite_positive(cfg.i_ref_amp), "i_ref_amp", "must be > 0");
    if (cfg.i_ref_range_check) {
        require(cfg.i_ref_amp >= 100e-9 && cfg.i_ref_amp <= 100e-6, "i_ref_amp",
                "outside the reference source range [1e-7, 1e-4] A");
    }
    require(std::isfinite(cfg.amp_dc_gain) && cfg.amp_dc_gain >= 1.0, "amp_dc_gain",
            "must be >= 1");
    require(cfg.reset_fraction >= 0.0 && cfg.reset_fraction <= 0.1, "reset_fraction",
            "reset_fraction out of range [0, 0.1]");
    require(finite_positive(cfg.loop_coeffs[0]) && finite_positive(cfg.loop_coeffs[1]),
            "loop_coeffs", "both coefficients must be > 0");
    require(std::isfinite(cfg.power_watt) && cfg.power_watt >= 0.0, "power_watt",
            "must be >= 0");
    require(std::isfinite(cfg.supply_volt) && cfg.supply_volt >= 0.0, "supply_volt",
            "must be >= 0");
    require(finite_positive(cfg.stability_limit), "stability_limit", "must be > 0");

    ModulatorConfig out = cfg;
    out.alpha = ratio;
    return ValidatedConfig(out);
}

void validate_noise(const NoiseConfig& noise)
{
    require(std::isfinite(noise.amp_white_psd) && noise.amp_white_psd >= 0.0,
            "amp_white_psd", "must be >= 0");
    require(std::isfinite(noise.flicker_knee_hz) && noise.flicker_knee_hz >= 0.0,
            "flicker_knee_hz", "must be >= 0");
    require(std::isfinite(noise.amp_offset_amp), "amp_offset_amp", "must be finite");
}

void validate_nanopore(const NanoporeModel& model)
{
    require(finite_positive(model.r_pore_ohm), "r_pore_ohm", "must be > 0");
    require(std::isfinite(model.c_mem_farad) && model.c_mem_farad >= 0.0, "c_mem_farad",
            "must be >= 0");
    require(std::isfinite(model.v_bias_volt), "v_bias_volt", "must be finite");
}

double effective_full_scale(double i_ref_amp, double alpha)
{
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("effective_full_scale: alpha must be > 0");
    }
    return i_ref_amp / alpha;
}

}  // namespace csadc
