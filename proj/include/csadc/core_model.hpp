#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace csadc {

// All quantities are SI: amperes, hertz, farads, volts, watts.

/// Raised when a configuration field violates its contract. `field()` names
/// the offending key exactly as it appears in config files.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct ModulatorConfig {
    double fs_hz = 1.024e6;
    std::int64_t osr = 128;
    double alpha = 100.0;
    double c2_farad = 100e-15;
    double c3_farad = 10e-12;
    double i_ref_amp = 100e-6;
    double amp_dc_gain = 100.0;
    bool cds_enabled = true;
    double reset_fraction = 0.01;
    // First-stage coefficient is 0.7, not the textbook 0.5: with a
    // sign quantizer and one-clock feedback the 0.5 loop loses ~1 dB of
    // peak SQNR at OSR 128. The second coefficient only scales x2.
    std::array<double, 2> loop_coeffs{0.7, 0.5};
    double power_watt = 125e-6;
    double supply_volt = 1.0;
    std::uint64_t seed = 1;
    // Clamp the reference to the on-chip source range [100 nA, 100 uA].
    bool i_ref_range_check = false;
    double stability_limit = 10.0;

    bool operator==(const ModulatorConfig&) const = default;
};

struct NoiseConfig {
    bool dac_shot_enabled = false;
    double amp_white_psd = 0.0;   // A^2/Hz, one-sided, input referred
    // Flicker is scaled from amp_white_psd, so the white floor can be
    // switched off on its own while the level still sets the 1/f corner.
    bool amp_white_enabled = true;
    double flicker_knee_hz = 0.0;
    bool flicker_enabled = false;
    double amp_offset_amp = 0.0;

    bool operator==(const NoiseConfig&) const = default;
};

// Defaults are illustrative: nA-scale source current, pole near 318 Hz.
struct NanoporeModel {
    double r_pore_ohm = 500e6;
    double c_mem_farad = 1e-12;
    double v_bias_volt = 0.2;

    bool operator==(const NanoporeModel&) const = default;
};

/// A ModulatorConfig that has passed validate_config. Only constructible
/// through validation, so holders can rely on every invariant.
class ValidatedConfig {
public:
    const ModulatorConfig& get() const noexcept { return cfg_; }
    const ModulatorConfig* operator->() const noexcept { return &cfg_; }

    bool operator==(const ValidatedConfig&) const = default;

private:
    friend ValidatedConfig validate_config(const ModulatorConfig& cfg);
    explicit ValidatedConfig(const ModulatorConfig& cfg) : cfg_(cfg) {}
    ModulatorConfig cfg_;
};

ValidatedConfig validate_config(const ModulatorConfig& cfg);
void validate_noise(const NoiseConfig& noise);
void validate_nanopore(const NanoporeModel& model);

/// Input full scale seen through the slope-scaling pair: i_ref / alpha.
double effective_full_scale(double i_ref_amp, double alpha);

struct Bitstream {
    std::vector<std::int8_t> bits;  // each +1 or -1
    double fs_hz = 0.0;
    double full_scale_amp = 0.0;
};

struct DecimatedRecord {
    std::vector<double> samples;  // normalized, nominally -1..+1
    double rate_hz = 0.0;
    std::int64_t ratio = 1;       // rate_hz * ratio == source fs
};

}  // namespace csadc
