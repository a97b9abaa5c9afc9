#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "csadc/core_model.hpp"

namespace csadc {

/// Everything a config file can carry. Keys are the field names of
/// ModulatorConfig, NoiseConfig and NanoporeModel, plus `use_nanopore`.
struct SimulationConfig {
    ModulatorConfig modulator;
    NoiseConfig noise;
    NanoporeModel nanopore;
    bool use_nanopore = false;  // route stimulus through the pore RC model

    bool operator==(const SimulationConfig&) const = default;
};

/// Parses `key = value` lines. Blank lines and `#` comments are ignored.
/// Unknown keys, duplicate keys and malformed values throw ConfigError.
/// If `alpha` is absent it is derived from c3_farad / c2_farad.
SimulationConfig parse_config(std::string_view text);

/// Throws std::runtime_error naming the path if the file cannot be read.
SimulationConfig load_config(const std::filesystem::path& path);

/// Writes every key, round-trippable through parse_config.
std::string format_config(const SimulationConfig& cfg);

}  // namespace csadc
