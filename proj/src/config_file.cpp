#include "csadc/config_file.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace csadc {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, std::string_view v)
{
    double out = 0.0;
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(key, key + ": expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

std::int64_t parse_int(const std::string& key, std::string_view v)
{
    std::int64_t out = 0;
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(key, key + ": expected an integer, got '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t parse_uint(const std::string& key, std::string_view v)
{
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(key,
                          key + ": expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, std::string_view v)
{
    if (v == "true" || v == "1") {
        return true;
    }
    if (v == "false" || v == "0") {
        return false;
    }
    throw ConfigError(key, key + ": expected true/false, got '" + std::string(v) + "'");
}

std::array<double, 2> parse_pair(const std::string& key, std::string_view v)
{
    const auto comma = v.find(',');
    if (comma == std::string_view::npos) {
        throw ConfigError(key, key + ": expected two comma-separated numbers");
    }
    return {parse_double(key, trim(v.substr(0, comma))),
            parse_double(key, trim(v.substr(comma + 1)))};
}

std::string fmt(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

using Setter = std::function<void(SimulationConfig&, const std::string&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"fs_hz", [](auto& c, auto& k, auto v) { c.modulator.fs_hz = parse_double(k, v); }},
        {"osr", [](auto& c, auto& k, auto v) { c.modulator.osr = parse_int(k, v); }},
        {"alpha", [](auto& c, auto& k, auto v) { c.modulator.alpha = parse_double(k, v); }},
        {"c2_farad", [](auto& c, auto& k, auto v) { c.modulator.c2_farad = parse_double(k, v); }},
        {"c3_farad", [](auto& c, auto& k, auto v) { c.modulator.c3_farad = parse_double(k, v); }},
        {"i_ref_amp", [](auto& c, auto& k, auto v) { c.modulator.i_ref_amp = parse_double(k, v); }},
        {"amp_dc_gain",
         [](auto& c, auto& k, auto v) { c.modulator.amp_dc_gain = parse_double(k, v); }},
        {"cds_enabled", [](auto& c, auto& k, auto v) { c.modulator.cds_enabled = parse_bool(k, v); }},
        {"reset_fraction",
         [](auto& c, auto& k, auto v) { c.modulator.reset_fraction = parse_double(k, v); }},
        {"loop_coeffs", [](auto& c, auto& k, auto v) { c.modulator.loop_coeffs = parse_pair(k, v); }},
        {"power_watt", [](auto& c, auto& k, auto v) { c.modulator.power_watt = parse_double(k, v); }},
        {"supply_volt",
         [](auto& c, auto& k, auto v) { c.modulator.supply_volt = parse_double(k, v); }},
        {"seed", [](auto& c, auto& k, auto v) { c.modulator.seed = parse_uint(k, v); }},
        {"i_ref_range_check",
         [](auto& c, auto& k, auto v) { c.modulator.i_ref_range_check = parse_bool(k, v); }},
        {"stability_limit",
         [](auto& c, auto& k, auto v) { c.modulator.stability_limit = parse_double(k, v); }},
        {"dac_shot_enabled",
         [](auto& c, auto& k, auto v) { c.noise.dac_shot_enabled = parse_bool(k, v); }},
        {"amp_white_psd", [](auto& c, auto& k, auto v) { c.noise.amp_white_psd = parse_double(k, v); }},
        {"amp_white_enabled",
         [](auto& c, auto& k, auto v) { c.noise.amp_white_enabled = parse_bool(k, v); }},
        {"flicker_knee_hz",
         [](auto& c, auto& k, auto v) { c.noise.flicker_knee_hz = parse_double(k, v); }},
        {"flicker_enabled",
         [](auto& c, auto& k, auto v) { c.noise.flicker_enabled = parse_bool(k, v); }},
        {"amp_offset_amp",
         [](auto& c, auto& k, auto v) { c.noise.amp_offset_amp = parse_double(k, v); }},
        {"r_pore_ohm", [](auto& c, auto& k, auto v) { c.nanopore.r_pore_ohm = parse_double(k, v); }},
        {"c_mem_farad", [](auto& c, auto& k, auto v) { c.nanopore.c_mem_farad = parse_double(k, v); }},
        {"v_bias_volt", [](auto& c, auto& k, auto v) { c.nanopore.v_bias_volt = parse_double(k, v); }},
        {"use_nanopore", [](auto& c, auto& k, auto v) { c.use_nanopore = parse_bool(k, v); }},
    };
    return table;
}

}  // namespace

SimulationConfig parse_config(std::string_view text)
{
    SimulationConfig cfg;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;

    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));

        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError(key, "unknown config key '" + key + "'");
        }
        if (!seen.insert(key).second) {
            throw ConfigError(key, "duplicate config key '" + key + "'");
        }
        it->second(cfg, key, value);
    }

    if (!seen.contains("alpha") && cfg.modulator.c2_farad > 0.0) {
        cfg.modulator.alpha = cfg.modulator.c3_farad / cfg.modulator.c2_farad;
    }
    return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read config file: " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const SimulationConfig& cfg)
{
    const auto& m = cfg.modulator;
    const auto& n = cfg.noise;
    const auto& p = cfg.nanopore;
    const auto b = [](bool v) { return v ? "true" : "false"; };

    std::ostringstream out;
    out << "# modulator\n"
        << "fs_hz = " << fmt(m.fs_hz) << '\n'
        << "osr = " << m.osr << '\n'
        << "alpha = " << fmt(m.alpha) << '\n'
        << "c2_farad = " << fmt(m.c2_farad) << '\n'
        << "c3_farad = " << fmt(m.c3_farad) << '\n'
        << "i_ref_amp = " << fmt(m.i_ref_amp) << '\n'
        << "amp_dc_gain = " << fmt(m.amp_dc_gain) << '\n'
        << "cds_enabled = " << b(m.cds_enabled) << '\n'
        << "reset_fraction = " << fmt(m.reset_fraction) << '\n'
        << "loop_coeffs = " << fmt(m.loop_coeffs[0]) << ", " << fmt(m.loop_coeffs[1]) << '\n'
        << "power_watt = " << fmt(m.power_watt) << '\n'
        << "supply_volt = " << fmt(m.supply_volt) << '\n'
        << "seed = " << m.seed << '\n'
        << "i_ref_range_check = " << b(m.i_ref_range_check) << '\n'
        << "stability_limit = " << fmt(m.stability_limit) << '\n'
        << "# noise\n"
        << "dac_shot_enabled = " << b(n.dac_shot_enabled) << '\n'
        << "amp_white_psd = " << fmt(n.amp_white_psd) << '\n'
        << "amp_white_enabled = " << b(n.amp_white_enabled) << '\n'
        << "flicker_knee_hz = " << fmt(n.flicker_knee_hz) << '\n'
        << "flicker_enabled = " << b(n.flicker_enabled) << '\n'
        << "amp_offset_amp = " << fmt(n.amp_offset_amp) << '\n'
        << "# nanopore front end\n"
        << "use_nanopore = " << b(cfg.use_nanopore) << '\n'
        << "r_pore_ohm = " << fmt(p.r_pore_ohm) << '\n'
        << "c_mem_farad = " << fmt(p.c_mem_farad) << '\n'
        << "v_bias_volt = " << fmt(p.v_bias_volt) << '\n';
    return out.str();
}

}  // namespace csadc
