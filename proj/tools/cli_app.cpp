#include "cli_app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "csadc/config_file.hpp"
#include "csadc/decimation.hpp"
#include "csadc/io.hpp"
#include "csadc/measurement.hpp"
#include "csadc/metrics.hpp"
#include "csadc/report.hpp"

namespace csadc::cli {

namespace fs = std::filesystem;

namespace {

/// Raised for report inputs that are absent; lists every missing name.
class MissingInputs : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
};

struct SimulateOptions {
    double amp_dbfs = -5.0;
    double freq_hz = 1.9e3;
    std::size_t n = std::size_t{1} << 16;
    std::optional<double> band_hz;
    std::string window = "hann";
    bool no_coherent = false;
    bool export_noise = false;
};

struct SweepOptions {
    double from_dbfs = -90.0;
    double to_dbfs = -5.0;
    double step_db = 5.0;
    double freq_hz = 1.9e3;
    std::size_t n = std::size_t{1} << 16;
    std::optional<double> band_hz;
    std::optional<double> synthetic_intercept;
};

struct ReportOptions {
    std::string metrics_path;
    std::string dr_path;
    std::optional<double> min_input_amp;
    std::optional<double> dr_db;
};

struct CalibrateOptions {
    double target_sndr_db = 78.0;
    double amp_dbfs = -5.0;
    double freq_hz = 1.9e3;
    std::size_t n = std::size_t{1} << 16;
    std::optional<double> band_hz;
};

SimulationConfig load(const GlobalOptions& g)
{
    SimulationConfig cfg;
    if (!g.config_path.empty()) {
        if (!fs::exists(g.config_path)) {
            throw ConfigError("--config", "config file not found: " + g.config_path);
        }
        cfg = load_config(g.config_path);
    }
    if (g.seed) {
        cfg.modulator.seed = *g.seed;
    }
    validate_config(cfg.modulator);
    validate_noise(cfg.noise);
    validate_nanopore(cfg.nanopore);
    return cfg;
}

double default_band(const SimulationConfig& cfg)
{
    return cfg.modulator.fs_hz / (2.0 * static_cast<double>(cfg.modulator.osr));
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    f << text;
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    fn(f);
}

/// Creates the output directory and records what is about to run in it.
fs::path prepare_output(const GlobalOptions& g, const SimulationConfig& cfg,
                        const std::string& command)
{
    const fs::path out(g.out_dir);
    fs::create_directories(out);
    std::ostringstream m;
    m << "config=" << (g.config_path.empty() ? "<defaults>" : g.config_path) << '\n'
      << "command=" << command << '\n'
      << "out=" << g.out_dir << '\n'
      << "seed=" << cfg.modulator.seed << '\n'
      << "timestamp=" << utc_timestamp() << '\n';
    write_file(out / "manifest.txt", m.str());
    return out;
}

int cmd_simulate(const GlobalOptions& g, const SimulateOptions& o, std::ostream& out)
{
    const auto cfg = load(g);
    const auto& mod = cfg.modulator;
    if (o.n % static_cast<std::size_t>(mod.osr) != 0) {
        throw ConfigError("--n", "--n must be a multiple of osr (" + std::to_string(mod.osr) + ")");
    }
    const fs::path dir = prepare_output(g, cfg, "simulate");

    ToneTest t;
    t.amp_dbfs = o.amp_dbfs;
    t.f_hz = o.freq_hz;
    t.n = o.n;
    t.band_hz = o.band_hz.value_or(default_band(cfg));
    t.window = parse_window(o.window);
    t.coherent = !o.no_coherent;

    NoiseTraces traces;
    ToneResult r;
    try {
        r = measure_tone(cfg, t, mod.seed, o.export_noise ? &traces : nullptr);
    } catch (const InstabilityError& e) {
        write_with(dir / "bitstream.csv",
                   [&](std::ostream& f) { write_bitstream_csv(f, e.partial(), mod.seed); });
        throw;
    }

    write_with(dir / "bitstream.csv", [&](std::ostream& f) { write_bitstream_csv(f, r.bits, mod.seed); });
    const auto dec = decimate_cic(r.bits, mod.osr, 3);
    write_with(dir / "decimated.csv",
               [&](std::ostream& f) { write_decimated_csv(f, dec, r.bits.full_scale_amp); });
    write_with(dir / "spectrum.csv", [&](std::ostream& f) { write_spectrum_csv(f, r.spectrum); });
    if (o.export_noise) {
        write_with(dir / "noise.csv",
                   [&](std::ostream& f) { write_noise_csv(f, traces, mod.fs_hz, mod.seed); });
    }

    const auto& m = r.metrics;
    std::ostringstream txt;
    txt << "sndr_db=" << format_number(m.sndr_db) << '\n'
        << "snr_db=" << format_number(m.snr_db) << '\n'
        << "sfdr_db=" << format_number(m.sfdr_db) << '\n'
        << "band_hz=" << format_number(t.band_hz) << '\n'
        << "f_conv_hz=" << format_number(t.band_hz) << '\n'
        << "power_watt=" << format_number(mod.power_watt) << '\n'
        << "tone_found=" << (m.tone_found ? "true" : "false") << '\n'
        << "amp_dbfs=" << format_number(t.amp_dbfs) << '\n'
        << "f_sig_hz=" << format_number(r.f_sig_hz) << '\n'
        << "n=" << t.n << '\n'
        << "window=" << window_name(t.window) << '\n'
        << "full_scale_amp=" << format_number(r.bits.full_scale_amp) << '\n'
        << "inband_noise_rms_amp=" << format_number(r.inband_noise_rms_amp) << '\n'
        << "mds_amp=" << format_number(min_detectable_signal(r.inband_noise_rms_amp)) << '\n'
        << "seed=" << mod.seed << '\n';
    write_file(dir / "metrics.txt", txt.str());

    out << txt.str();
    return kOk;
}

int cmd_sweep(const GlobalOptions& g, const SweepOptions& o, std::ostream& out,
              std::ostream& err)
{
    const auto cfg = load(g);
    if (o.from_dbfs < -120.0 || o.to_dbfs > 0.0) {
        throw ConfigError("--from/--to", "sweep range must lie within [-120, 0] dBFS");
    }
    const auto amps = amplitude_grid(o.from_dbfs, o.to_dbfs, o.step_db);
    const fs::path dir = prepare_output(g, cfg, "sweep");
    const double band = o.band_hz.value_or(default_band(cfg));

    std::vector<SweepPoint> sweep;
    if (o.synthetic_intercept) {
        for (double a : amps) {
            sweep.push_back({a, a + *o.synthetic_intercept});
        }
    } else {
        ToneTest t;
        t.f_hz = o.freq_hz;
        t.n = o.n;
        t.band_hz = band;
        sweep = sndr_sweep(cfg, amps, t, cfg.modulator.seed, g.jobs);
    }
    write_with(dir / "sweep.csv",
               [&](std::ostream& f) { write_sweep_csv(f, sweep, cfg.modulator.seed); });

    std::ostringstream txt;
    try {
        const auto fit = fit_dynamic_range(sweep);
        txt << "dr_db=" << format_number(fit.dr_db) << '\n'
            << "fom_db=" << format_number(fom_schreier(fit.dr_db, band, cfg.modulator.power_watt))
            << '\n';
        txt << "band_hz=" << format_number(band) << '\n'
            << "f_conv_hz=" << format_number(band) << '\n'
            << "power_watt=" << format_number(cfg.modulator.power_watt) << '\n'
            << "fit_points=" << fit.points << '\n'
            << "fit_from_dbfs=" << format_number(fit.from_dbfs) << '\n'
            << "fit_to_dbfs=" << format_number(fit.to_dbfs) << '\n';
    } catch (const std::invalid_argument& e) {
        // The sweep itself is valid data; only the line fit has nothing to work with.
        err << "warning: " << e.what() << '\n';
        txt << "dr_db=nan\nfom_db=nan\n"
            << "band_hz=" << format_number(band) << '\n'
            << "f_conv_hz=" << format_number(band) << '\n'
            << "power_watt=" << format_number(cfg.modulator.power_watt) << '\n'
            << "fit_error=" << e.what() << '\n';
    }
    write_file(dir / "dr.txt", txt.str());
    out << txt.str();
    return kOk;
}

std::optional<KeyValues> read_kv(const std::string& path)
{
    std::ifstream f(path);
    if (!f) {
        return std::nullopt;
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_key_values(ss.str());
}

std::optional<double> number_from(const std::optional<KeyValues>& kv, const std::string& key)
{
    if (!kv) {
        return std::nullopt;
    }
    const auto it = kv->find(key);
    if (it == kv->end()) {
        return std::nullopt;
    }
    try {
        const double v = std::stod(it->second);
        return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

int cmd_report(const GlobalOptions& g, const ReportOptions& o, std::ostream& out)
{
    const auto cfg = load(g);
    if (!(cfg.modulator.power_watt > 0.0)) {
        throw ConfigError("power_watt", "power_watt: must be > 0 for figure-of-merit arithmetic");
    }
    const fs::path dir(g.out_dir);
    const std::string metrics_path =
        o.metrics_path.empty() ? (dir / "metrics.txt").string() : o.metrics_path;
    const std::string dr_path = o.dr_path.empty() ? (dir / "dr.txt").string() : o.dr_path;

    const auto metrics = read_kv(metrics_path);
    const auto dr = read_kv(dr_path);

    std::vector<std::string> missing;
    const auto min_input = o.min_input_amp ? o.min_input_amp : number_from(metrics, "mds_amp");
    const auto dr_db = o.dr_db ? o.dr_db : number_from(dr, "dr_db");
    auto band = number_from(metrics, "band_hz");
    if (!band) {
        band = number_from(dr, "band_hz");
    }
    if (!min_input) {
        missing.push_back("mds_amp (" + metrics_path + " or --min-input-amp)");
    }
    if (!dr_db) {
        missing.push_back("dr_db (" + dr_path + " or --dr-db)");
    }
    if (!missing.empty()) {
        std::string msg = "missing report inputs:";
        for (const auto& m : missing) {
            msg += "\n  " + m;
        }
        throw MissingInputs(msg);
    }

    ReportInputs in;
    in.cfg = cfg.modulator;
    in.band_hz = band.value_or(default_band(cfg));
    in.fixed_dr_db = *dr_db;
    in.min_input_amp = *min_input;
    const std::string table = render_report(in);

    MetricsReport summary;
    summary.sndr_db = number_from(metrics, "sndr_db").value_or(std::nan(""));
    summary.snr_db = number_from(metrics, "snr_db").value_or(std::nan(""));
    summary.sfdr_db = number_from(metrics, "sfdr_db").value_or(std::nan(""));
    summary.dr_db = in.fixed_dr_db;
    summary.fom_db = fom_schreier(in.fixed_dr_db, in.band_hz, cfg.modulator.power_watt);
    summary.band_hz = in.band_hz;
    summary.f_conv_hz = in.band_hz;
    summary.power_watt = cfg.modulator.power_watt;

    fs::create_directories(dir);
    write_file(dir / "report.txt", table);
    write_file(dir / "summary.txt", format_metrics(summary));
    out << table;
    return kOk;
}

int cmd_calibrate(const GlobalOptions& g, const CalibrateOptions& o, std::ostream& out)
{
    auto cfg = load(g);
    const fs::path dir = prepare_output(g, cfg, "calibrate");
    ToneTest t;
    t.amp_dbfs = o.amp_dbfs;
    t.f_hz = o.freq_hz;
    t.n = o.n;
    t.band_hz = o.band_hz.value_or(default_band(cfg));

    const auto c = calibrate_amp_white_psd(cfg, t, o.target_sndr_db, cfg.modulator.seed);
    cfg.noise.amp_white_psd = c.amp_white_psd;
    write_file(dir / "calibrated.cfg", format_config(cfg));
    out << "amp_white_psd=" << format_number(c.amp_white_psd) << '\n'
        << "sndr_db=" << format_number(c.sndr_db) << '\n'
        << "iterations=" << c.iterations << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Behavioral simulator for a slope-scaled current-sensing delta-sigma ADC",
                 "csadc"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config_path, "Config file (key = value)");
    app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "Master RNG seed (overrides the config)");
    app.add_option("--jobs", g.jobs, "Concurrent sweep points")->check(CLI::PositiveNumber);

    SimulateOptions so;
    auto* sim = app.add_subcommand("simulate", "Convert one tone and analyze it");
    sim->add_option("--amp-dbfs", so.amp_dbfs, "Tone amplitude, dBFS")->capture_default_str();
    sim->add_option("--freq-hz", so.freq_hz, "Tone frequency, Hz")->capture_default_str();
    sim->add_option("--n", so.n, "Samples at fs")->capture_default_str();
    sim->add_option("--band-hz", so.band_hz, "Analysis band (default fs/(2*osr))");
    sim->add_option("--window", so.window, "hann or rect")->capture_default_str();
    sim->add_flag("--no-coherent", so.no_coherent, "Use --freq-hz as given");
    sim->add_flag("--export-noise", so.export_noise, "Also write noise.csv");

    SweepOptions wo;
    auto* sweep = app.add_subcommand("sweep", "SNDR versus input level and fitted DR");
    sweep->add_option("--from", wo.from_dbfs, "Lowest amplitude, dBFS")->capture_default_str();
    sweep->add_option("--to", wo.to_dbfs, "Highest amplitude, dBFS")->capture_default_str();
    sweep->add_option("--step", wo.step_db, "Step, dB")->capture_default_str();
    sweep->add_option("--freq-hz", wo.freq_hz, "Tone frequency, Hz")->capture_default_str();
    sweep->add_option("--n", wo.n, "Samples per point")->capture_default_str();
    sweep->add_option("--band-hz", wo.band_hz, "Analysis band (default fs/(2*osr))");
    sweep->add_option("--synthetic-intercept", wo.synthetic_intercept,
                      "Skip simulation; use sndr = amp + intercept");

    ReportOptions ro;
    auto* report = app.add_subcommand("report", "Performance summary against published values");
    report->add_option("--metrics", ro.metrics_path, "metrics.txt from simulate");
    report->add_option("--dr", ro.dr_path, "dr.txt from sweep");
    report->add_option("--min-input-amp", ro.min_input_amp, "Override the minimum input, A");
    report->add_option("--dr-db", ro.dr_db, "Override the fixed DR, dB");

    CalibrateOptions co;
    auto* cal = app.add_subcommand("calibrate", "Tune amp_white_psd to a target SNDR");
    cal->add_option("--target-sndr", co.target_sndr_db, "Target SNDR, dB")->capture_default_str();
    cal->add_option("--amp-dbfs", co.amp_dbfs, "Tone amplitude, dBFS")->capture_default_str();
    cal->add_option("--freq-hz", co.freq_hz, "Tone frequency, Hz")->capture_default_str();
    cal->add_option("--n", co.n, "Samples")->capture_default_str();
    cal->add_option("--band-hz", co.band_hz, "Analysis band (default fs/(2*osr))");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(g, so, out);
        }
        if (sweep->parsed()) {
            return cmd_sweep(g, wo, out, err);
        }
        if (report->parsed()) {
            return cmd_report(g, ro, out);
        }
        return cmd_calibrate(g, co, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InstabilityError& e) {
        err << "unstable: " << e.what() << '\n';
        return kUnstable;
    } catch (const MissingInputs& e) {
        err << e.what() << '\n';
        return kMissingInputs;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace csadc::cli
