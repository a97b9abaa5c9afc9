#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "csadc/config_file.hpp"
#include "csadc/metrics.hpp"
#include "csadc/modulator.hpp"
#include "csadc/spectrum.hpp"

namespace csadc {

/// A single-tone test: the tone is generated at the modulator's effective
/// full scale, passed through the nanopore model when the config asks for
/// it, converted, and analyzed over the whole record.
struct ToneTest {
    double amp_dbfs = -5.0;
    double f_hz = 1.9e3;
    std::size_t n = std::size_t{1} << 16;
    double band_hz = 4e3;
    Window window = Window::hann;
    bool coherent = true;  // snap f_hz to an odd bin of the n-point record
    double phase_rad = 0.0;
};

struct ToneResult {
    Bitstream bits;
    SpectrumReport spectrum;
    ToneMetrics metrics;
    double f_sig_hz = 0.0;
    double inband_noise_rms_amp = 0.0;
};

ToneResult measure_tone(const SimulationConfig& cfg, const ToneTest& test, std::uint64_t seed,
                        NoiseTraces* traces = nullptr);

/// SNDR at each amplitude. Every point reuses `seed`, so the noise
/// realization is common across the sweep. Points that go unstable or lose
/// the tone report NaN. Runs on up to `jobs` threads.
std::vector<SweepPoint> sndr_sweep(const SimulationConfig& cfg, std::span<const double> amps_dbfs,
                                   const ToneTest& base, std::uint64_t seed, unsigned jobs = 1);

/// Inclusive amplitude grid from..to in `step` increments.
std::vector<double> amplitude_grid(double from_dbfs, double to_dbfs, double step_db);

struct CalibrationResult {
    double amp_white_psd = 0.0;
    double sndr_db = 0.0;
    int iterations = 0;
};

/// Bisects log10(amp_white_psd) until the tone test hits target_sndr_db
/// within tol_db. Other noise settings are taken from cfg as given.
CalibrationResult calibrate_amp_white_psd(const SimulationConfig& cfg, const ToneTest& test,
                                          double target_sndr_db, std::uint64_t seed,
                                          double tol_db = 0.05);

}  // namespace csadc
