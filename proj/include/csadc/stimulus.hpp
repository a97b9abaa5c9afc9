#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "csadc/core_model.hpp"

namespace csadc {

struct Waveform {
    std::vector<double> samples;  // input current, A
    double fs_hz = 0.0;
};

/// Pass as amp_dbfs to get an all-zero tone.
inline constexpr double kSilentDbfs = -std::numeric_limits<double>::infinity();

/// samples[k] = full_scale_amp * 10^(amp_dbfs/20) * sin(2*pi*f_sig_hz*k/fs_hz + phase_rad)
Waveform gen_tone(double amp_dbfs, double f_sig_hz, double fs_hz, std::size_t n,
                  double full_scale_amp, double phase_rad = 0.0);

Waveform gen_dc(double level_amp, double fs_hz, std::size_t n);

/// Nearest frequency that puts an odd whole number of cycles into n samples.
double coherent_frequency(double f_hz, double fs_hz, std::size_t n);

/// Collects non-fatal warnings from stimulus processing.
struct Diagnostics {
    std::vector<std::string> warnings;
};

/// Single-pole low-pass with tau = r_pore_ohm * c_mem_farad, discretized by
/// the bilinear transform:
///   y[k] = (x[k] + x[k-1] - (1 - K) y[k-1]) / (1 + K),   K = 2 fs tau
/// The state starts at rest on the first sample, so a constant input passes
/// through unchanged. c_mem_farad == 0 is an identity. When tau < 0.1/fs a
/// warning is appended to `diag` (or written to std::clog if null).
Waveform nanopore_filter(const Waveform& w, const NanoporeModel& m,
                         Diagnostics* diag = nullptr);

/// Open-circuit pore current v_bias / r_pore, for driving the front end as a source.
double nanopore_source_current(const NanoporeModel& m);

/// Two-column CSV: time_s,current_a with a `#` metadata line.
void write_waveform_csv(std::ostream& out, const Waveform& w);
Waveform read_waveform_csv(std::istream& in);

}  // namespace csadc
