#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "csadc/core_model.hpp"
#include "csadc/metrics.hpp"
#include "csadc/modulator.hpp"
#include "csadc/spectrum.hpp"

namespace csadc {

// Every CSV starts with one `#` line of metadata, then a column header.

/// freq_hz,psd_dbfs
void write_spectrum_csv(std::ostream& out, const SpectrumReport& spec);

/// amp_dbfs,sndr_db (NaN for points without a usable tone)
void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> sweep, std::uint64_t seed);
std::vector<SweepPoint> read_sweep_csv(std::istream& in);

/// time_s,sample
void write_decimated_csv(std::ostream& out, const DecimatedRecord& rec, double full_scale_amp);

/// time_s,dac_noise_a,amplifier_noise_a
void write_noise_csv(std::ostream& out, const NoiseTraces& traces, double fs_hz,
                     std::uint64_t seed);

}  // namespace csadc
