#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "csadc/core_model.hpp"
#include "csadc/stimulus.hpp"

namespace csadc {

/// Integrator states are normalized to the effective full scale.
struct LoopState {
    double x1 = 0.0;
    double x2 = 0.0;
    int last_bit = +1;

    bool operator==(const LoopState&) const = default;
};

/// The 1-b reference as seen at the input node after the slope-scaling
/// integrator/differentiator pair: a current source of magnitude i_ref/alpha.
struct FeedbackDac {
    double i_ref_amp = 0.0;
    double alpha = 1.0;
    bool differential = true;

    double magnitude() const { return effective_full_scale(i_ref_amp, alpha); }
};

double slope_scaled_feedback(int bit, const FeedbackDac& dac);

/// CDS gain enhancement: a_dc^2 when enabled, a_dc otherwise.
double cds_effective_gain(double a_dc, bool cds_enabled = true);

/// Per-sample state retention of a finite-gain integrator, 1 - 1/a_eff.
double integrator_leak_pole(double a_eff);

/// Per-clock loop constants derived once from a validated config.
struct LoopCoefficients {
    double pole = 1.0;
    double a1 = 0.5;
    double a2 = 0.5;
    double stability_limit = 10.0;

    static LoopCoefficients from(const ValidatedConfig& cfg);
};

struct StepResult {
    LoopState state;
    int bit = +1;
    bool overflow = false;
};

/// One clock of the loop, with v = state.last_bit:
///   x1' = p x1 + a1 (u - v + fb_noise)
///   x2' = p x2 + a2 (x1' - v)
///   bit = x2' >= 0 ? +1 : -1
/// a1, a2 already include the (1 - reset_fraction) duty loss.
StepResult step(const LoopState& state, double u, double fb_noise, const LoopCoefficients& k);
StepResult step(const LoopState& state, double u, double fb_noise, const ValidatedConfig& cfg);

/// Thrown by run() when an integrator leaves the stability envelope. Holds
/// every decision made before the overflowing clock.
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(Bitstream partial, std::size_t index, LoopState state);

    const Bitstream& partial() const noexcept { return partial_; }
    std::size_t index() const noexcept { return index_; }
    const LoopState& state() const noexcept { return state_; }

private:
    Bitstream partial_;
    std::size_t index_;
    LoopState state_;
};

/// Noise currents actually injected during a run, in amperes.
struct NoiseTraces {
    std::vector<double> dac_amp;        // at the feedback node
    std::vector<double> amplifier_amp;  // at the input node, after CDS when enabled
};

/// Simulates the modulator over `input`. Input and noise currents are
/// normalized by effective_full_scale(i_ref, alpha). Random streams are
/// split from `seed` in NoiseStream order. Deterministic for a given
/// (input, cfg, noise, seed).
Bitstream run(const Waveform& input, const ValidatedConfig& cfg, const NoiseConfig& noise,
              std::uint64_t seed, NoiseTraces* traces = nullptr);

/// Single column of +1/-1 after a `#` header carrying fs, full scale and seed.
void write_bitstream_csv(std::ostream& out, const Bitstream& bits, std::uint64_t seed);
Bitstream read_bitstream_csv(std::istream& in);

}  // namespace csadc
