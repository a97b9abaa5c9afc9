#include "csadc/modulator.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "csadc/noise.hpp"

namespace csadc {

double slope_scaled_feedback(int bit, const FeedbackDac& dac)
{
    if (bit != 1 && bit != -1) {
        throw std::invalid_argument("slope_scaled_feedback: bit must be +1 or -1");
    }
    return static_cast<double>(bit) * dac.magnitude();
}

double cds_effective_gain(double a_dc, bool cds_enabled)
{
    if (!(a_dc >= 1.0)) {
        throw std::invalid_argument("cds_effective_gain: a_dc must be >= 1");
    }
    return cds_enabled ? a_dc * a_dc : a_dc;
}

double integrator_leak_pole(double a_eff)
{
    if (!(a_eff >= 1.0)) {
        throw std::invalid_argument("integrator_leak_pole: a_eff must be >= 1");
    }
    return std::isinf(a_eff) ? 1.0 : 1.0 - 1.0 / a_eff;
}

LoopCoefficients LoopCoefficients::from(const ValidatedConfig& cfg)
{
    const auto& c = cfg.get();
    const double duty = 1.0 - c.reset_fraction;
    return {
        integrator_leak_pole(cds_effective_gain(c.amp_dc_gain, c.cds_enabled)),
        c.loop_coeffs[0] * duty,
        c.loop_coeffs[1] * duty,
        c.stability_limit,
    };
}

StepResult step(const LoopState& state, double u, double fb_noise, const LoopCoefficients& k)
{
    const double v = static_cast<double>(state.last_bit);
    StepResult r;
    r.state.x1 = k.pole * state.x1 + k.a1 * (u - v + fb_noise);
    r.state.x2 = k.pole * state.x2 + k.a2 * (r.state.x1 - v);
    r.bit = r.state.x2 >= 0.0 ? +1 : -1;
    r.state.last_bit = r.bit;
    // NaN compares false, so test the negation to catch it too.
    r.overflow = !(std::abs(r.state.x1) <= k.stability_limit &&
                   std::abs(r.state.x2) <= k.stability_limit);
    return r;
}

StepResult step(const LoopState& state, double u, double fb_noise, const ValidatedConfig& cfg)
{
    if (!std::isfinite(state.x1) || !std::isfinite(state.x2)) {
        throw std::invalid_argument("step: loop state is not finite");
    }
    return step(state, u, fb_noise, LoopCoefficients::from(cfg));
}

InstabilityError::InstabilityError(Bitstream partial, std::size_t index, LoopState state)
    : std::runtime_error("modulator unstable at sample " + std::to_string(index) +
                         ": integrator state left the stability envelope (x1=" +
                         std::to_string(state.x1) + ", x2=" + std::to_string(state.x2) + ")"),
      partial_(std::move(partial)),
      index_(index),
      state_(state)
{
}

Bitstream run(const Waveform& input, const ValidatedConfig& cfg, const NoiseConfig& noise,
              std::uint64_t seed, NoiseTraces* traces)
{
    const auto& c = cfg.get();
    if (input.samples.empty()) {
        throw std::invalid_argument("run: empty input");
    }
    if (std::abs(input.fs_hz - c.fs_hz) > 1e-9 * c.fs_hz) {
        throw std::invalid_argument("run: input rate " + std::to_string(input.fs_hz) +
                                    " Hz does not match fs_hz " + std::to_string(c.fs_hz));
    }
    validate_noise(noise);

    const std::size_t n = input.samples.size();
    const double full_scale = effective_full_scale(c.i_ref_amp, c.alpha);
    const auto k = LoopCoefficients::from(cfg);

    // Amplifier path: offset + white + flicker, then CDS.
    std::vector<double> amp(n, noise.amp_offset_amp);
    if (noise.amp_white_enabled && noise.amp_white_psd > 0.0) {
        WhiteNoiseSource white({noise.amp_white_psd, NoiseKind::amp_white}, c.fs_hz,
                               derive_seed(seed, static_cast<std::uint32_t>(NoiseStream::amp_white)));
        for (auto& v : amp) {
            v += white.next();
        }
    }
    if (noise.flicker_enabled && noise.flicker_knee_hz > 0.0 && noise.amp_white_psd > 0.0) {
        FlickerNoiseSource flicker(noise.amp_white_psd, noise.flicker_knee_hz, c.fs_hz,
                                   derive_seed(seed, static_cast<std::uint32_t>(NoiseStream::flicker)));
        for (auto& v : amp) {
            v += flicker.next();
        }
    }
    if (c.cds_enabled) {
        amp = cds_filter(amp);
    }

    WhiteNoiseSource dac(noise.dac_shot_enabled ? input_referred_dac_noise_psd(c.i_ref_amp, c.alpha)
                                                : NoisePsd{0.0, NoiseKind::dac_shot},
                         c.fs_hz, derive_seed(seed, static_cast<std::uint32_t>(NoiseStream::dac)));

    if (traces != nullptr) {
        traces->dac_amp.assign(n, 0.0);
        traces->amplifier_amp = amp;
    }

    Bitstream out;
    out.fs_hz = c.fs_hz;
    out.full_scale_amp = full_scale;
    out.bits.reserve(n);

    LoopState state;
    for (std::size_t i = 0; i < n; ++i) {
        const double dac_noise = dac.next();
        if (traces != nullptr) {
            traces->dac_amp[i] = dac_noise;
        }
        const double u = (input.samples[i] + amp[i]) / full_scale;
        const auto r = step(state, u, dac_noise / full_scale, k);
        if (r.overflow) {
            throw InstabilityError(std::move(out), i, r.state);
        }
        state = r.state;
        out.bits.push_back(static_cast<std::int8_t>(r.bit));
    }
    return out;
}

void write_bitstream_csv(std::ostream& out, const Bitstream& bits, std::uint64_t seed)
{
    char fs[32];
    char fsc[32];
    auto r1 = std::to_chars(fs, fs + sizeof fs, bits.fs_hz);
    auto r2 = std::to_chars(fsc, fsc + sizeof fsc, bits.full_scale_amp);
    out << "# fs_hz=" << std::string_view(fs, r1.ptr - fs)
        << " full_scale_amp=" << std::string_view(fsc, r2.ptr - fsc) << " seed=" << seed << '\n';
    std::string body;
    body.reserve(bits.bits.size() * 3);
    for (auto b : bits.bits) {
        body += b > 0 ? "1\n" : "-1\n";
    }
    out << body;
}

Bitstream read_bitstream_csv(std::istream& in)
{
    Bitstream bits;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            const auto read_field = [&](const std::string& key, double& dst) {
                const auto pos = line.find(key + "=");
                if (pos != std::string::npos) {
                    const char* s = line.data() + pos + key.size() + 1;
                    std::from_chars(s, line.data() + line.size(), dst);
                }
            };
            read_field("fs_hz", bits.fs_hz);
            read_field("full_scale_amp", bits.full_scale_amp);
            continue;
        }
        if (line == "1") {
            bits.bits.push_back(1);
        } else if (line == "-1") {
            bits.bits.push_back(-1);
        } else {
            throw std::runtime_error("bitstream csv: expected 1 or -1, got '" + line + "'");
        }
    }
    return bits;
}

}  // namespace csadc
