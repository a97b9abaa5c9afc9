#include "csadc/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace csadc {

NoisePsd dac_shot_noise_psd(double i_ref_amp)
{
    if (!(i_ref_amp >= 0.0)) {
        throw std::invalid_argument("dac_shot_noise_psd: negative bias current");
    }
    return {2.0 * kElectronCharge * i_ref_amp, NoiseKind::dac_shot};
}

NoisePsd input_referred_dac_noise_psd(double i_ref_amp, double alpha)
{
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("input_referred_dac_noise_psd: alpha must be > 0");
    }
    return {dac_shot_noise_psd(i_ref_amp).value / (alpha * alpha), NoiseKind::dac_shot};
}

std::uint64_t derive_seed(std::uint64_t master, std::uint32_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      stream};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[1]) << 32) | words[0];
}

WhiteNoiseSource::WhiteNoiseSource(NoisePsd psd, double fs_hz, std::uint64_t seed)
    : sigma_(0.0), rng_(seed), normal_(0.0, 1.0)
{
    if (!(psd.value >= 0.0)) {
        throw std::invalid_argument("WhiteNoiseSource: psd must be >= 0");
    }
    if (!(fs_hz > 0.0)) {
        throw std::invalid_argument("WhiteNoiseSource: fs must be > 0");
    }
    sigma_ = std::sqrt(psd.value * fs_hz / 2.0);
}

double WhiteNoiseSource::next()
{
    return sigma_ == 0.0 ? 0.0 : sigma_ * normal_(rng_);
}

std::vector<double> WhiteNoiseSource::generate(std::size_t n)
{
    std::vector<double> out(n);
    for (auto& v : out) {
        v = next();
    }
    return out;
}

FlickerNoiseSource::FlickerNoiseSource(double white_psd_at_knee, double knee_hz, double fs_hz,
                                       std::uint64_t seed)
    : rng_(seed), normal_(0.0, 1.0)
{
    if (!(fs_hz > 0.0)) {
        throw std::invalid_argument("FlickerNoiseSource: fs must be > 0");
    }
    if (!(knee_hz >= 0.0) || knee_hz >= fs_hz / 2.0) {
        throw std::invalid_argument("FlickerNoiseSource: knee_hz must be in [0, fs/2)");
    }
    if (!(white_psd_at_knee >= 0.0)) {
        throw std::invalid_argument("FlickerNoiseSource: psd must be >= 0");
    }
    if (knee_hz == 0.0 || white_psd_at_knee == 0.0) {
        return;
    }

    const double f_min = fs_hz * 1e-6;
    const double decades = std::log10((fs_hz / 2.0) / f_min);
    const auto count = static_cast<std::size_t>(std::ceil(decades)) + 1;

    // Decade-spaced Lorentzians with S_k(0) = g * C / f_k sum to C / f on
    // average when g = 2 ln(10) / pi.
    const double c = white_psd_at_knee * knee_hz;
    const double g = 2.0 * std::numbers::ln10 / std::numbers::pi;

    for (std::size_t k = 0; k < count; ++k) {
        const double fk = f_min * std::pow(10.0, static_cast<double>(k));
        const double a = std::exp(-2.0 * std::numbers::pi * fk / fs_hz);
        const double s0 = g * c / fk;
        const double b = (1.0 - a) * std::sqrt(fs_hz * s0 / 2.0);
        pole_.push_back(a);
        gain_.push_back(b);
        const double stationary_sigma = b / std::sqrt(1.0 - a * a);
        state_.push_back(stationary_sigma * normal_(rng_));
    }
}

double FlickerNoiseSource::next()
{
    double sum = 0.0;
    for (std::size_t k = 0; k < pole_.size(); ++k) {
        state_[k] = pole_[k] * state_[k] + gain_[k] * normal_(rng_);
        sum += state_[k];
    }
    return sum;
}

std::vector<double> FlickerNoiseSource::generate(std::size_t n)
{
    std::vector<double> out(n);
    for (auto& v : out) {
        v = next();
    }
    return out;
}

std::vector<double> white_noise_samples(NoisePsd psd, double fs_hz, std::size_t n,
                                        std::uint64_t seed)
{
    return WhiteNoiseSource(psd, fs_hz, seed).generate(n);
}

std::vector<double> flicker_noise_samples(double white_psd_at_knee, double knee_hz,
                                          double fs_hz, std::size_t n, std::uint64_t seed)
{
    return FlickerNoiseSource(white_psd_at_knee, knee_hz, fs_hz, seed).generate(n);
}

std::vector<double> cds_filter(std::span<const double> samples)
{
    std::vector<double> out(samples.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out[i] = samples[i] - prev;
        prev = samples[i];
    }
    return out;
}

}  // namespace csadc
