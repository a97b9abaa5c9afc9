#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace csadc {

inline constexpr double kElectronCharge = 1.602176634e-19;  // C

enum class NoiseKind { dac_shot, amp_white, flicker };

/// One-sided power spectral density in A^2/Hz.
struct NoisePsd {
    double value = 0.0;
    NoiseKind kind = NoiseKind::amp_white;
};

/// Shot noise of the DAC reference, 2 q I.
NoisePsd dac_shot_noise_psd(double i_ref_amp);

/// DAC noise referred to the modulator input after slope scaling:
/// 2 q i_ref / alpha^2, where i_ref is the already scaled-up reference.
NoisePsd input_referred_dac_noise_psd(double i_ref_amp, double alpha);

/// Independent random streams drawn from one master seed. The numeric
/// values are the split order and are part of the reproducibility contract.
enum class NoiseStream : std::uint32_t { dac = 0, amp_white = 1, flicker = 2 };

std::uint64_t derive_seed(std::uint64_t master, std::uint32_t stream);

/// Gaussian white noise, sigma^2 = psd * fs / 2.
class WhiteNoiseSource {
public:
    WhiteNoiseSource(NoisePsd psd, double fs_hz, std::uint64_t seed);

    double sigma() const noexcept { return sigma_; }
    double next();
    std::vector<double> generate(std::size_t n);

private:
    double sigma_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
};

/// 1/f noise built from first-order filtered white sources, one pole per
/// decade from fs*1e-6 upward. Section gains make the summed PSD track
///   S(f) = white_psd_at_knee * knee_hz / f,
/// which equals the white level at the corner. Sections start in their
/// stationary distribution so there is no warm-up transient.
class FlickerNoiseSource {
public:
    FlickerNoiseSource(double white_psd_at_knee, double knee_hz, double fs_hz,
                       std::uint64_t seed);

    std::size_t sections() const noexcept { return pole_.size(); }
    double next();
    std::vector<double> generate(std::size_t n);

private:
    std::vector<double> pole_;
    std::vector<double> gain_;
    std::vector<double> state_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
};

std::vector<double> white_noise_samples(NoisePsd psd, double fs_hz, std::size_t n,
                                        std::uint64_t seed);

/// Throws std::invalid_argument if knee_hz >= fs/2. knee_hz == 0 gives zeros.
std::vector<double> flicker_noise_samples(double white_psd_at_knee, double knee_hz,
                                          double fs_hz, std::size_t n, std::uint64_t seed);

/// Correlated double sampling as a first difference: y[k] = x[k] - x[k-1], x[-1] = 0.
std::vector<double> cds_filter(std::span<const double> samples);

}  // namespace csadc
