#include <doctest.h>

#include <cmath>
#include <sstream>

#include "csadc/modulator.hpp"
#include "csadc/noise.hpp"
#include "csadc/stimulus.hpp"

using namespace csadc;

namespace {

ModulatorConfig with_alpha(double alpha, double i_ref)
{
    ModulatorConfig c;
    c.c2_farad = 100e-15;
    c.c3_farad = alpha * 100e-15;
    c.alpha = alpha;
    c.i_ref_amp = i_ref;
    return c;
}

double mean_bits(const Bitstream& b)
{
    double s = 0;
    for (auto v : b.bits) {
        s += v;
    }
    return s / static_cast<double>(b.bits.size());
}

}  // namespace

TEST_CASE("slope scaled feedback")
{
    CHECK(slope_scaled_feedback(+1, {10e-9, 100.0, true}) == doctest::Approx(100e-12).epsilon(1e-14));
    CHECK(slope_scaled_feedback(-1, {1e-6, 1.0, true}) == -1e-6);
    CHECK(slope_scaled_feedback(+1, {100e-6, 100.0, true}) == doctest::Approx(1e-6).epsilon(1e-14));
    CHECK_THROWS(slope_scaled_feedback(0, {1e-6, 1.0, true}));
    const FeedbackDac dac{3e-6, 7.0, false};
    CHECK(std::abs(slope_scaled_feedback(1, dac)) == dac.magnitude());
    CHECK(std::abs(slope_scaled_feedback(-1, dac)) == dac.magnitude());
}

TEST_CASE("cds effective gain")
{
    CHECK(cds_effective_gain(100) == 10000);
    CHECK(cds_effective_gain(1) == 1);
    CHECK(cds_effective_gain(10) == 100);
    CHECK(cds_effective_gain(100, false) == 100);
    CHECK_THROWS(cds_effective_gain(0.5));
}

TEST_CASE("integrator leak pole")
{
    CHECK(integrator_leak_pole(1e4) == doctest::Approx(0.9999).epsilon(1e-15));
    CHECK(integrator_leak_pole(std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(integrator_leak_pole(1.0) == 0.0);
    CHECK_THROWS(integrator_leak_pole(0.5));
}

TEST_CASE("loop coefficients include gain leak and reset duty loss")
{
    const auto k = LoopCoefficients::from(validate_config(ModulatorConfig{}));
    CHECK(k.pole == doctest::Approx(0.9999));
    CHECK(k.a1 == doctest::Approx(0.7 * 0.99));
    CHECK(k.a2 == doctest::Approx(0.5 * 0.99));
    CHECK(k.stability_limit == 10.0);
}

TEST_CASE("step applies the two-integrator update")
{
    const LoopCoefficients k{0.9, 0.5, 0.25, 10.0};
    const LoopState s{0.2, -0.4, -1};
    const auto r = step(s, 0.3, 0.01, k);
    const double x1 = 0.9 * 0.2 + 0.5 * (0.3 + 1 + 0.01);
    const double x2 = 0.9 * -0.4 + 0.25 * (x1 + 1);
    CHECK(r.state.x1 == doctest::Approx(x1));
    CHECK(r.state.x2 == doctest::Approx(x2));
    CHECK(r.bit == (x2 >= 0 ? 1 : -1));
    CHECK(r.state.last_bit == r.bit);
    CHECK_FALSE(r.overflow);
}

TEST_CASE("sign tie-break gives +1 at exactly zero")
{
    const LoopCoefficients k{1.0, 0.5, 0.5, 10.0};
    // x1' = 0.5 (1 - 1) = 0, x2' = 0.5 + 0.5 (0 - 1) = 0
    const auto r = step(LoopState{0.0, 0.5, +1}, 1.0, 0.0, k);
    CHECK(r.state.x2 == 0.0);
    CHECK(r.bit == +1);

    // Negative zero takes the same branch.
    const auto n = step(LoopState{0.0, -0.0, +1}, 1.0, 0.0, LoopCoefficients{1.0, 0.5, 0.0, 10.0});
    CHECK(n.state.x2 == 0.0);
    CHECK(std::signbit(n.state.x2));
    CHECK(n.bit == +1);
}

TEST_CASE("step flags overflow and rejects non-finite state")
{
    const LoopCoefficients k{1.0, 0.5, 0.5, 1.0};
    CHECK(step(LoopState{0.9, 0.0, -1}, 1.0, 0.0, k).overflow);
    const auto vc = validate_config(ModulatorConfig{});
    CHECK_THROWS(step(LoopState{std::nan(""), 0.0, 1}, 0.0, 0.0, vc));
}

TEST_CASE("zero input gives a zero-mean bitstream")
{
    const auto vc = validate_config(ModulatorConfig{});
    const std::size_t n = 1 << 14;
    const auto b = run(gen_dc(0.0, vc->fs_hz, n), vc, NoiseConfig{}, 1);
    CHECK(b.bits.size() == n);
    CHECK(std::abs(mean_bits(b)) <= 2.0 / std::sqrt(static_cast<double>(n)));
    for (auto v : b.bits) {
        CHECK((v == 1 || v == -1));
    }
}

TEST_CASE("bitstream mean tracks a DC input")
{
    const auto vc = validate_config(ModulatorConfig{});
    const double fs = effective_full_scale(vc->i_ref_amp, vc->alpha);
    const auto b = run(gen_dc(0.5 * fs, vc->fs_hz, 1 << 14), vc, NoiseConfig{}, 1);
    CHECK(mean_bits(b) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::abs(mean_bits(b) - 0.5) <= 0.01);
    CHECK(b.full_scale_amp == fs);
    CHECK(b.fs_hz == vc->fs_hz);
}

TEST_CASE("run input checks")
{
    const auto vc = validate_config(ModulatorConfig{});
    try {
        run(Waveform{{}, vc->fs_hz}, vc, NoiseConfig{}, 1);
        FAIL("no error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("empty input") != std::string::npos);
    }
    CHECK_THROWS_AS(run(gen_dc(0.0, 1e6, 16), vc, NoiseConfig{}, 1), std::invalid_argument);
}

TEST_CASE("run is deterministic per seed")
{
    const auto vc = validate_config(ModulatorConfig{});
    NoiseConfig noise;
    noise.dac_shot_enabled = true;
    noise.amp_white_psd = 1e-21;
    noise.flicker_enabled = true;
    noise.flicker_knee_hz = 1e3;
    const auto in = gen_tone(-5, 1.9e3, vc->fs_hz, 1 << 14, 1e-6);
    const auto a = run(in, vc, noise, 99);
    const auto b = run(in, vc, noise, 99);
    const auto c = run(in, vc, noise, 100);
    CHECK(a.bits == b.bits);
    CHECK(a.bits != c.bits);
}

TEST_CASE("noiseless bitstream is invariant to full-scale scaling")
{
    const std::size_t n = 1 << 14;
    for (double k : {8.0, 0.25, 10.0}) {
        const auto base = validate_config(with_alpha(100, 100e-6));
        const auto scaled = validate_config(with_alpha(100, 100e-6 * k));
        const auto in = gen_tone(-5, 1.9e3, base->fs_hz, n, 1e-6);
        auto in_k = in;
        for (auto& v : in_k.samples) {
            v *= k;
        }
        CHECK(run(in, base, NoiseConfig{}, 1).bits == run(in_k, scaled, NoiseConfig{}, 1).bits);
    }
}

TEST_CASE("noiseless bitstream depends only on the normalized input")
{
    const std::size_t n = 1 << 14;
    std::vector<std::int8_t> first;
    for (double alpha : {1.0, 4.0, 100.0, 256.0}) {
        const auto vc = validate_config(with_alpha(alpha, 64e-6));
        const double fs = effective_full_scale(vc->i_ref_amp, vc->alpha);
        const auto b = run(gen_tone(-7, 3.1e3, vc->fs_hz, n, fs), vc, NoiseConfig{}, 1);
        if (first.empty()) {
            first = b.bits;
        }
        CHECK(b.bits == first);
    }
}

TEST_CASE("noiseless DC inputs up to 0.7 of full scale stay stable")
{
    const auto vc = validate_config(ModulatorConfig{});
    const double fs = effective_full_scale(vc->i_ref_amp, vc->alpha);
    for (double u = -0.7; u <= 0.7 + 1e-12; u += 0.05) {
        CHECK_NOTHROW(run(gen_dc(u * fs, vc->fs_hz, 1 << 16), vc, NoiseConfig{}, 1));
    }
}

TEST_CASE("overload raises InstabilityError with the partial bitstream")
{
    const auto vc = validate_config(ModulatorConfig{});
    const double fs = effective_full_scale(vc->i_ref_amp, vc->alpha);
    try {
        run(gen_dc(3 * fs, vc->fs_hz, 1000), vc, NoiseConfig{}, 1);
        FAIL("no error");
    } catch (const InstabilityError& e) {
        CHECK(e.partial().bits.size() == e.index());
        CHECK(e.index() < 1000);
        CHECK(std::abs(e.state().x1) + std::abs(e.state().x2) > vc->stability_limit);
    }
}

TEST_CASE("noise traces: CDS removes the offset after the first sample")
{
    auto c = ModulatorConfig{};
    const auto vc = validate_config(c);
    NoiseConfig noise;
    noise.amp_offset_amp = 1e-8;
    NoiseTraces t;
    run(gen_dc(0.0, vc->fs_hz, 64), vc, noise, 1, &t);
    CHECK(t.amplifier_amp[0] == 1e-8);
    for (std::size_t k = 1; k < 64; ++k) {
        CHECK(t.amplifier_amp[k] == 0.0);
        CHECK(t.dac_amp[k] == 0.0);
    }

    c.cds_enabled = false;
    run(gen_dc(0.0, vc->fs_hz, 64), validate_config(c), noise, 1, &t);
    CHECK(t.amplifier_amp == std::vector<double>(64, 1e-8));
}

TEST_CASE("dac noise trace has the input-referred shot level")
{
    const auto vc = validate_config(ModulatorConfig{});
    NoiseConfig noise;
    noise.dac_shot_enabled = true;
    NoiseTraces t;
    run(gen_dc(0.0, vc->fs_hz, 1 << 16), vc, noise, 5, &t);
    double s = 0;
    for (double v : t.dac_amp) {
        s += v * v;
    }
    const double want = 2 * kElectronCharge * vc->i_ref_amp / (vc->alpha * vc->alpha) * vc->fs_hz / 2;
    CHECK(s / t.dac_amp.size() == doctest::Approx(want).epsilon(0.03));
}

TEST_CASE("bitstream csv round-trip")
{
    const auto vc = validate_config(ModulatorConfig{});
    const auto b = run(gen_tone(-5, 1.9e3, vc->fs_hz, 300, 1e-6), vc, NoiseConfig{}, 1);
    std::stringstream ss;
    write_bitstream_csv(ss, b, 7);
    CHECK(ss.str().rfind("# fs_hz=1024000 full_scale_amp=", 0) == 0);
    const auto back = read_bitstream_csv(ss);
    CHECK(back.bits == b.bits);
    CHECK(back.fs_hz == b.fs_hz);
    CHECK(back.full_scale_amp == b.full_scale_amp);
}
