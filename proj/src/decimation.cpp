#include "csadc/decimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace csadc {

CicDecimator::CicDecimator(std::int64_t ratio, int order)
    : ratio_(ratio), order_(order), fraction_bits_(0)
{
    if (ratio < 1) {
        throw std::invalid_argument("CicDecimator: ratio must be >= 1");
    }
    if (order < 1) {
        throw std::invalid_argument("CicDecimator: order must be >= 1");
    }
    const double growth = static_cast<double>(order) * std::log2(static_cast<double>(ratio));
    if (growth > 60.0) {
        throw std::invalid_argument("CicDecimator: ratio^order exceeds the 64-bit datapath");
    }
    // Leave one sign bit and one guard bit above the grown word.
    fraction_bits_ = std::clamp(61 - static_cast<int>(std::ceil(growth)), 0, 40);
    reset();
}

void CicDecimator::reset()
{
    phase_ = 0;
    integ_.assign(static_cast<std::size_t>(order_), 0);
    comb_delay_.assign(static_cast<std::size_t>(order_), 0);
}

void CicDecimator::push(std::int64_t x, double out_scale, std::vector<double>& out)
{
    std::uint64_t v = static_cast<std::uint64_t>(x);
    for (auto& acc : integ_) {
        acc += v;
        v = acc;
    }
    if (++phase_ < ratio_) {
        return;
    }
    phase_ = 0;
    for (auto& d : comb_delay_) {
        const std::uint64_t diff = v - d;
        d = v;
        v = diff;
    }
    out.push_back(static_cast<double>(static_cast<std::int64_t>(v)) * out_scale);
}

std::vector<double> CicDecimator::process(std::span<const std::int8_t> in)
{
    const double gain = std::pow(static_cast<double>(ratio_), order_);
    std::vector<double> out;
    out.reserve(in.size() / static_cast<std::size_t>(ratio_) + 1);
    for (auto x : in) {
        push(x, 1.0 / gain, out);
    }
    return out;
}

std::vector<double> CicDecimator::process(std::span<const double> in)
{
    const double gain = std::pow(static_cast<double>(ratio_), order_);
    const double q = std::ldexp(1.0, fraction_bits_);
    std::vector<double> out;
    out.reserve(in.size() / static_cast<std::size_t>(ratio_) + 1);
    for (double x : in) {
        push(static_cast<std::int64_t>(std::llround(x * q)), 1.0 / (gain * q), out);
    }
    return out;
}

DecimatedRecord decimate_cic(const Bitstream& bits, std::int64_t r, int order)
{
    if (r < 1) {
        throw std::invalid_argument("decimate_cic: ratio must be >= 1");
    }
    if (bits.bits.size() % static_cast<std::size_t>(r) != 0) {
        throw std::invalid_argument("decimate_cic: ratio " + std::to_string(r) +
                                    " does not divide bitstream length " +
                                    std::to_string(bits.bits.size()));
    }
    CicDecimator cic(r, order);
    return {cic.process(std::span<const std::int8_t>(bits.bits)),
            bits.fs_hz / static_cast<double>(r), r};
}

double cic_magnitude(double f_hz, double fs_hz, std::int64_t r, int order)
{
    const double x = std::numbers::pi * f_hz / fs_hz;
    if (std::abs(std::sin(x)) < 1e-300) {
        return 1.0;
    }
    const double h = std::sin(x * static_cast<double>(r)) /
                     (static_cast<double>(r) * std::sin(x));
    return std::pow(std::abs(h), order);
}

}  // namespace csadc
