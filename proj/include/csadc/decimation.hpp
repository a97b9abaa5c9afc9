#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csadc/core_model.hpp"

namespace csadc {

/// Cascaded integrator-comb decimator (differential delay 1). Integrators
/// and combs run in wrapping 64-bit arithmetic, which is exact as long as
/// the final output fits; outputs are divided by ratio^order for unity DC
/// gain.
class CicDecimator {
public:
    CicDecimator(std::int64_t ratio, int order);

    std::int64_t ratio() const noexcept { return ratio_; }
    int order() const noexcept { return order_; }

    /// Feeds integer samples; returns the outputs completed by this call.
    std::vector<double> process(std::span<const std::int8_t> in);

    /// Real-valued input, quantized to `fraction_bits()` fractional bits
    /// before entering the integer datapath.
    std::vector<double> process(std::span<const double> in);

    int fraction_bits() const noexcept { return fraction_bits_; }
    void reset();

private:
    void push(std::int64_t x, double out_scale, std::vector<double>& out);

    std::int64_t ratio_;
    int order_;
    int fraction_bits_;
    std::int64_t phase_ = 0;
    std::vector<std::uint64_t> integ_;
    std::vector<std::uint64_t> comb_delay_;
};

/// Length of `bits` must be a multiple of r. Output rate is fs / r.
DecimatedRecord decimate_cic(const Bitstream& bits, std::int64_t r, int order = 3);

/// Closed-form magnitude |sin(pi f r / fs) / (r sin(pi f / fs))|^order.
double cic_magnitude(double f_hz, double fs_hz, std::int64_t r, int order);

}  // namespace csadc
