#pragma once

#include "fdsic/signal.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fdsic {

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// l(x) = min{cap, k |x|^-alpha}, a linear power gain over a round-trip distance x.
struct PathLossModel {
    double cap_delta = 1.0;
    double k_const = 3.90625e-6;
    double alpha = 4.0;

    /// Model with the given exponent whose gain at `distance_m` equals `gain_db`.
    static PathLossModel calibrated(double distance_m, double gain_db, double alpha, double cap_delta = 1.0);
};

/// Default fit: -30 dB at 0.25 m round trip (a reflector 12.5 cm away), alpha = 4.
PathLossModel default_path_loss();

double path_loss(const PathLossModel& model, double distance_m);

struct ChannelTap {
    double gain = 1.0;     ///< amplitude a_k
    double delay_s = 0.0;  ///< tau_k
};

struct MultipathChannel {
    std::vector<ChannelTap> taps;  ///< sorted by non-increasing gain
    double carrier_hz = 2.395e9;
    double tx_gain = 1.0;  ///< G_t, linear power

    /// Throws if the channel breaks its invariants (no taps, bad gains, unsorted).
    void validate() const;
    /// Throws unless carrier_hz >= 10 * bandwidth_hz.
    void check_narrowband(double bandwidth_hz) const;
};

/// Stable sort by gain, largest first.
void sort_taps(std::vector<ChannelTap>& taps);

/// One tap per reflector at one-way distance d: tau = 2d/c, a = sqrt(l(2d)); merged with
/// extra_taps (e.g. circulator leakage).
MultipathChannel taps_from_geometry(std::span<const double> distances_m, const PathLossModel& model,
                                    double carrier_hz, std::span<const ChannelTap> extra_taps);

/// Circulator leakage (-18 dB, 0.5 ns) plus reflectors at 12.5 cm and 30 cm.
MultipathChannel default_channel(double carrier_hz = 2.395e9);
/// Circulator leakage only (antenna port terminated).
MultipathChannel circulator_only_channel(double carrier_hz = 2.395e9);

/// Circular band-limited delay by a frequency-domain phase ramp. |delay| must not exceed
/// 10% of the signal duration.
BasebandSignal fractional_delay(const BasebandSignal& signal, double delay_s);

/// Exact baseband-equivalent self-interference:
/// sqrt(G_t) * sum_k a_k e^{-j2pi f_c tau_k} x(t - tau_k).
BasebandSignal apply_channel(const MultipathChannel& channel, const BasebandSignal& x);

struct ReceiverImpairments {
    double noise_power = 0.0;   ///< linear, complex white Gaussian; 0 = off
    int adc_bits = 0;           ///< 0 = ideal, otherwise 4..16
    double sample_offset_s = 0.0;  ///< sampling phase, in [0, 1/fs)

    void validate(double sample_rate_hz) const;
};

/// Full scale of each ADC rail relative to the complex RMS of its input.
inline constexpr double kAdcFullScaleRms = 4.0;

/// Sampling offset, then additive noise, then I/Q quantization.
BasebandSignal impair(const BasebandSignal& rx, const ReceiverImpairments& imp, std::uint64_t seed);

/// Mid-rise quantizer applied to I and Q separately, clipping at +/- full_scale.
cvec quantize_iq(std::span<const cplx> x, int bits, double full_scale);

}  // namespace fdsic
