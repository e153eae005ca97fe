#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace fdsic {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

enum class WaveformKind { single_carrier, ofdm };
enum class Constellation { qpsk4, qam16 };
enum class PulseShape { sinc, rrc };

/// Transmit waveform description. The symbol duration is exactly 1/bandwidth_hz and
/// the simulation runs at oversampling * bandwidth_hz.
struct SignalSpec {
    WaveformKind kind = WaveformKind::ofdm;
    double bandwidth_hz = 20e6;
    int oversampling = 4;
    int num_symbols = 20;
    Constellation constellation = Constellation::qpsk4;
    PulseShape pulse = PulseShape::rrc;
    double rolloff = 0.3;
    int ofdm_fft_size = 1024;
    int ofdm_used_carriers = 620;
    std::uint64_t seed = 1;

    double symbol_period_s() const { return 1.0 / bandwidth_hz; }
    double sample_rate_hz() const { return bandwidth_hz * oversampling; }
    int ofdm_cp_length() const { return ofdm_fft_size / 8; }
};

/// Uniformly sampled complex baseband sequence. mean_power is E|x|^2 over the samples.
struct BasebandSignal {
    cvec samples;
    double sample_rate_hz = 0.0;
    double mean_power = 0.0;

    BasebandSignal() = default;
    BasebandSignal(cvec s, double fs);

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
    std::span<const cplx> view() const { return samples; }

    /// Recomputes mean_power from the samples.
    void refresh_power();
    BasebandSignal scaled(cplx gain) const;
};

double mean_power(std::span<const cplx> x);

/// Pulse shapes truncated to +/- this many symbol durations.
inline constexpr int kPulseHalfSpan = 16;

/// Pulse value at u symbol durations from its centre. The sinc pulse is sin(pi u)/(pi u),
/// band-limited to +/- 1/(2T); rrc is the unit-energy root-raised-cosine.
double pulse_value(PulseShape pulse, double rolloff, double u);

/// Periodic pulse shaping: sample m equals sum_n s_{n mod S} g(m/os - n) over the truncated
/// pulse span. Output length symbols.size() * os, not normalized.
cvec shape_symbols(std::span<const cplx> symbols, PulseShape pulse, double rolloff, int oversampling);

/// Unit-power constellation points drawn uniformly from a 64-bit generator.
cvec draw_symbols(Constellation c, std::size_t count, std::uint64_t seed);

BasebandSignal gen_single_carrier(const SignalSpec& spec);
BasebandSignal gen_ofdm(const SignalSpec& spec);
BasebandSignal generate(const SignalSpec& spec);

/// OFDM modulation of explicit frequency-domain symbols. Each entry of `carriers` holds
/// fft_size bins in natural DFT order (bin 0 = DC). A cyclic prefix of fft_size/8 is
/// prepended per symbol and the frame is passed through an ideal periodic transmit
/// low-pass at +/- bandwidth/2. Output is not normalized.
cvec ofdm_modulate(const std::vector<cvec>& carriers, int fft_size, int oversampling);

/// Indices (natural DFT order, in [0, fft_size)) of the used subcarriers: DC and the
/// band edges are left empty.
std::vector<int> ofdm_used_bins(int fft_size, int used_carriers);

/// 10 log10(peak / mean) of |x|^2.
double papr_db(const BasebandSignal& signal);

}  // namespace fdsic
