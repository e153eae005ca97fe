#include "fdsic/channel.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fdsic {

using std::numbers::pi;

PathLossModel PathLossModel::calibrated(double distance_m, double gain_db, double alpha, double cap_delta) {
    PathLossModel m;
    m.alpha = alpha;
    m.cap_delta = cap_delta;
    m.k_const = std::pow(10.0, gain_db / 10.0) * std::pow(distance_m, alpha);
    return m;
}

PathLossModel default_path_loss() { return PathLossModel::calibrated(0.25, -30.0, 4.0); }

double path_loss(const PathLossModel& model, double distance_m) {
    if (distance_m < 0.0) throw std::invalid_argument("path_loss: negative distance");
    if (distance_m == 0.0) return model.cap_delta;
    return std::min(model.cap_delta, model.k_const * std::pow(distance_m, -model.alpha));
}

void MultipathChannel::validate() const {
    if (taps.empty()) throw std::invalid_argument("channel needs at least one tap");
    for (std::size_t i = 0; i < taps.size(); ++i) {
        if (!(taps[i].gain > 0.0)) throw std::invalid_argument("channel tap gain must be positive");
        if (taps[i].delay_s < 0.0) throw std::invalid_argument("channel tap delay must be >= 0");
        if (i > 0 && taps[i].gain > taps[i - 1].gain)
            throw std::invalid_argument("channel taps must be sorted by non-increasing gain");
    }
    if (!(tx_gain > 0.0)) throw std::invalid_argument("tx gain must be positive");
}

void MultipathChannel::check_narrowband(double bandwidth_hz) const {
    if (carrier_hz < 10.0 * bandwidth_hz)
        throw std::invalid_argument("carrier must be at least 10x the signal bandwidth");
}

void sort_taps(std::vector<ChannelTap>& taps) {
    std::stable_sort(taps.begin(), taps.end(),
                     [](const ChannelTap& a, const ChannelTap& b) { return a.gain > b.gain; });
}

MultipathChannel taps_from_geometry(std::span<const double> distances_m, const PathLossModel& model,
                                    double carrier_hz, std::span<const ChannelTap> extra_taps) {
    if (distances_m.empty() && extra_taps.empty())
        throw std::invalid_argument("taps_from_geometry: no reflectors and no extra taps");
    MultipathChannel ch;
    ch.carrier_hz = carrier_hz;
    for (double d : distances_m) {
        if (!(d > 0.0)) throw std::invalid_argument("reflector distance must be positive");
        const double round_trip = 2.0 * d;
        ch.taps.push_back({std::sqrt(path_loss(model, round_trip)), round_trip / kSpeedOfLight});
    }
    ch.taps.insert(ch.taps.end(), extra_taps.begin(), extra_taps.end());
    sort_taps(ch.taps);
    return ch;
}

namespace {
ChannelTap circulator_tap() { return {std::pow(10.0, -18.0 / 20.0), 0.5e-9}; }
}  // namespace

MultipathChannel default_channel(double carrier_hz) {
    const double d[] = {0.125, 0.30};
    const ChannelTap extra[] = {circulator_tap()};
    return taps_from_geometry(d, default_path_loss(), carrier_hz, extra);
}

MultipathChannel circulator_only_channel(double carrier_hz) {
    const ChannelTap extra[] = {circulator_tap()};
    return taps_from_geometry({}, default_path_loss(), carrier_hz, extra);
}

namespace {

// Multiplies the spectrum of x by H(f) and returns the time signal.
template <typename Response>
cvec filter_spectrum(std::span<const cplx> x, double fs, Response&& response) {
    cvec buf(x.begin(), x.end());
    const std::size_t n = buf.size();
    detail::fft_inplace(buf, false);
    for (std::size_t k = 0; k < n; ++k) buf[k] *= response(detail::bin_frequency(k, n, fs));
    detail::fft_inplace(buf, true);
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& v : buf) v *= inv;
    return buf;
}

void check_delay(const BasebandSignal& s, double delay_s) {
    if (std::abs(delay_s) > 0.1 * s.duration_s())
        throw std::invalid_argument("delay exceeds 10% of the signal duration");
}

}  // namespace

BasebandSignal fractional_delay(const BasebandSignal& signal, double delay_s) {
    if (signal.empty()) return signal;
    check_delay(signal, delay_s);
    if (delay_s == 0.0) return signal;
    auto y = filter_spectrum(signal.samples, signal.sample_rate_hz,
                             [delay_s](double f) { return std::polar(1.0, -2.0 * pi * f * delay_s); });
    return {std::move(y), signal.sample_rate_hz};
}

BasebandSignal apply_channel(const MultipathChannel& channel, const BasebandSignal& x) {
    channel.validate();
    if (x.empty()) return x;
    for (const auto& t : channel.taps) check_delay(x, t.delay_s);
    // All taps in one pass: H(f) = sqrt(G_t) sum_k a_k e^{-j2pi (f_c + f) tau_k}.
    const double g = std::sqrt(channel.tx_gain);
    auto y = filter_spectrum(x.samples, x.sample_rate_hz, [&](double f) {
        cplx h{};
        for (const auto& t : channel.taps) {
            // Carrier and baseband phases kept apart: f_c * tau is large, reduce it first.
            const double carrier_cycles = channel.carrier_hz * t.delay_s;
            const double frac = carrier_cycles - std::floor(carrier_cycles);
            h += t.gain * std::polar(1.0, -2.0 * pi * (frac + f * t.delay_s));
        }
        return g * h;
    });
    return {std::move(y), x.sample_rate_hz};
}

void ReceiverImpairments::validate(double sample_rate_hz) const {
    if (noise_power < 0.0) throw std::invalid_argument("noise power must be >= 0");
    if (adc_bits != 0 && (adc_bits < 4 || adc_bits > 16)) throw std::invalid_argument("adc_bits must be 0 or 4..16");
    if (sample_offset_s < 0.0 || sample_offset_s >= 1.0 / sample_rate_hz)
        throw std::invalid_argument("sample offset must lie in [0, 1/fs)");
}

cvec quantize_iq(std::span<const cplx> x, int bits, double full_scale) {
    const double levels = std::ldexp(1.0, bits);
    const double step = 2.0 * full_scale / levels;
    const double top = levels / 2.0 - 1.0;
    auto q = [&](double v) {
        double idx = std::floor(v / step);
        idx = std::clamp(idx, -levels / 2.0, top);
        return (idx + 0.5) * step;
    };
    cvec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = {q(x[i].real()), q(x[i].imag())};
    return out;
}

BasebandSignal impair(const BasebandSignal& rx, const ReceiverImpairments& imp, std::uint64_t seed) {
    if (rx.empty()) return rx;
    imp.validate(rx.sample_rate_hz);
    BasebandSignal out = imp.sample_offset_s != 0.0 ? fractional_delay(rx, -imp.sample_offset_s) : rx;
    if (imp.noise_power > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n01(0.0, 1.0);
        const double sigma = std::sqrt(imp.noise_power / 2.0);
        for (auto& v : out.samples) v += cplx{sigma * n01(rng), sigma * n01(rng)};
    }
    if (imp.adc_bits > 0) {
        const double rms = std::sqrt(mean_power(out.samples));
        if (rms > 0.0) out.samples = quantize_iq(out.samples, imp.adc_bits, kAdcFullScaleRms * rms);
    }
    out.refresh_power();
    return out;
}

}  // namespace fdsic
