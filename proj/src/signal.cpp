#include "fdsic/signal.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fdsic {

using std::numbers::pi;

BasebandSignal::BasebandSignal(cvec s, double fs) : samples(std::move(s)), sample_rate_hz(fs) {
    refresh_power();
}

void BasebandSignal::refresh_power() { mean_power = fdsic::mean_power(samples); }

BasebandSignal BasebandSignal::scaled(cplx gain) const {
    cvec out(samples.size());
    std::transform(samples.begin(), samples.end(), out.begin(), [gain](cplx v) { return gain * v; });
    return {std::move(out), sample_rate_hz};
}

double mean_power(std::span<const cplx> x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& v : x) acc += std::norm(v);
    return acc / static_cast<double>(x.size());
}

namespace {

double sinc_pulse(double u) {
    if (std::abs(u) < 1e-12) return 1.0;
    return std::sin(pi * u) / (pi * u);
}

double rrc_pulse(double beta, double u) {
    if (beta <= 0.0) return sinc_pulse(u);
    if (std::abs(u) < 1e-12) return 1.0 - beta + 4.0 * beta / pi;
    const double edge = 1.0 / (4.0 * beta);
    if (std::abs(std::abs(u) - edge) < 1e-9) {
        return beta / std::sqrt(2.0) *
               ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * beta)) +
                (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * beta)));
    }
    const double num = std::sin(pi * u * (1.0 - beta)) + 4.0 * beta * u * std::cos(pi * u * (1.0 + beta));
    const double den = pi * u * (1.0 - 16.0 * beta * beta * u * u);
    return num / den;
}

void normalize_unit_power(cvec& x) {
    const double p = mean_power(x);
    if (p <= 0.0) throw std::runtime_error("generated signal has zero power");
    const double s = 1.0 / std::sqrt(p);
    for (auto& v : x) v *= s;
}

void check_common(const SignalSpec& spec) {
    if (!(spec.bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (spec.oversampling < 1) throw std::invalid_argument("oversampling must be >= 1");
    if (spec.num_symbols < 1) throw std::invalid_argument("num_symbols must be >= 1");
}

}  // namespace

double pulse_value(PulseShape pulse, double rolloff, double u) {
    if (std::abs(u) > kPulseHalfSpan) return 0.0;
    return pulse == PulseShape::sinc ? sinc_pulse(u) : rrc_pulse(rolloff, u);
}

cvec shape_symbols(std::span<const cplx> symbols, PulseShape pulse, double rolloff, int oversampling) {
    const auto S = static_cast<long>(symbols.size());
    const long os = oversampling;
    const long len = S * os;
    // Tabulate the pulse once on the sample grid.
    std::vector<double> taps(2 * kPulseHalfSpan * os + 1);
    for (long i = 0; i < static_cast<long>(taps.size()); ++i) {
        const double u = static_cast<double>(i - kPulseHalfSpan * os) / static_cast<double>(os);
        taps[i] = pulse_value(pulse, rolloff, u);
    }
    cvec out(len, cplx{});
    for (long n = 0; n < S; ++n) {
        const cplx s = symbols[n];
        if (s == cplx{}) continue;
        const long centre = n * os;
        for (long i = 0; i < static_cast<long>(taps.size()); ++i) {
            long m = (centre + i - kPulseHalfSpan * os) % len;
            if (m < 0) m += len;
            out[m] += s * taps[i];
        }
    }
    return out;
}

cvec draw_symbols(Constellation c, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    cvec out(count);
    if (c == Constellation::qpsk4) {
        const double a = 1.0 / std::sqrt(2.0);
        for (auto& v : out) {
            const auto bits = rng() >> 62;
            v = {(bits & 1u) ? a : -a, (bits & 2u) ? a : -a};
        }
    } else {
        // 16-QAM levels {-3,-1,1,3}/sqrt(10)
        const double a = 1.0 / std::sqrt(10.0);
        for (auto& v : out) {
            const auto bits = rng() >> 60;
            const double i = 2.0 * static_cast<double>(bits & 3u) - 3.0;
            const double q = 2.0 * static_cast<double>((bits >> 2) & 3u) - 3.0;
            v = {a * i, a * q};
        }
    }
    return out;
}

BasebandSignal gen_single_carrier(const SignalSpec& spec) {
    check_common(spec);
    if (spec.kind != WaveformKind::single_carrier) throw std::invalid_argument("spec is not single-carrier");
    if (spec.pulse == PulseShape::sinc && spec.oversampling < 2)
        throw std::invalid_argument("sinc pulse requires oversampling >= 2");
    if (spec.pulse == PulseShape::rrc && (spec.rolloff < 0.0 || spec.rolloff > 1.0))
        throw std::invalid_argument("rrc rolloff must lie in [0, 1]");
    const auto symbols = draw_symbols(spec.constellation, static_cast<std::size_t>(spec.num_symbols), spec.seed);
    auto x = shape_symbols(symbols, spec.pulse, spec.rolloff, spec.oversampling);
    normalize_unit_power(x);
    return {std::move(x), spec.sample_rate_hz()};
}

std::vector<int> ofdm_used_bins(int fft_size, int used_carriers) {
    std::vector<int> bins;
    bins.reserve(static_cast<std::size_t>(used_carriers));
    const int neg = used_carriers / 2;
    const int pos = used_carriers - neg;
    for (int k = 1; k <= pos; ++k) bins.push_back(k);
    for (int k = neg; k >= 1; --k) bins.push_back(fft_size - k);
    return bins;
}

cvec ofdm_modulate(const std::vector<cvec>& carriers, int fft_size, int oversampling) {
    const std::size_t big = static_cast<std::size_t>(fft_size) * oversampling;
    const std::size_t cp = static_cast<std::size_t>(fft_size / 8) * oversampling;
    cvec frame;
    frame.reserve(carriers.size() * (big + cp));
    for (const auto& sym : carriers) {
        if (sym.size() != static_cast<std::size_t>(fft_size))
            throw std::invalid_argument("ofdm symbol must hold fft_size bins");
        cvec buf(big, cplx{});
        for (int k = 0; k < fft_size; ++k) {
            if (sym[k] == cplx{}) continue;
            // Map the natural-order bin onto the oversampled grid keeping its signed frequency.
            const int signed_k = k < fft_size - fft_size / 2 ? k : k - fft_size;
            const auto idx = static_cast<std::size_t>((signed_k + static_cast<long>(big)) % static_cast<long>(big));
            buf[idx] = sym[k];
        }
        detail::fft_inplace(buf, true);
        frame.insert(frame.end(), buf.end() - static_cast<long>(cp), buf.end());
        frame.insert(frame.end(), buf.begin(), buf.end());
    }
    // Transmit low-pass: drop periodic-frame content outside +/- W/2 (symbol-edge splatter).
    const std::size_t n = frame.size();
    if (oversampling > 1 && n > 0) {
        detail::fft_inplace(frame, false);
        const double limit = 0.5 / oversampling;  // cycles/sample
        for (std::size_t k = 0; k < n; ++k)
            if (std::abs(detail::bin_frequency(k, n, 1.0)) > limit) frame[k] = cplx{};
        detail::fft_inplace(frame, true);
        for (auto& v : frame) v /= static_cast<double>(n);
    }
    return frame;
}

BasebandSignal gen_ofdm(const SignalSpec& spec) {
    check_common(spec);
    if (spec.kind != WaveformKind::ofdm) throw std::invalid_argument("spec is not OFDM");
    if (spec.ofdm_fft_size < 8) throw std::invalid_argument("ofdm fft size too small");
    if (spec.ofdm_used_carriers < 1 || spec.ofdm_used_carriers >= spec.ofdm_fft_size - 1)
        throw std::invalid_argument("ofdm used carriers must be fewer than fft_size (DC is always null)");
    const auto bins = ofdm_used_bins(spec.ofdm_fft_size, spec.ofdm_used_carriers);
    const auto symbols = draw_symbols(spec.constellation, bins.size() * static_cast<std::size_t>(spec.num_symbols),
                                      spec.seed);
    std::vector<cvec> carriers(static_cast<std::size_t>(spec.num_symbols), cvec(spec.ofdm_fft_size, cplx{}));
    std::size_t next = 0;
    for (auto& sym : carriers)
        for (int b : bins) sym[b] = symbols[next++];
    auto x = ofdm_modulate(carriers, spec.ofdm_fft_size, spec.oversampling);
    normalize_unit_power(x);
    return {std::move(x), spec.sample_rate_hz()};
}

BasebandSignal generate(const SignalSpec& spec) {
    return spec.kind == WaveformKind::ofdm ? gen_ofdm(spec) : gen_single_carrier(spec);
}

double papr_db(const BasebandSignal& signal) {
    if (signal.empty()) throw std::invalid_argument("papr of empty signal");
    double peak = 0.0;
    double acc = 0.0;
    for (const auto& v : signal.samples) {
        const double p = std::norm(v);
        peak = std::max(peak, p);
        acc += p;
    }
    const double mean = acc / static_cast<double>(signal.size());
    if (mean <= 0.0) throw std::invalid_argument("papr of all-zero signal");
    return 10.0 * std::log10(peak / mean);
}

}  // namespace fdsic
