#include "fdsic/metrics.hpp"

#include "fft.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace fdsic {

using std::numbers::pi;

double to_db(double linear) { return 10.0 * std::log10(linear); }

double cancellation_db(double power_before, double power_after) {
    if (!(power_before > 0.0)) throw std::invalid_argument("cancellation_db: zero power before cancellation");
    if (power_after <= 0.0) return kMaxCancellationDb;
    return std::min(kMaxCancellationDb, to_db(power_before / power_after));
}

double cancellation_db(const BasebandSignal& before, const BasebandSignal& after) {
    if (before.empty() || after.empty()) throw std::invalid_argument("cancellation_db: empty signal");
    return cancellation_db(mean_power(before.samples), mean_power(after.samples));
}

Psd psd(const BasebandSignal& signal, std::size_t segment_len, std::size_t overlap) {
    const std::size_t n = signal.size();
    if (segment_len < 2 || (segment_len & (segment_len - 1)) != 0)
        throw std::invalid_argument("psd: segment length must be a power of two");
    if (segment_len > n) throw std::invalid_argument("psd: segment longer than the signal");
    if (overlap >= segment_len) throw std::invalid_argument("psd: overlap must be shorter than the segment");

    std::vector<double> window(segment_len);
    for (std::size_t i = 0; i < segment_len; ++i)
        window[i] = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(segment_len));
    const double wpow = std::accumulate(window.begin(), window.end(), 0.0, [](double a, double w) { return a + w * w; });

    const std::size_t hop = segment_len - overlap;
    std::vector<double> acc(segment_len, 0.0);
    std::size_t segments = 0;
    cvec buf(segment_len);
    for (std::size_t start = 0; start + segment_len <= n; start += hop, ++segments) {
        for (std::size_t i = 0; i < segment_len; ++i) buf[i] = signal.samples[start + i] * window[i];
        detail::fft_inplace(buf, false);
        for (std::size_t k = 0; k < segment_len; ++k) acc[k] += std::norm(buf[k]);
    }

    const double fs = signal.sample_rate_hz;
    const double bin = fs / static_cast<double>(segment_len);
    Psd out;
    out.bin_hz = bin;
    out.rbw_hz = bin * static_cast<double>(segment_len) * wpow /
                 std::pow(std::accumulate(window.begin(), window.end(), 0.0), 2.0);
    out.freqs_hz.resize(segment_len);
    out.power_db.resize(segment_len);
    const double scale = 1.0 / (fs * wpow * static_cast<double>(segments));
    const std::size_t half = segment_len / 2;
    for (std::size_t i = 0; i < segment_len; ++i) {
        const std::size_t k = (i + half) % segment_len;  // shift so -fs/2 comes first
        out.freqs_hz[i] = detail::bin_frequency(k, segment_len, fs);
        out.power_db[i] = 10.0 * std::log10(std::max(acc[k] * scale, 1e-300));
    }
    return out;
}

SlopeFit slope_diagnostic(const Psd& p, const FrequencyBand& band) {
    if (p.freqs_hz.size() != p.power_db.size()) throw std::invalid_argument("slope_diagnostic: malformed PSD");
    if (!(band.low_hz > 0.0) || !(band.high_hz > band.low_hz))
        throw std::invalid_argument("slope_diagnostic: band must exclude DC and be non-empty");
    const double fmax = std::max(std::abs(p.freqs_hz.front()), std::abs(p.freqs_hz.back()));
    if (band.high_hz > fmax) throw std::invalid_argument("slope_diagnostic: band outside the PSD support");

    std::vector<double> f, a;
    for (std::size_t i = 0; i < p.freqs_hz.size(); ++i) {
        const double af = std::abs(p.freqs_hz[i]);
        if (af < band.low_hz || af > band.high_hz) continue;
        f.push_back(af);
        a.push_back(std::pow(10.0, p.power_db[i] / 20.0));
    }
    if (f.size() < 4) throw std::invalid_argument("slope_diagnostic: too few bins in band");

    auto linfit = [](const std::vector<double>& xs, const std::vector<double>& ys) {
        const double n = static_cast<double>(xs.size());
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
        double sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
            syy += (ys[i] - my) * (ys[i] - my);
        }
        const double m = sxy / sxx;
        const double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
        return std::array<double, 3>{m, my - m * mx, r2};
    };

    SlopeFit out;
    out.bins = f.size();
    const auto lin = linfit(f, a);
    out.amplitude_slope = lin[0];
    out.amplitude_intercept = lin[1];
    out.r2 = lin[2];

    std::vector<double> lf(f.size()), la(a.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        lf[i] = std::log10(f[i]);
        la[i] = 20.0 * std::log10(a[i]);
    }
    out.slope_db_per_decade = linfit(lf, la)[0];
    return out;
}

}  // namespace fdsic
