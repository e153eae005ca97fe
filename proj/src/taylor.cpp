#include "fdsic/taylor.hpp"

#include "fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fdsic {

using std::numbers::pi;

TaylorChannel taylor_coeffs(const MultipathChannel& channel, int order) {
    if (order < 0 || order > kMaxTaylorOrder) throw std::invalid_argument("taylor order must be in [0, 4]");
    TaylorChannel tc;
    tc.coeffs.assign(static_cast<std::size_t>(order) + 1, cplx{});
    for (const auto& t : channel.taps) {
        const double cycles = channel.carrier_hz * t.delay_s;
        const cplx phase = std::polar(1.0, -2.0 * pi * (cycles - std::floor(cycles)));
        double term = t.gain;  // a tau^n / n!
        for (int n = 0; n <= order; ++n) {
            tc.coeffs[n] += term * phase;
            term *= t.delay_s / static_cast<double>(n + 1);
        }
    }
    return tc;
}

std::vector<BasebandSignal> analytic_derivatives(const BasebandSignal& x, int max_order) {
    if (max_order < 0) throw std::invalid_argument("derivative order must be >= 0");
    std::vector<BasebandSignal> out;
    if (max_order == 0) return out;
    cvec spec(x.samples);
    const std::size_t n = spec.size();
    detail::fft_inplace(spec, false);
    for (int order = 1; order <= max_order; ++order) {
        cvec buf(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double f = detail::bin_frequency(k, n, x.sample_rate_hz);
            buf[k] = spec[k] * std::pow(cplx{0.0, 2.0 * pi * f}, order);
        }
        detail::fft_inplace(buf, true);
        for (auto& v : buf) v /= static_cast<double>(n);
        out.emplace_back(std::move(buf), x.sample_rate_hz);
    }
    return out;
}

BasebandSignal reconstruct(const TaylorChannel& tc, const BasebandSignal& x,
                           std::span<const BasebandSignal> derivatives) {
    if (tc.coeffs.empty()) throw std::invalid_argument("empty Taylor channel");
    const int order = tc.order();
    if (static_cast<int>(derivatives.size()) < order)
        throw std::invalid_argument("reconstruct: fewer derivatives than the Taylor order");
    for (int i = 0; i < order; ++i)
        if (derivatives[i].size() != x.size()) throw std::invalid_argument("derivative length mismatch");
    cvec y(x.size());
    for (std::size_t m = 0; m < x.size(); ++m) {
        cplx acc = tc.coeffs[0] * x.samples[m];
        double sign = -1.0;
        for (int n = 1; n <= order; ++n, sign = -sign) acc += sign * tc.coeffs[n] * derivatives[n - 1].samples[m];
        y[m] = acc;
    }
    return {std::move(y), x.sample_rate_hz};
}

double lemma_bound(const ChannelTap& tap, double symbol_T) {
    if (!(symbol_T > 0.0)) throw std::invalid_argument("symbol duration must be positive");
    const double r = tap.delay_s / symbol_T;
    return kFirstOrderBudgetConstant * tap.gain * tap.gain * r * r * r * r;
}

double lemma_time_scale(double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    return 1.0 / (std::numbers::pi * bandwidth_hz);
}

ErrorBudget total_error_budget(const MultipathChannel& channel, double symbol_T, int order) {
    if (order != 1 && order != 2) throw std::invalid_argument("error budget supports order 1 or 2");
    if (!(symbol_T > 0.0)) throw std::invalid_argument("symbol duration must be positive");
    ErrorBudget b;
    b.order = order;
    for (const auto& t : channel.taps) {
        double v = 0.0;
        if (order == 1) {
            v = lemma_bound(t, symbol_T);
        } else {
            const double r = t.delay_s / symbol_T;
            v = kSecondOrderBudgetConstant * t.gain * t.gain * std::pow(r, 6);
        }
        b.per_tap_bound.push_back(v);
        b.total_bound += v;
    }
    return b;
}

std::vector<std::pair<double, double>> distance_error_curve(const PathLossModel& model, double symbol_T,
                                                            std::span<const double> distances_m) {
    if (!(symbol_T > 0.0)) throw std::invalid_argument("symbol duration must be positive");
    std::vector<std::pair<double, double>> out;
    const double cT = kSpeedOfLight * symbol_T;
    for (double d : distances_m) {
        if (!(d > 0.0)) throw std::invalid_argument("distance must be positive");
        const double r = d / cT;
        out.emplace_back(d, 10.0 * std::log10(path_loss(model, d) * r * r * r * r));
    }
    return out;
}

}  // namespace fdsic
