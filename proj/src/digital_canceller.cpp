#include "fdsic/digital_canceller.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace fdsic {

using std::numbers::pi;

DerivativeFilter DerivativeFilter::make(DerivativeKind kind) {
    switch (kind) {
        case DerivativeKind::d1_3tap:
            return {kind, {-1, 0, 1}, 1};
        case DerivativeKind::d1_9tap:
            return {kind, {3, -32, 168, -672, 0, 672, -168, 32, -3}, 840};
        case DerivativeKind::d2_9tap:
            return {kind, {1, 4, 4, -4, 10, -4, 4, 4, 1}, 64};
    }
    throw std::invalid_argument("unknown derivative filter");
}

std::vector<double> DerivativeFilter::taps() const {
    std::vector<double> t(length());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = tap(k);
    return t;
}

BasebandSignal deriv_filter(const BasebandSignal& x, const DerivativeFilter& f) {
    const std::size_t n = x.size();
    const std::size_t len = f.length();
    if (n <= len) throw std::invalid_argument("deriv_filter: input shorter than the filter");
    const auto c = static_cast<long>(f.centre());
    const auto taps = f.taps();
    cvec y(n, cplx{});
    for (long i = 0; i < static_cast<long>(n); ++i) {
        cplx acc{};
        for (long k = 0; k < static_cast<long>(len); ++k) {
            const long j = i + k - c;
            if (j < 0 || j >= static_cast<long>(n) || taps[k] == 0.0) continue;
            acc += taps[k] * x.samples[j];
        }
        y[i] = acc;
    }
    return {std::move(y), x.sample_rate_hz};
}

std::vector<cplx> filter_response(const DerivativeFilter& f, std::span<const double> normalized_freqs) {
    std::vector<cplx> out;
    out.reserve(normalized_freqs.size());
    const auto c = static_cast<double>(f.centre());
    for (double nu : normalized_freqs) {
        if (nu < 0.0 || nu > 0.5) throw std::invalid_argument("normalized frequency must lie in [0, 0.5]");
        cplx acc{};
        for (std::size_t k = 0; k < f.length(); ++k)
            acc += static_cast<double>(f.numerators[k]) * std::polar(1.0, 2.0 * pi * nu * (static_cast<double>(k) - c));
        out.push_back(acc / static_cast<double>(f.denominator));
    }
    return out;
}

namespace {

template <std::size_t N>
using Mat = std::array<std::array<cplx, N>, N>;

// Eigenvalues of a Hermitian matrix of size 1..3, closed form.
template <std::size_t N>
std::array<double, N> hermitian_eigenvalues(const Mat<N>& a) {
    if constexpr (N == 1) {
        return {a[0][0].real()};
    } else if constexpr (N == 2) {
        const double p = a[0][0].real(), q = a[1][1].real();
        const double mid = 0.5 * (p + q);
        const double rad = std::sqrt(0.25 * (p - q) * (p - q) + std::norm(a[0][1]));
        return {mid - rad, mid + rad};
    } else {
        // Characteristic polynomial l^3 - c2 l^2 + c1 l - c0 with real coefficients.
        const double a00 = a[0][0].real(), a11 = a[1][1].real(), a22 = a[2][2].real();
        const double tr = a00 + a11 + a22;
        const double minors = a00 * a11 + a00 * a22 + a11 * a22 - std::norm(a[0][1]) - std::norm(a[0][2]) -
                              std::norm(a[1][2]);
        const double det = (a00 * a11 * a22 + 2.0 * (a[0][1] * a[1][2] * a[2][0]).real() -
                            a00 * std::norm(a[1][2]) - a11 * std::norm(a[0][2]) - a22 * std::norm(a[0][1]));
        // Depressed cubic via l = t + tr/3.
        const double m = tr / 3.0;
        const double p = minors - tr * tr / 3.0;
        const double q = -2.0 * m * m * m + m * minors - det;  // t^3 + p t + q = 0
        if (p >= 0.0) return {m, m, m};
        const double r = std::sqrt(-p / 3.0);
        double arg = std::clamp(-q / (2.0 * r * r * r), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        std::array<double, 3> ev{m + 2.0 * r * std::cos(phi), m + 2.0 * r * std::cos(phi - 2.0 * pi / 3.0),
                                 m + 2.0 * r * std::cos(phi - 4.0 * pi / 3.0)};
        std::sort(ev.begin(), ev.end());
        return ev;
    }
}

template <std::size_t N>
cplx det(const Mat<N>& a) {
    if constexpr (N == 1) {
        return a[0][0];
    } else if constexpr (N == 2) {
        return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    } else {
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    }
}

// Cramer's rule on the normal equations.
template <std::size_t N>
std::array<cplx, N> solve(const Mat<N>& a, const std::array<cplx, N>& b) {
    const cplx d = det(a);
    std::array<cplx, N> out{};
    for (std::size_t col = 0; col < N; ++col) {
        Mat<N> m = a;
        for (std::size_t r = 0; r < N; ++r) m[r][col] = b[r];
        out[col] = det(m) / d;
    }
    return out;
}

struct Regressors {
    BasebandSignal d1;
    BasebandSignal d2;
};

template <std::size_t N>
LsEstimate fit_columns(const BasebandSignal& y, const std::array<const cvec*, N>& cols,
                       const std::array<double, N>& signs, std::size_t first, std::size_t count) {
    Mat<N> gram{};
    std::array<cplx, N> rhs{};
    double ypow = 0.0;
    for (std::size_t n = first; n < first + count; ++n) {
        std::array<cplx, N> r;
        for (std::size_t i = 0; i < N; ++i) r[i] = signs[i] * (*cols[i])[n];
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = i; j < N; ++j) gram[i][j] += std::conj(r[i]) * r[j];
            rhs[i] += std::conj(r[i]) * y.samples[n];
        }
        ypow += std::norm(y.samples[n]);
    }
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < i; ++j) gram[i][j] = std::conj(gram[j][i]);

    const auto ev = hermitian_eigenvalues<N>(gram);
    const double cond = ev[0] > 0.0 ? ev[N - 1] / ev[0] : INFINITY;
    if (!(ev[N - 1] > 0.0) || !(cond <= kMaxGramCondition))
        throw IllConditionedError("ls_fit: Gram matrix is singular or ill-conditioned", cond);
    const auto coef = solve<N>(gram, rhs);

    double res = 0.0;
    for (std::size_t n = first; n < first + count; ++n) {
        cplx e = y.samples[n];
        for (std::size_t i = 0; i < N; ++i) e -= coef[i] * signs[i] * (*cols[i])[n];
        res += std::norm(e);
    }
    LsEstimate est;
    est.a0 = coef[0];
    if constexpr (N >= 2) est.c1 = coef[1];
    if constexpr (N >= 3) est.c2 = coef[2];
    est.order = static_cast<int>(N) - 1;
    est.gram_condition = cond;
    est.residual_power_db = ypow > 0.0 ? 10.0 * std::log10(std::max(res, 1e-300) / ypow) : -INFINITY;
    return est;
}

void check_fit_inputs(const BasebandSignal& y, const BasebandSignal& x, std::size_t first, std::size_t count) {
    if (y.size() != x.size()) throw std::invalid_argument("ls_fit: y and x lengths differ");
    if (count < kMinTrainingSamples) throw std::invalid_argument("ls_fit: need at least 100 training samples");
    if (first + count > x.size()) throw std::invalid_argument("ls_fit: window exceeds the signal");
    if (mean_power(x.view().subspan(first, count)) <= 0.0) throw std::invalid_argument("ls_fit: x has zero power");
}

}  // namespace

LsEstimate ls_fit(const BasebandSignal& y, const BasebandSignal& x, int order, const FilterBank& filters,
                  std::size_t first, std::size_t count) {
    if (order != 1 && order != 2) throw std::invalid_argument("ls_fit: order must be 1 or 2");
    check_fit_inputs(y, x, first, count);
    const auto d1 = deriv_filter(x, filters.first);
    if (order == 1) {
        return fit_columns<2>(y, {&x.samples, &d1.samples}, {1.0, -1.0}, first, count);
    }
    const auto d2 = deriv_filter(x, filters.second);
    return fit_columns<3>(y, {&x.samples, &d1.samples, &d2.samples}, {1.0, -1.0, 1.0}, first, count);
}

LsEstimate ls_fit(const BasebandSignal& y, const BasebandSignal& x, int order, const FilterBank& filters) {
    const std::size_t g = filters.guard();
    if (x.size() <= 2 * g) throw std::invalid_argument("ls_fit: signal shorter than the filter guards");
    return ls_fit(y, x, order, filters, g, x.size() - 2 * g);
}

LsEstimate ls_fit_signal_only(const BasebandSignal& y, const BasebandSignal& x, std::size_t first, std::size_t count) {
    check_fit_inputs(y, x, first, count);
    auto est = fit_columns<1>(y, {&x.samples}, {1.0}, first, count);
    est.order = 0;
    return est;
}

BasebandSignal reconstruct_si(const BasebandSignal& x, const LsEstimate& est, const FilterBank& filters) {
    cvec out(x.size());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = est.a0 * x.samples[n];
    if (est.order >= 1 && est.c1 != cplx{}) {
        const auto d1 = deriv_filter(x, filters.first);
        for (std::size_t n = 0; n < out.size(); ++n) out[n] -= est.c1 * d1.samples[n];
    }
    if (est.order >= 2 && est.c2 && *est.c2 != cplx{}) {
        const auto d2 = deriv_filter(x, filters.second);
        for (std::size_t n = 0; n < out.size(); ++n) out[n] += *est.c2 * d2.samples[n];
    }
    return {std::move(out), x.sample_rate_hz};
}

BasebandSignal cancel(const BasebandSignal& y, const BasebandSignal& x, const LsEstimate& est,
                      const FilterBank& filters) {
    if (y.size() != x.size()) throw std::invalid_argument("cancel: y and x lengths differ");
    const auto si = reconstruct_si(x, est, filters);
    cvec out(y.size());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = y.samples[n] - si.samples[n];
    return {std::move(out), y.sample_rate_hz};
}

ComplexityCounts complexity(long long n, long long filter_len, long long tapline_taps) {
    if (n <= 0 || filter_len <= 0 || tapline_taps <= 0) throw std::invalid_argument("complexity: positive sizes only");
    return {4 * n + 8, (2 * filter_len + 4) * n + 8, 2 * tapline_taps * n + 2 * tapline_taps * tapline_taps};
}

}  // namespace fdsic
