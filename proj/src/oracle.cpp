#include "fdsic/oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace fdsic::oracle {

using std::numbers::pi;

std::vector<std::complex<double>> taylor_reference(const MultipathChannel& channel, int order) {
    std::vector<std::complex<double>> out;
    for (int n = 0; n <= order; ++n) {
        long double re = 0.0L, im = 0.0L;
        for (const auto& t : channel.taps) {
            long double mag = t.gain;
            for (int i = 1; i <= n; ++i) mag *= static_cast<long double>(t.delay_s) / i;
            const long double ph = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(channel.carrier_hz) *
                                   static_cast<long double>(t.delay_s);
            re += mag * std::cos(ph);
            im += mag * std::sin(ph);
        }
        out.emplace_back(static_cast<double>(re), static_cast<double>(im));
    }
    return out;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

namespace {

constexpr int kQuadNodes = 32;

struct Quadrature {
    std::vector<double> x, w;
    Quadrature() { gauss_legendre(kQuadNodes, x, w); }
};

const Quadrature& quad() {
    static const Quadrature q;
    return q;
}

// sin(u)/u and its first two derivatives.
std::array<double, 3> angular_sinc(double u) {
    if (std::abs(u) < 0.5) {
        // h = sum (-1)^k u^{2k} / (2k+1)!
        double h = 0.0, h1 = 0.0, h2 = 0.0;
        double fact = 1.0;  // (2k+1)!
        double sign = 1.0;
        for (int k = 0; k < 14; ++k) {
            if (k > 0) fact *= (2.0 * k) * (2.0 * k + 1.0);
            const double c = sign / fact;
            h += c * std::pow(u, 2 * k);
            if (k >= 1) h1 += c * 2.0 * k * std::pow(u, 2 * k - 1);
            if (k >= 1) h2 += c * 2.0 * k * (2.0 * k - 1.0) * std::pow(u, 2 * k - 2);
            sign = -sign;
        }
        return {h, h1, h2};
    }
    const double s = std::sin(u), c = std::cos(u);
    const double g = s / u;
    const double g1 = (c - g) / u;
    const double g2 = (-s - 2.0 * g1) / u;
    return {g, g1, g2};
}

// Root-raised-cosine spectrum amplitude, f in units of 1/T.
double rrc_spectrum(double beta, double f) {
    const double af = std::abs(f);
    const double a = 0.5 * (1.0 - beta), b = 0.5 * (1.0 + beta);
    if (af <= a) return 1.0;
    if (af > b) return 0.0;
    return std::cos(pi / (2.0 * beta) * (af - a));
}

// g^{(n)}(u) = 2 int_0^b G(f) (2 pi f)^n trig(2 pi f u) df, split at the rolloff knee.
std::array<double, 3> rrc_by_quadrature(double beta, double u) {
    const double a = 0.5 * (1.0 - beta), b = 0.5 * (1.0 + beta);
    std::array<double, 3> out{0.0, 0.0, 0.0};
    auto piece = [&](double lo, double hi) {
        if (hi <= lo) return;
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (int i = 0; i < kQuadNodes; ++i) {
            const double f = mid + half * quad().x[i];
            const double w = half * quad().w[i] * 2.0 * rrc_spectrum(beta, f);
            const double om = 2.0 * pi * f;
            out[0] += w * std::cos(om * u);
            out[1] -= w * om * std::sin(om * u);
            out[2] -= w * om * om * std::cos(om * u);
        }
    };
    piece(0.0, a);
    piece(a, b);
    return out;
}

std::array<double, 3> rrc_closed_form(double beta, double u) {
    const double p1 = pi * (1.0 - beta), p2 = pi * (1.0 + beta);
    const double num = std::sin(p1 * u) + 4.0 * beta * u * std::cos(p2 * u);
    const double num1 = p1 * std::cos(p1 * u) + 4.0 * beta * std::cos(p2 * u) - 4.0 * beta * u * p2 * std::sin(p2 * u);
    const double num2 = -p1 * p1 * std::sin(p1 * u) - 8.0 * beta * p2 * std::sin(p2 * u) -
                        4.0 * beta * u * p2 * p2 * std::cos(p2 * u);
    const double b2 = 16.0 * beta * beta;
    const double den = pi * u * (1.0 - b2 * u * u);
    const double den1 = pi * (1.0 - 3.0 * b2 * u * u);
    const double den2 = -6.0 * pi * b2 * u;
    const double g = num / den;
    const double g1 = (num1 - g * den1) / den;
    const double g2 = (num2 - 2.0 * g1 * den1 - g * den2) / den;
    return {g, g1, g2};
}

}  // namespace

std::array<double, 3> pulse_derivatives(PulseShape pulse, double rolloff, SincConvention sinc, double u) {
    if (pulse == PulseShape::sinc || rolloff <= 0.0) {
        if (sinc == SincConvention::angular) return angular_sinc(u);
        const auto h = angular_sinc(pi * u);
        return {h[0], pi * h[1], pi * pi * h[2]};
    }
    const double edge = 1.0 / (4.0 * rolloff);
    if (std::abs(u) < 1e-3 || std::abs(std::abs(u) - edge) < 1e-3) return rrc_by_quadrature(rolloff, u);
    return rrc_closed_form(rolloff, u);
}

DelayOracleResult exact_delay_oracle(const SignalSpec& spec, double tau_over_T, int trials, SincConvention sinc) {
    if (trials < 1) throw std::invalid_argument("oracle needs at least one trial");
    constexpr int kSpan = 256;  // symbols each side of the evaluation instant
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = tau_over_T;
    const double rs = 1.0 / std::sqrt(2.0);

    double px = 0.0, pe = 0.0, pd = 0.0, pe2 = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const double t = unit(rng);
        cplx x{}, xd{}, xdd{}, xdel{};
        for (int n = -kSpan; n <= kSpan; ++n) {
            cplx s;
            if (spec.constellation == Constellation::qpsk4) {
                const auto bits = rng() >> 62;
                s = {(bits & 1u) ? rs : -rs, (bits & 2u) ? rs : -rs};
            } else {
                const auto bits = rng() >> 60;
                s = cplx{2.0 * static_cast<double>(bits & 3u) - 3.0, 2.0 * static_cast<double>((bits >> 2) & 3u) - 3.0} /
                    std::sqrt(10.0);
            }
            const auto g = pulse_derivatives(spec.pulse, spec.rolloff, sinc, t - n);
            const auto gd = pulse_derivatives(spec.pulse, spec.rolloff, sinc, t - r - n);
            x += s * g[0];
            xd += s * g[1];
            xdd += s * g[2];
            xdel += s * gd[0];
        }
        const cplx e1 = xdel - x + r * xd;
        const cplx e2 = e1 - 0.5 * r * r * xdd;
        px += std::norm(x);
        pe += std::norm(e1);
        pd += std::norm(r * xd);
        pe2 += std::norm(e2);
    }
    DelayOracleResult out;
    out.trials = trials;
    out.raw_signal_power = px / trials;
    out.err_power = pe / px;
    out.deriv_power = pd / px;
    out.second_err_power = pe2 / px;
    return out;
}

double lemma_kernel(double x) {
    const double h2 = angular_sinc(x)[2];
    if (std::abs(x) < 0.5) return h2 * h2;
    const double s = std::sin(x), c = std::cos(x);
    const double v = 2.0 * s / (x * x * x) - s / x - 2.0 * c / (x * x);
    return v * v;
}

double lemma_kernel_expanded(double x) {
    if (x == 0.0) return 1.0 / 9.0;
    const double v = ((2.0 - x * x) * std::sin(x) - 2.0 * x * std::cos(x)) / (x * x * x);
    return v * v;
}

double lemma_kernel_integral() {
    constexpr int kPeriods = 4000;  // quarter-period panels of pi/2, out to 2000 pi
    const double step = pi / 2.0;
    double acc = 0.0;
    for (int k = 0; k < kPeriods; ++k) {
        const double lo = k * step, half = 0.5 * step, mid = lo + half;
        for (int i = 0; i < kQuadNodes; ++i) acc += half * quad().w[i] * lemma_kernel(mid + half * quad().x[i]);
    }
    const double far = kPeriods * step;
    return 2.0 * (acc + 0.5 / far);
}

double poisson_closed_form(double delta_over_T) {
    const double root = std::sqrt(pi / 2.0);
    return root / 5.0 + 2.0 / 60.0 * root * std::cos(2.0 * pi * delta_over_T);
}

PoissonCheck poisson_check(double delta_over_T) {
    constexpr long kTerms = 100000;
    double acc = 0.0;
    for (long n = -kTerms; n <= kTerms; ++n) acc += lemma_kernel(delta_over_T - static_cast<double>(n));
    // Beyond |n| = N, f averages 1/(2 x^2); midpoint-rule sum of both tails.
    const double N = static_cast<double>(kTerms);
    acc += 0.5 / (N + 0.5 - delta_over_T) + 0.5 / (N + 0.5 + delta_over_T);
    PoissonCheck out;
    out.delta_over_T = delta_over_T;
    out.direct_sum = acc;
    out.closed_form = poisson_closed_form(delta_over_T);
    out.abs_error = std::abs(out.direct_sum - out.closed_form);
    out.matches = out.abs_error <= 1e-6;
    return out;
}

BasebandSignal resample_delay_reference(const BasebandSignal& signal, double delay_s) {
    constexpr long kFine = 64;
    const long n = static_cast<long>(signal.size());
    if (n == 0) return signal;
    const double fine = delay_s * signal.sample_rate_hz * kFine;
    const double fine_r = std::round(fine);
    if (std::abs(fine - fine_r) > 1e-6) throw std::invalid_argument("delay is not on the 64x fine grid");
    const long m = static_cast<long>(fine_r);

    cvec out(static_cast<std::size_t>(n), cplx{});
    if (m % kFine == 0) {
        const long shift = m / kFine;
        for (long i = 0; i < n; ++i) out[i] = signal.samples[static_cast<std::size_t>((((i - shift) % n) + n) % n)];
        return {std::move(out), signal.sample_rate_hz};
    }
    // Periodic interpolation kernel of the N-point band [-N/2, N/2): for lag d the sample
    // weight is (1/N) sum_k e^{j2pi k u / N} with u = d - m/64.
    const double nd = static_cast<double>(n);
    cvec kernel(static_cast<std::size_t>(n));
    for (long d = 0; d < n; ++d) {
        const double u = static_cast<double>(d) - static_cast<double>(m) / kFine;
        const double num = std::sin(pi * u);
        const double den = nd * std::sin(pi * u / nd);
        if (n % 2 == 0)
            kernel[d] = std::polar(num / den, -pi * u / nd);
        else
            kernel[d] = num / den;
    }
    for (long i = 0; i < n; ++i) {
        cplx acc{};
        for (long k = 0; k < n; ++k) {
            long d = i - k;
            if (d < 0) d += n;
            acc += signal.samples[k] * kernel[d];
        }
        out[i] = acc;
    }
    return {std::move(out), signal.sample_rate_hz};
}

}  // namespace fdsic::oracle
