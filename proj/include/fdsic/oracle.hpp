#pragma once

// Brute-force references. Nothing here reuses the FFT, FIR or delay code it is used to check.

#include "fdsic/channel.hpp"
#include "fdsic/signal.hpp"

#include <array>
#include <cstdint>

namespace fdsic::oracle {

/// Time scaling of the sinc pulse. `angular` is g(u) = sin(u)/u, the kernel whose squared
/// second derivative is lemma_kernel(); `normalized` is sin(pi u)/(pi u), the band-limited
/// pulse the waveform generator uses (two-sided bandwidth exactly 1/T).
enum class SincConvention { angular, normalized };

/// Pulse value and first two derivatives at u (u and derivatives in symbol durations),
/// evaluated from closed forms. For rrc, points close to the removable singularities are
/// evaluated by Gauss-Legendre quadrature of the spectrum instead.
std::array<double, 3> pulse_derivatives(PulseShape pulse, double rolloff, SincConvention sinc, double u);

struct DelayOracleResult {
    double err_power = 0.0;         ///< E|x(t-tau) - x(t) + tau x'(t)|^2
    double deriv_power = 0.0;       ///< E|tau x'(t)|^2
    double second_err_power = 0.0;  ///< E|x(t-tau) - x(t) + tau x' - tau^2/2 x''|^2
    double raw_signal_power = 0.0;  ///< E|x|^2 before normalization (unit symbols)
    int trials = 0;
};

/// Monte Carlo over `trials` random instants in [0, T) with fresh symbols each trial.
/// Powers are normalized to E|x(t)|^2 = 1.
DelayOracleResult exact_delay_oracle(const SignalSpec& spec, double tau_over_T, int trials,
                                     SincConvention sinc = SincConvention::angular);

/// f(x) = (2 sin x / x^3 - sin x / x - 2 cos x / x^2)^2, the squared second derivative of
/// sin(x)/x. f(0) = 1/9 from the series h''(0) = -1/3.
double lemma_kernel(double x);
/// Same function written as (((2 - x^2) sin x - 2 x cos x) / x^3)^2.
double lemma_kernel_expanded(double x);

/// Integral of lemma_kernel over the real line: Gauss-Legendre per half period out to
/// 2000 pi plus the 1/(2X) tail.
double lemma_kernel_integral();

/// Closed form the Poisson-summation argument claims for sum_n f(d - n):
/// (1/5) sqrt(pi/2) + (2/60) sqrt(pi/2) cos(2 pi d).
double poisson_closed_form(double delta_over_T);

struct PoissonCheck {
    double delta_over_T = 0.0;
    double direct_sum = 0.0;
    double closed_form = 0.0;
    double abs_error = 0.0;
    bool matches = false;  ///< abs_error <= 1e-6
};

/// Direct summation of f(d - n) over |n| <= 100000 plus the analytic 1/N tail.
PoissonCheck poisson_check(double delta_over_T);

/// Time-domain periodic sinc interpolation (the 64x zero-stuffed resampler evaluated at one
/// phase). delay_s must sit on the 64x grid of the sample clock.
BasebandSignal resample_delay_reference(const BasebandSignal& signal, double delay_s);

/// C_n = sum_k a_k tau_k^n / n! e^{-j2pi f_c tau_k}, re-summed in long double with the
/// carrier phase taken straight from f_c tau (no reduction).
std::vector<std::complex<double>> taylor_reference(const MultipathChannel& channel, int order);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace fdsic::oracle
