#pragma once

#include "fdsic/channel.hpp"
#include "fdsic/signal.hpp"

#include <span>
#include <utility>
#include <vector>

namespace fdsic {

inline constexpr int kMaxTaylorOrder = 4;

/// Linearized channel H(f) ~ sum_n C_n (-j2pi f)^n with
/// C_n = sum_k a_k tau_k^n / n! e^{-j2pi f_c tau_k}. The 1/n! lives inside C_n, so
/// reconstruct() multiplies plain time derivatives. sqrt(G_t) is not included.
struct TaylorChannel {
    std::vector<cplx> coeffs;
    int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

TaylorChannel taylor_coeffs(const MultipathChannel& channel, int order);

/// Exact derivatives of the periodic band-limited interpolant of x (multiplication by
/// (j2pi f)^n in frequency). Element i holds the (i+1)-th derivative, in units of 1/s^(i+1).
std::vector<BasebandSignal> analytic_derivatives(const BasebandSignal& x, int max_order);

/// sum_n (-1)^n C_n x^(n)(t), with derivatives[i] the (i+1)-th derivative of x.
BasebandSignal reconstruct(const TaylorChannel& tc, const BasebandSignal& x,
                           std::span<const BasebandSignal> derivatives);

/// Per-tap first-order remainder bound 0.075 a^2 (tau/T)^4 for a unit-power signal. The
/// constant only holds for sinc pulses g(t/T) = sin(t/T)/(t/T); see oracle.hpp.
double lemma_bound(const ChannelTap& tap, double symbol_T);

/// Leading constant of the second-order remainder budget. Upper estimate calibrated
/// against the exact-delay oracle (measured ~1/252 for unit-power sinc signals).
inline constexpr double kSecondOrderBudgetConstant = 0.005;
inline constexpr double kFirstOrderBudgetConstant = 0.075;

struct ErrorBudget {
    std::vector<double> per_tap_bound;
    double total_bound = 0.0;
    int order = 1;
    bool sinc_only = true;
};

/// Time scale T' of the pulse sin(t/T')/(t/T') with two-sided bandwidth W, i.e. 1/(pi W).
/// The remainder constants above are stated for that pulse; a waveform sampled with
/// symbol period 1/W has to be measured on this scale to be comparable.
double lemma_time_scale(double bandwidth_hz);

/// Order 1: sum of lemma_bound. Order 2: kSecondOrderBudgetConstant * sum a^2 (tau/T)^6.
ErrorBudget total_error_budget(const MultipathChannel& channel, double symbol_T, int order);

/// (round-trip distance, 10 log10(l(d) (d / cT)^4)): the first-order error contribution of a
/// reflector whose round-trip path is d, since a^2 = l(d) and tau = d/c.
std::vector<std::pair<double, double>> distance_error_curve(const PathLossModel& model, double symbol_T,
                                                            std::span<const double> distances_m);

}  // namespace fdsic
