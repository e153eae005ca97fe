#pragma once

#include "fdsic/signal.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

namespace fdsic {

enum class DerivativeKind { d1_3tap, d1_9tap, d2_9tap };

/// Derivative FIR stored as integer numerators over a common denominator, so the published
/// rationals are reproduced exactly. taps[k] weights x[n + k - centre] (correlation order),
/// giving the first-derivative kinds a response of +j2pi f near DC.
struct DerivativeFilter {
    DerivativeKind kind;
    std::vector<int> numerators;
    int denominator = 1;

    static DerivativeFilter make(DerivativeKind kind);
    std::size_t length() const { return numerators.size(); }
    std::size_t centre() const { return numerators.size() / 2; }
    double tap(std::size_t k) const { return static_cast<double>(numerators[k]) / denominator; }
    std::vector<double> taps() const;
};

/// Filters used for the first and (optionally) second derivative columns.
struct FilterBank {
    DerivativeFilter first = DerivativeFilter::make(DerivativeKind::d1_9tap);
    DerivativeFilter second = DerivativeFilter::make(DerivativeKind::d2_9tap);
    /// Samples at each end of a window that filtering edge effects can reach.
    std::size_t guard() const { return std::max(first.centre(), second.centre()); }
};

/// Same-length filtering centred on the middle tap; samples beyond the ends count as zero.
BasebandSignal deriv_filter(const BasebandSignal& x, const DerivativeFilter& f);

/// sum_k taps[k] e^{j2pi f (k - centre)} at each normalized frequency (cycles/sample).
std::vector<cplx> filter_response(const DerivativeFilter& f, std::span<const double> normalized_freqs);

/// Thrown when the normal-equation Gram matrix is singular or too ill-conditioned to trust.
class IllConditionedError : public std::runtime_error {
public:
    IllConditionedError(const std::string& what, double cond) : std::runtime_error(what), condition(cond) {}
    double condition;
};

inline constexpr double kMaxGramCondition = 1e12;
inline constexpr std::size_t kMinTrainingSamples = 100;

/// Least-squares SI model y ~ a0 x - c1 x' + c2 x''.
struct LsEstimate {
    cplx a0{};
    cplx c1{};
    std::optional<cplx> c2;
    double residual_power_db = 0.0;  ///< residual / power of y over the fit window, in dB
    int order = 1;
    double gram_condition = 1.0;
};

/// Fits on samples [first, first + count) after the caller has removed filter edges.
/// Pass first/count explicitly or use the overload that fits the whole span minus guards.
LsEstimate ls_fit(const BasebandSignal& y, const BasebandSignal& x, int order, const FilterBank& filters,
                  std::size_t first, std::size_t count);
/// Fits over the full signals, skipping filters.guard() samples at each end.
LsEstimate ls_fit(const BasebandSignal& y, const BasebandSignal& x, int order, const FilterBank& filters);

/// Signal-only fit (a0 alone); used for the per-term split of the digital cancellation.
LsEstimate ls_fit_signal_only(const BasebandSignal& y, const BasebandSignal& x, std::size_t first, std::size_t count);

/// Reconstructed SI a0 x - c1 x' (+ c2 x'').
BasebandSignal reconstruct_si(const BasebandSignal& x, const LsEstimate& est, const FilterBank& filters);

/// y minus the reconstructed SI.
BasebandSignal cancel(const BasebandSignal& y, const BasebandSignal& x, const LsEstimate& est,
                      const FilterBank& filters);

struct ComplexityCounts {
    long long proposed_ops = 0;          ///< 4N + 8
    long long proposed_with_filter = 0;  ///< (2L + 4)N + 8
    long long tapline_ops = 0;           ///< 2KN + 2K^2
};

ComplexityCounts complexity(long long n, long long filter_len, long long tapline_taps);

}  // namespace fdsic
