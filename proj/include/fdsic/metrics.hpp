#pragma once

#include "fdsic/signal.hpp"

#include <string>
#include <vector>

namespace fdsic {

/// Two-sided power spectral density, frequencies ascending from -fs/2.
struct Psd {
    std::vector<double> freqs_hz;
    std::vector<double> power_db;  ///< 10 log10(power per Hz)
    double rbw_hz = 0.0;           ///< equivalent noise bandwidth of one bin
    double bin_hz = 0.0;
};

/// Cancellation ceiling reported when the residual is exactly zero.
inline constexpr double kMaxCancellationDb = 200.0;

/// 10 log10(P_before / P_after), capped at 200 dB.
double cancellation_db(const BasebandSignal& before, const BasebandSignal& after);
double cancellation_db(double power_before, double power_after);

double to_db(double linear);

/// Hann-windowed Welch average. segment_len must be a power of two no longer than the
/// signal; overlap is in samples. Scaled so that sum(PSD) * bin_hz equals the mean power.
Psd psd(const BasebandSignal& signal, std::size_t segment_len, std::size_t overlap);

struct FrequencyBand {
    double low_hz = 0.0;   ///< inclusive, on |f|
    double high_hz = 0.0;  ///< inclusive, on |f|
};

struct SlopeFit {
    double r2 = 0.0;                   ///< of amplitude = m |f| + b
    double slope_db_per_decade = 0.0;  ///< log-log slope of amplitude, times 20
    double amplitude_slope = 0.0;      ///< m
    double amplitude_intercept = 0.0;  ///< b
    std::size_t bins = 0;
};

/// Linear fit of PSD amplitude against |f| over bins with low <= |f| <= high (DC excluded).
SlopeFit slope_diagnostic(const Psd& p, const FrequencyBand& band);

/// Per-stage powers of one simulated run. Powers are relative to 1 mW, i.e. dBm when the
/// transmit gain is expressed in mW.
struct CancellationReport {
    double tx_power_db = 0.0;
    double rf_residual_db = 0.0;
    double digital_residual_db = 0.0;
    double rf_cancellation_db = 0.0;
    double digital_cancellation_db = 0.0;
    double total_db = 0.0;
    double signal_power_E_s = 0.0;      ///< E|x|^2 of the transmitted baseband
    double derivative_power_E_d = 0.0;  ///< E|x'(t)|^2, 1/s^2
};

}  // namespace fdsic
