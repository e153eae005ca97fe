#pragma once

#include "fdsic/channel.hpp"
#include "fdsic/signal.hpp"

#include <functional>
#include <vector>

namespace fdsic {

/// I/Q vector modulator: complex gain g1 + j g2, each arm on a uniform grid of 2^bits
/// levels spanning [-1, 1].
struct VmState {
    double g1 = 0.0;
    double g2 = 0.0;
    int bits = 16;

    int levels() const { return 1 << bits; }
    double step() const { return 2.0 / (levels() - 1); }
    /// Nearest grid level index of a control value.
    int index_of(double g) const;
    double value_of(int index) const;
    /// Copy with both arms snapped to the grid.
    VmState quantized() const;
    cplx gain() const { return {g1, g2}; }
};

struct DetectorConfig {
    int window_samples = 16384;  ///< integration time nu, in samples
};

struct TuneStep {
    int iteration = 0;  ///< probe count when the step was accepted
    VmState state;
    double reading = 0.0;
};

struct TuneResult {
    VmState state;
    std::vector<double> detector_readings;  ///< initial reading, then one per accepted move
    std::vector<TuneStep> trace;            ///< same points, with the VM state
    int iterations = 0;                     ///< detector probes spent
    bool converged = false;                 ///< step fell below one level before the budget ran out
};

/// (g1 + j g2) applied to the tapped transmit signal, after snapping to the control grid.
BasebandSignal vm_apply(const VmState& state, const BasebandSignal& tapped);

/// Ideal power combiner.
BasebandSignal combine(const BasebandSignal& si, const BasebandSignal& vm_out);

/// True-RMS detector: 2 * mean |r|^2 over the trailing window. The factor 2 is the RF
/// power of a baseband signal with the same envelope.
double power_detect(const BasebandSignal& residual, const DetectorConfig& cfg);

using DetectorProbe = std::function<double(const VmState&)>;

/// Coordinate descent over the VM control grid: alternate axes, try +/- step, halve the
/// step after a sweep with no improvement, stop below one grid level or when `budget`
/// probes are spent. Returns the best state visited.
TuneResult tune(const DetectorProbe& env, const VmState& init, int budget);

struct RfStageConfig {
    int vm_bits = 16;
    DetectorConfig detector{};
    int budget = 2000;
};

struct RfStageResult {
    BasebandSignal residual;
    TuneResult report;
};

/// Tunes the VM against apply_channel(channel, x) using the power detector, then returns
/// the residual over the whole signal under the best state.
RfStageResult rf_stage(const BasebandSignal& x, const MultipathChannel& channel, const RfStageConfig& cfg);

/// Same, with the self-interference already computed.
RfStageResult rf_stage(const BasebandSignal& x, const BasebandSignal& si, double tx_gain, const RfStageConfig& cfg);

}  // namespace fdsic
