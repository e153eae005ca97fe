#include "fdsic/rf_canceller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdsic {

int VmState::index_of(double g) const {
    const double idx = std::round((std::clamp(g, -1.0, 1.0) + 1.0) / step());
    return static_cast<int>(std::clamp(idx, 0.0, static_cast<double>(levels() - 1)));
}

double VmState::value_of(int index) const { return -1.0 + step() * index; }

VmState VmState::quantized() const {
    if (bits < 1 || bits > 24) throw std::invalid_argument("vm bits must be in [1, 24]");
    return {value_of(index_of(g1)), value_of(index_of(g2)), bits};
}

BasebandSignal vm_apply(const VmState& state, const BasebandSignal& tapped) {
    return tapped.scaled(state.quantized().gain());
}

BasebandSignal combine(const BasebandSignal& si, const BasebandSignal& vm_out) {
    if (si.size() != vm_out.size()) throw std::invalid_argument("combine: length mismatch");
    if (si.sample_rate_hz != vm_out.sample_rate_hz) throw std::invalid_argument("combine: sample rate mismatch");
    cvec out(si.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = si.samples[i] + vm_out.samples[i];
    return {std::move(out), si.sample_rate_hz};
}

double power_detect(const BasebandSignal& residual, const DetectorConfig& cfg) {
    if (cfg.window_samples < 1) throw std::invalid_argument("detector window must be positive");
    const auto w = static_cast<std::size_t>(cfg.window_samples);
    if (residual.size() < w) throw std::invalid_argument("residual shorter than detector window");
    return 2.0 * mean_power(residual.view().last(w));
}

TuneResult tune(const DetectorProbe& env, const VmState& init, int budget) {
    if (budget <= 0) throw std::invalid_argument("tune budget must be positive");
    const VmState grid = init.quantized();
    const int top = grid.levels() - 1;
    int idx[2] = {grid.index_of(grid.g1), grid.index_of(grid.g2)};
    auto state_at = [&](int i1, int i2) { return VmState{grid.value_of(i1), grid.value_of(i2), grid.bits}; };

    TuneResult res;
    double best = env(grid);
    res.iterations = 1;
    res.detector_readings.push_back(best);
    res.trace.push_back({1, grid, best});

    int step = std::max(1, grid.levels() / 8);
    while (res.iterations < budget) {
        bool improved = false;
        for (int axis = 0; axis < 2 && res.iterations < budget; ++axis) {
            for (int dir : {+1, -1}) {
                if (res.iterations >= budget) break;
                int trial[2] = {idx[0], idx[1]};
                trial[axis] = std::clamp(trial[axis] + dir * step, 0, top);
                if (trial[axis] == idx[axis]) continue;
                const double reading = env(state_at(trial[0], trial[1]));
                ++res.iterations;
                if (reading < best) {
                    best = reading;
                    idx[0] = trial[0];
                    idx[1] = trial[1];
                    res.detector_readings.push_back(best);
                    res.trace.push_back({res.iterations, state_at(idx[0], idx[1]), best});
                    improved = true;
                    break;  // keep direction search on this axis fresh
                }
            }
        }
        if (!improved) {
            if (step == 1) {
                res.converged = true;
                break;
            }
            step /= 2;
        }
    }
    res.state = state_at(idx[0], idx[1]);
    return res;
}

RfStageResult rf_stage(const BasebandSignal& x, const BasebandSignal& si, double tx_gain, const RfStageConfig& cfg) {
    if (x.size() != si.size()) throw std::invalid_argument("rf_stage: signal and SI length differ");
    const auto w = static_cast<std::size_t>(cfg.detector.window_samples);
    if (x.size() < w) throw std::invalid_argument("rf_stage: signal shorter than detector window");
    // The detector only integrates the trailing window; probe on that slice.
    const BasebandSignal si_win(cvec(si.samples.end() - static_cast<long>(w), si.samples.end()), si.sample_rate_hz);
    const BasebandSignal tap_win = BasebandSignal(cvec(x.samples.end() - static_cast<long>(w), x.samples.end()),
                                                  x.sample_rate_hz)
                                       .scaled(std::sqrt(tx_gain));
    auto env = [&](const VmState& s) { return power_detect(combine(si_win, vm_apply(s, tap_win)), cfg.detector); };
    VmState init;
    init.bits = cfg.vm_bits;
    auto report = tune(env, init, cfg.budget);
    auto residual = combine(si, vm_apply(report.state, x.scaled(std::sqrt(tx_gain))));
    return {std::move(residual), std::move(report)};
}

RfStageResult rf_stage(const BasebandSignal& x, const MultipathChannel& channel, const RfStageConfig& cfg) {
    return rf_stage(x, apply_channel(channel, x), channel.tx_gain, cfg);
}

}  // namespace fdsic
