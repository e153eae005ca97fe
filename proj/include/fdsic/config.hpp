#pragma once

#include "fdsic/channel.hpp"
#include "fdsic/digital_canceller.hpp"
#include "fdsic/rf_canceller.hpp"
#include "fdsic/signal.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdsic {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ChannelPreset { default_channel, circulator_only, custom };

/// Channel as written in a config file: either a preset or explicit taps/reflectors.
struct ChannelConfig {
    ChannelPreset preset = ChannelPreset::default_channel;
    double carrier_hz = 2.395e9;
    double tx_power_dbm = 4.0;
    std::vector<ChannelTap> taps;     ///< explicit taps (gain_db, delay_ns in the file)
    std::vector<double> reflectors_m; ///< one-way distances
    PathLossModel path_loss = default_path_loss();

    /// Tap list with tx_gain in mW.
    MultipathChannel build() const;
};

struct ImpairmentConfig {
    std::optional<double> noise_dbm;  ///< empty = noiseless
    int adc_bits = 0;
    double sample_offset = 0.0;  ///< fraction of one sample period, [0, 1)

    ReceiverImpairments build(double sample_rate_hz) const;
};

struct DigitalConfig {
    int order = 2;
    std::size_t train_len = 4096;
    FilterBank filters{};
};

struct ExperimentConfig {
    SignalSpec signal{};
    ChannelConfig channel{};
    ImpairmentConfig impairments{};
    RfStageConfig rf{};
    DigitalConfig digital{};
    std::string output_dir = "out";
    std::size_t psd_segment = 1024;
    std::uint64_t seed = 1;  ///< receiver noise seed; the waveform seed lives in [signal]

    void validate() const;
};

/// Parses the flat `[section]` / `key = value` format; '#' starts a comment.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Renders a config in the same format parse_config() accepts.
std::string format_config(const ExperimentConfig& cfg);

}  // namespace fdsic
