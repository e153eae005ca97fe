#include "fdsic/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fdsic {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
    if (pos != v.size() || !std::isfinite(d)) throw ConfigError(key + ": not a number: '" + v + "'");
    return d;
}

long long to_int(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ConfigError(key + ": not an integer: '" + v + "'");
    return static_cast<long long>(d);
}

std::pair<double, double> to_pair(const std::string& key, const std::string& v) {
    const auto comma = v.find(',');
    if (comma == std::string::npos) throw ConfigError(key + ": expected two comma-separated values");
    return {to_double(key, trim(v.substr(0, comma))), to_double(key, trim(v.substr(comma + 1)))};
}

DerivativeKind to_kind(const std::string& key, const std::string& v) {
    if (v == "d1_3tap") return DerivativeKind::d1_3tap;
    if (v == "d1_9tap") return DerivativeKind::d1_9tap;
    if (v == "d2_9tap") return DerivativeKind::d2_9tap;
    throw ConfigError(key + ": unknown filter '" + v + "'");
}

const char* kind_name(DerivativeKind k) {
    switch (k) {
        case DerivativeKind::d1_3tap: return "d1_3tap";
        case DerivativeKind::d1_9tap: return "d1_9tap";
        case DerivativeKind::d2_9tap: return "d2_9tap";
    }
    return "?";
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"signal.kind",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "ofdm") c.signal.kind = WaveformKind::ofdm;
             else if (v == "single_carrier" || v == "single-carrier") c.signal.kind = WaveformKind::single_carrier;
             else throw ConfigError(k + ": unknown waveform '" + v + "'");
         }},
        {"signal.bandwidth_hz",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.signal.bandwidth_hz = to_double(k, v); }},
        {"signal.oversampling",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.signal.oversampling = static_cast<int>(to_int(k, v));
         }},
        {"signal.num_symbols",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.signal.num_symbols = static_cast<int>(to_int(k, v));
         }},
        {"signal.constellation",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "qpsk" || v == "qpsk4") c.signal.constellation = Constellation::qpsk4;
             else if (v == "qam16" || v == "16qam") c.signal.constellation = Constellation::qam16;
             else throw ConfigError(k + ": unknown constellation '" + v + "'");
         }},
        {"signal.pulse",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "sinc") c.signal.pulse = PulseShape::sinc;
             else if (v == "rrc") c.signal.pulse = PulseShape::rrc;
             else throw ConfigError(k + ": unknown pulse '" + v + "'");
         }},
        {"signal.rolloff",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.signal.rolloff = to_double(k, v); }},
        {"signal.fft_size",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.signal.ofdm_fft_size = static_cast<int>(to_int(k, v));
         }},
        {"signal.used_carriers",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.signal.ofdm_used_carriers = static_cast<int>(to_int(k, v));
         }},
        {"signal.seed",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.signal.seed = static_cast<std::uint64_t>(to_int(k, v));
         }},
        {"channel.carrier_hz",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.channel.carrier_hz = to_double(k, v); }},
        {"channel.tx_power_dbm",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.channel.tx_power_dbm = to_double(k, v); }},
        {"channel.preset",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "default") c.channel.preset = ChannelPreset::default_channel;
             else if (v == "circulator-only" || v == "circulator_only") c.channel.preset = ChannelPreset::circulator_only;
             else if (v == "custom") c.channel.preset = ChannelPreset::custom;
             else throw ConfigError(k + ": unknown preset '" + v + "'");
         }},
        {"channel.tap",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             const auto [gain_db, delay_ns] = to_pair(k, v);
             c.channel.taps.push_back({std::pow(10.0, gain_db / 20.0), delay_ns * 1e-9});
         }},
        {"channel.reflector",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.channel.reflectors_m.push_back(to_double(k, v));
         }},
        {"channel.path_loss_k",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.channel.path_loss.k_const = to_double(k, v); }},
        {"channel.path_loss_alpha",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.channel.path_loss.alpha = to_double(k, v); }},
        {"channel.path_loss_cap",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.channel.path_loss.cap_delta = to_double(k, v);
         }},
        {"impairments.noise_dbm",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "off") c.impairments.noise_dbm.reset();
             else c.impairments.noise_dbm = to_double(k, v);
         }},
        {"impairments.adc_bits",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.impairments.adc_bits = static_cast<int>(to_int(k, v));
         }},
        {"impairments.sample_offset",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.impairments.sample_offset = to_double(k, v);
         }},
        {"impairments.seed",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.seed = static_cast<std::uint64_t>(to_int(k, v));
         }},
        {"rf.vm_bits",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.rf.vm_bits = static_cast<int>(to_int(k, v)); }},
        {"rf.detector_window",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.rf.detector.window_samples = static_cast<int>(to_int(k, v));
         }},
        {"rf.budget",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.rf.budget = static_cast<int>(to_int(k, v)); }},
        {"digital.order",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.digital.order = static_cast<int>(to_int(k, v));
         }},
        {"digital.train_len",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             const auto n = to_int(k, v);
             if (n < 0) throw ConfigError(k + ": must be positive");
             c.digital.train_len = static_cast<std::size_t>(n);
         }},
        {"digital.first_filter",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.digital.filters.first = DerivativeFilter::make(to_kind(k, v));
         }},
        {"digital.second_filter",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.digital.filters.second = DerivativeFilter::make(to_kind(k, v));
         }},
        {"output.dir", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
        {"output.psd_segment",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             const auto n = to_int(k, v);
             if (n <= 0) throw ConfigError(k + ": must be positive");
             c.psd_segment = static_cast<std::size_t>(n);
         }},
    };
    return table;
}

}  // namespace

MultipathChannel ChannelConfig::build() const {
    MultipathChannel ch;
    switch (preset) {
        case ChannelPreset::default_channel:
            ch = default_channel(carrier_hz);
            break;
        case ChannelPreset::circulator_only:
            ch = circulator_only_channel(carrier_hz);
            break;
        case ChannelPreset::custom:
            ch = taps_from_geometry(reflectors_m, path_loss, carrier_hz, taps);
            break;
    }
    ch.tx_gain = std::pow(10.0, tx_power_dbm / 10.0);
    ch.validate();
    return ch;
}

ReceiverImpairments ImpairmentConfig::build(double sample_rate_hz) const {
    ReceiverImpairments imp;
    imp.noise_power = noise_dbm ? std::pow(10.0, *noise_dbm / 10.0) : 0.0;
    imp.adc_bits = adc_bits;
    imp.sample_offset_s = sample_offset / sample_rate_hz;
    imp.validate(sample_rate_hz);
    return imp;
}

void ExperimentConfig::validate() const {
    if (!(signal.bandwidth_hz > 0.0)) throw ConfigError("signal.bandwidth_hz must be positive");
    if (signal.oversampling < 1) throw ConfigError("signal.oversampling must be positive");
    if (signal.num_symbols < 1) throw ConfigError("signal.num_symbols must be positive");
    if (channel.preset != ChannelPreset::custom && (!channel.taps.empty() || !channel.reflectors_m.empty()))
        throw ConfigError("channel: tap/reflector entries need preset = custom");
    if (channel.preset == ChannelPreset::custom && channel.taps.empty() && channel.reflectors_m.empty())
        throw ConfigError("channel: custom preset without taps or reflectors");
    if (!(impairments.sample_offset >= 0.0 && impairments.sample_offset < 1.0))
        throw ConfigError("impairments.sample_offset must be in [0, 1)");
    if (rf.vm_bits < 1 || rf.vm_bits > 24) throw ConfigError("rf.vm_bits must be in [1, 24]");
    if (rf.detector.window_samples < 1) throw ConfigError("rf.detector_window must be positive");
    if (rf.budget < 1) throw ConfigError("rf.budget must be positive");
    if (digital.order != 1 && digital.order != 2) throw ConfigError("digital.order must be 1 or 2");
    if (digital.train_len < kMinTrainingSamples) throw ConfigError("digital.train_len below minimum");
    if (psd_segment == 0 || (psd_segment & (psd_segment - 1)) != 0)
        throw ConfigError("output.psd_segment must be a power of two");
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = section + "." + trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

namespace {

// Shortest text that parses back to the same double.
struct Num {
    double v;
};

std::ostream& operator<<(std::ostream& o, Num n) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, n.v);
    return o << std::string_view(buf, static_cast<std::size_t>(r.ptr - buf));
}

}  // namespace

std::string format_config(const ExperimentConfig& cfg) {
    std::ostringstream o;
    const auto& s = cfg.signal;
    o << "[signal]\n"
      << "kind = " << (s.kind == WaveformKind::ofdm ? "ofdm" : "single_carrier") << "\n"
      << "bandwidth_hz = " << Num{s.bandwidth_hz} << "\n"
      << "oversampling = " << s.oversampling << "\n"
      << "num_symbols = " << s.num_symbols << "\n"
      << "constellation = " << (s.constellation == Constellation::qpsk4 ? "qpsk" : "qam16") << "\n"
      << "pulse = " << (s.pulse == PulseShape::sinc ? "sinc" : "rrc") << "\n"
      << "rolloff = " << Num{s.rolloff} << "\n"
      << "fft_size = " << s.ofdm_fft_size << "\n"
      << "used_carriers = " << s.ofdm_used_carriers << "\n"
      << "seed = " << s.seed << "\n\n";
    const auto& c = cfg.channel;
    o << "[channel]\n"
      << "carrier_hz = " << Num{c.carrier_hz} << "\n"
      << "tx_power_dbm = " << Num{c.tx_power_dbm} << "\n"
      << "preset = "
      << (c.preset == ChannelPreset::default_channel   ? "default"
          : c.preset == ChannelPreset::circulator_only ? "circulator-only"
                                                       : "custom")
      << "\n";
    for (const auto& t : c.taps) o << "tap = " << Num{20.0 * std::log10(t.gain)} << ", " << Num{t.delay_s * 1e9} << "\n";
    for (double d : c.reflectors_m) o << "reflector = " << Num{d} << "\n";
    o << "path_loss_k = " << Num{c.path_loss.k_const} << "\n"
      << "path_loss_alpha = " << Num{c.path_loss.alpha} << "\n"
      << "path_loss_cap = " << Num{c.path_loss.cap_delta} << "\n\n";
    o << "[impairments]\n";
    if (cfg.impairments.noise_dbm) o << "noise_dbm = " << Num{*cfg.impairments.noise_dbm} << "\n";
    else o << "noise_dbm = off\n";
    o << "adc_bits = " << cfg.impairments.adc_bits << "\n"
      << "sample_offset = " << Num{cfg.impairments.sample_offset} << "\n"
      << "seed = " << cfg.seed << "\n\n";
    o << "[rf]\n"
      << "vm_bits = " << cfg.rf.vm_bits << "\n"
      << "detector_window = " << cfg.rf.detector.window_samples << "\n"
      << "budget = " << cfg.rf.budget << "\n\n";
    o << "[digital]\n"
      << "order = " << cfg.digital.order << "\n"
      << "train_len = " << cfg.digital.train_len << "\n"
      << "first_filter = " << kind_name(cfg.digital.filters.first.kind) << "\n"
      << "second_filter = " << kind_name(cfg.digital.filters.second.kind) << "\n\n";
    o << "[output]\n"
      << "dir = " << cfg.output_dir << "\n"
      << "psd_segment = " << cfg.psd_segment << "\n";
    return o.str();
}

}  // namespace fdsic
