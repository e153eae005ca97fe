#pragma once

#include "fdsic/config.hpp"
#include "fdsic/digital_canceller.hpp"
#include "fdsic/metrics.hpp"
#include "fdsic/rf_canceller.hpp"
#include "fdsic/taylor.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdsic {

/// A module error re-thrown with the pipeline stage it came from.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage_name, const std::string& what)
        : std::runtime_error(stage_name + ": " + what), stage(std::move(stage_name)) {}
    std::string stage;
};

/// Digital cancellation reached by nested fits on the same window.
struct DigitalSplit {
    double signal_db = 0.0;  ///< a0 only
    double order1_db = 0.0;  ///< a0, c1
    double order2_db = 0.0;  ///< a0, c1, c2
};

struct SimulationResult {
    CancellationReport report;
    LsEstimate estimate;
    DigitalSplit split;
    TuneResult tune;
    Psd pre;
    Psd rf;
    Psd digital;
    ErrorBudget budget;  ///< of the configured digital order, in the same dB reference as the report
    double budget_db = 0.0;
    double rf_slope_r2 = 0.0;
    std::size_t eval_first = 0;
    std::size_t eval_count = 0;
};

/// Lowest and highest |f| of the flat part of the transmit spectrum, used for slope fits.
FrequencyBand diagnostic_band(const SignalSpec& spec, double bin_hz);

/// generate -> channel -> RF stage -> receiver -> digital stage -> metrics. Powers are
/// measured on the samples after the training window.
SimulationResult simulate(const ExperimentConfig& cfg);

/// simulate() and write report.txt, pre.csv, rf.csv, digital.csv and tune.csv to cfg.output_dir.
CancellationReport run_simulate(const ExperimentConfig& cfg);

void write_outputs(const SimulationResult& result, const std::filesystem::path& dir);
void write_psd_csv(const Psd& p, const std::filesystem::path& file);
std::string format_report(const SimulationResult& result);
std::string format_psd_csv(const Psd& p);

/// Write to a sibling temporary file, then rename over the target.
void write_atomic(const std::filesystem::path& file, const std::string& content);

struct BandwidthRow {
    double bandwidth_hz = 0.0;
    double rf_db = 0.0;
    double digital_db = 0.0;
    double total_db = 0.0;
};

std::vector<BandwidthRow> run_sweep_bandwidth(const ExperimentConfig& cfg, const std::vector<double>& bandwidths_hz);
std::string format_bandwidth_csv(const std::vector<BandwidthRow>& rows);

struct PowerRow {
    double tx_power_dbm = 0.0;
    double rf_db = 0.0;
    double digital_db = 0.0;
    double total_db = 0.0;
    DigitalSplit split;
};

std::vector<PowerRow> run_sweep_power(const ExperimentConfig& cfg, const std::vector<double>& powers_dbm);
std::string format_power_csv(const std::vector<PowerRow>& rows);

struct Check {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
};

struct Verdict {
    std::string suite;
    std::vector<Check> checks;
    bool pass() const;
    std::string format() const;
};

/// Tau/T grid of the first-order remainder checks.
inline constexpr double kLemmaGrid[] = {0.001, 0.005, 0.01, 0.05, 0.1};
inline constexpr int kOracleTrials = 100000;

/// Suites: lemma, filters, oracle-delay, poisson.
Verdict run_verify(const std::string& suite);

}  // namespace fdsic
