#include "fdsic/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fdsic;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("fdsic_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("default scenario") {
    ExperimentConfig cfg;
    const auto res = simulate(cfg);
    const auto& r = res.report;
    CHECK(r.total_db >= 70.0);
    CHECK(r.rf_cancellation_db >= 50.0);
    CHECK(r.tx_power_db == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(std::abs(r.tx_power_db - r.rf_cancellation_db - r.digital_cancellation_db - r.digital_residual_db) <= 0.01);
    CHECK(r.total_db == doctest::Approx(r.rf_cancellation_db + r.digital_cancellation_db));
    CHECK(r.rf_residual_db <= r.tx_power_db);
    CHECK(r.digital_residual_db <= r.tx_power_db);
    CHECK(r.signal_power_E_s == doctest::Approx(1.0));
    CHECK(r.derivative_power_E_d > 0.0);
    CHECK(res.split.order2_db >= res.split.order1_db);
    CHECK(res.split.order1_db >= res.split.signal_db);
    CHECK(res.estimate.c2.has_value());
    CHECK(res.rf_slope_r2 >= 0.9);
    CHECK(r.digital_residual_db <= res.budget_db + 3.0);
}

TEST_CASE("single carrier scenario") {
    ExperimentConfig cfg;
    cfg.signal.kind = WaveformKind::single_carrier;
    cfg.signal.bandwidth_hz = 10e6;
    cfg.signal.num_symbols = 20000;
    const auto res = simulate(cfg);
    CHECK(res.report.rf_cancellation_db >= 55.0);
    CHECK(res.rf_slope_r2 >= 0.9);
}

TEST_CASE("noise-dominated receiver leaves nothing for the digital stage") {
    ExperimentConfig cfg;
    cfg.impairments.noise_dbm = -20.0;
    const auto r = simulate(cfg).report;
    CHECK(std::abs(r.digital_cancellation_db) <= 3.0);
    CHECK(std::abs(r.tx_power_db - r.rf_cancellation_db - r.digital_cancellation_db - r.digital_residual_db) <= 0.01);
}

TEST_CASE("impaired receiver still accounts exactly") {
    ExperimentConfig cfg;
    cfg.impairments.noise_dbm = -100.0;
    cfg.impairments.adc_bits = 14;
    cfg.impairments.sample_offset = 0.3;
    const auto r = simulate(cfg).report;
    CHECK(std::abs(r.tx_power_db - r.rf_cancellation_db - r.digital_cancellation_db - r.digital_residual_db) <= 0.01);
    CHECK(r.digital_cancellation_db > 10.0);
}

TEST_CASE("stage errors carry the stage name") {
    ExperimentConfig cfg;
    cfg.signal.oversampling = 2;
    try {
        simulate(cfg);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage == "digital");
    }
    cfg = ExperimentConfig{};
    cfg.channel.carrier_hz = 100e6;
    try {
        simulate(cfg);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage == "channel");
    }
    cfg = ExperimentConfig{};
    cfg.signal.ofdm_used_carriers = 5000;
    CHECK_THROWS_AS(simulate(cfg), StageError);
}

TEST_CASE("outputs are written and repeatable") {
    ExperimentConfig cfg;
    const auto a = scratch("a"), b = scratch("b");
    cfg.output_dir = a.string();
    run_simulate(cfg);
    cfg.output_dir = b.string();
    run_simulate(cfg);
    for (const char* f : {"report.txt", "pre.csv", "rf.csv", "digital.csv", "tune.csv"}) {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK_FALSE(fs::exists(a / (std::string(f) + ".tmp")));
    }
    const auto rf = slurp(a / "rf.csv");
    CHECK(rf.rfind("freq_hz,power_db\n-40000000,", 0) == 0);
    CHECK(slurp(a / "tune.csv").rfind("iteration,g1,g2,detector_db\n1,", 0) == 0);
    const auto report = slurp(a / "report.txt");
    CHECK(report.find("total_db=") != std::string::npos);
    CHECK(report.find("c2_re=") != std::string::npos);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("bandwidth sweep") {
    ExperimentConfig cfg;
    const std::vector<double> bws = {5e6, 10e6, 15e6, 20e6};
    const auto full = run_sweep_bandwidth(cfg, bws);
    cfg.channel.preset = ChannelPreset::circulator_only;
    const auto circ = run_sweep_bandwidth(cfg, bws);
    REQUIRE(full.size() == 4);
    for (std::size_t i = 0; i < full.size(); ++i) {
        if (i > 0) CHECK(full[i].rf_db < full[i - 1].rf_db);
        CHECK(circ[i].rf_db >= full[i].rf_db);
    }
    const auto one = run_sweep_bandwidth(ExperimentConfig{}, {20e6});
    REQUIRE(one.size() == 1);
    const auto r = simulate(ExperimentConfig{}).report;
    CHECK(one[0].rf_db == r.rf_cancellation_db);
    CHECK(one[0].total_db == r.total_db);
    CHECK(format_bandwidth_csv(one).rfind("bandwidth_hz,rf_db,digital_db,total_db\n20000000,", 0) == 0);
    CHECK_THROWS(run_sweep_bandwidth(cfg, {}));
}

TEST_CASE("power sweep") {
    ExperimentConfig cfg;
    cfg.impairments.noise_dbm = -90.0;
    std::vector<double> p;
    for (int d = -10; d <= 19; d += 3) p.push_back(d);
    const auto rows = run_sweep_power(cfg, p);
    double lo = 1e9, hi = -1e9;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        lo = std::min(lo, rows[i].rf_db);
        hi = std::max(hi, rows[i].rf_db);
        if (i > 0) CHECK(rows[i].digital_db > rows[i - 1].digital_db);
        CHECK(rows[i].split.order2_db >= rows[i].split.order1_db);
    }
    CHECK(hi - lo <= 2.0);
    CHECK(format_power_csv(rows).rfind("tx_power_dbm,rf_db,digital_db,total_db,signal_db,deriv1_db,deriv2_db\n", 0) == 0);
}

TEST_CASE("verify suites") {
    const auto f = run_verify("filters");
    CHECK(f.checks.size() == 2);
    CHECK(f.checks[1].pass);  // three-tap identity
    CHECK_FALSE(f.checks[0].pass);  // nine-tap deviation at 0.3 cycles/sample is 9.5%
    CHECK(f.format().find("pass=false") != std::string::npos);

    const auto p = run_verify("poisson");
    CHECK_FALSE(p.pass());

    CHECK_THROWS(run_verify("nope"));
}

TEST_CASE("diagnostic band") {
    SignalSpec s;
    const auto b = diagnostic_band(s, 78125.0);
    CHECK(b.low_hz == 156250.0);
    CHECK(b.high_hz == doctest::Approx(0.9 * 310 * 20e6 / 1024));
    s.kind = WaveformKind::single_carrier;
    s.bandwidth_hz = 10e6;
    CHECK(diagnostic_band(s, 1.0).high_hz == doctest::Approx(0.9 * 0.35 * 10e6));
}
