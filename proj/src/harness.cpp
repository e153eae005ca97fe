#include "fdsic/harness.hpp"

#include "fdsic/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace fdsic {

namespace fs = std::filesystem;

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

BasebandSignal slice(const BasebandSignal& s, std::size_t first, std::size_t count) {
    return {cvec(s.samples.begin() + static_cast<long>(first), s.samples.begin() + static_cast<long>(first + count)),
            s.sample_rate_hz};
}

std::string fmt_db(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string fmt_hz(double v) {
    char buf[64];
    if (v == std::round(v) && std::abs(v) < 1e15) std::snprintf(buf, sizeof buf, "%.0f", v);
    else std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

double power_of(const BasebandSignal& s, std::size_t first, std::size_t count) {
    return mean_power(s.view().subspan(first, count));
}

}  // namespace

FrequencyBand diagnostic_band(const SignalSpec& spec, double bin_hz) {
    double edge = 0.0;
    if (spec.kind == WaveformKind::ofdm) {
        const double spacing = spec.bandwidth_hz / spec.ofdm_fft_size;
        edge = 0.9 * spacing * (spec.ofdm_used_carriers / 2);
    } else {
        const double beta = spec.pulse == PulseShape::rrc ? spec.rolloff : 0.0;
        edge = 0.9 * 0.5 * (1.0 - beta) * spec.bandwidth_hz;
    }
    return {2.0 * bin_hz, edge};
}

SimulationResult simulate(const ExperimentConfig& cfg) {
    stage("config", [&] {
        cfg.validate();
        return 0;
    });
    SimulationResult out;

    const BasebandSignal x = stage("generate", [&] { return generate(cfg.signal); });
    const double fs = x.sample_rate_hz;

    const MultipathChannel channel = stage("channel", [&] {
        auto ch = cfg.channel.build();
        ch.check_narrowband(cfg.signal.bandwidth_hz);
        return ch;
    });
    const BasebandSignal si = stage("channel", [&] { return apply_channel(channel, x); });

    const RfStageResult rf = stage("rf", [&] { return rf_stage(x, si, channel.tx_gain, cfg.rf); });
    out.tune = rf.report;

    const BasebandSignal y = stage("receiver", [&] {
        return impair(rf.residual, cfg.impairments.build(fs), cfg.seed);
    });

    // The digital stage sees the transmitted baseband scaled like the SI.
    const BasebandSignal xt = x.scaled(std::sqrt(channel.tx_gain));
    const FilterBank& filters = cfg.digital.filters;
    const std::size_t guard = filters.guard();
    const std::size_t n = x.size();
    const std::size_t train = cfg.digital.train_len;

    stage("digital", [&] {
        if (cfg.signal.oversampling < 4) throw std::invalid_argument("derivative filters need oversampling >= 4");
        if (n < train + 2 * guard + kMinTrainingSamples)
            throw std::invalid_argument("frame too short for the training window plus an evaluation window");
        return 0;
    });
    out.eval_first = guard + train;
    out.eval_count = n - guard - out.eval_first;

    struct Fitted {
        LsEstimate est;
        double residual = 0.0;
    };
    auto fit_eval = [&](int order) {
        return stage("digital", [&] {
            Fitted f;
            f.est = order == 0 ? ls_fit_signal_only(y, xt, guard, train) : ls_fit(y, xt, order, filters, guard, train);
            f.residual = power_of(cancel(y, xt, f.est, filters), out.eval_first, out.eval_count);
            return f;
        });
    };

    const double tx_power = power_of(xt, out.eval_first, out.eval_count);
    const double rf_power = power_of(y, out.eval_first, out.eval_count);
    const Fitted f0 = fit_eval(0);
    const Fitted f1 = fit_eval(1);
    const Fitted f2 = cfg.digital.order == 2 ? fit_eval(2) : f1;
    const Fitted& chosen = cfg.digital.order == 2 ? f2 : f1;
    out.estimate = chosen.est;

    out.split.signal_db = cancellation_db(rf_power, f0.residual);
    out.split.order1_db = cancellation_db(rf_power, f1.residual);
    out.split.order2_db = cancellation_db(rf_power, f2.residual);

    auto& r = out.report;
    r.tx_power_db = to_db(tx_power);
    r.rf_residual_db = to_db(rf_power);
    r.digital_residual_db = to_db(chosen.residual);
    r.rf_cancellation_db = cancellation_db(tx_power, rf_power);
    r.digital_cancellation_db = cancellation_db(rf_power, chosen.residual);
    r.total_db = r.rf_cancellation_db + r.digital_cancellation_db;
    r.signal_power_E_s = x.mean_power;
    r.derivative_power_E_d = analytic_derivatives(x, 1).front().mean_power;

    stage("metrics", [&] {
        const BasebandSignal pre_w = slice(si, out.eval_first, out.eval_count);
        const BasebandSignal rf_w = slice(y, out.eval_first, out.eval_count);
        const BasebandSignal dig_w = slice(cancel(y, xt, chosen.est, filters), out.eval_first, out.eval_count);
        const std::size_t seg = cfg.psd_segment;
        out.pre = psd(pre_w, seg, seg / 2);
        out.rf = psd(rf_w, seg, seg / 2);
        out.digital = psd(dig_w, seg, seg / 2);
        out.rf_slope_r2 = slope_diagnostic(out.rf, diagnostic_band(cfg.signal, out.rf.bin_hz)).r2;
        out.budget = total_error_budget(channel, lemma_time_scale(cfg.signal.bandwidth_hz), cfg.digital.order);
        out.budget_db = to_db(channel.tx_gain * x.mean_power * out.budget.total_bound);
        return 0;
    });
    return out;
}

void write_atomic(const fs::path& file, const std::string& content) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    fs::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
        if (!o) throw std::runtime_error("cannot write " + tmp.string());
        o << content;
        if (!o.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, file);
}

std::string format_psd_csv(const Psd& p) {
    std::string s = "freq_hz,power_db\n";
    for (std::size_t i = 0; i < p.freqs_hz.size(); ++i) s += fmt_hz(p.freqs_hz[i]) + "," + fmt_db(p.power_db[i]) + "\n";
    return s;
}

void write_psd_csv(const Psd& p, const fs::path& file) { write_atomic(file, format_psd_csv(p)); }

std::string format_report(const SimulationResult& res) {
    const auto& r = res.report;
    const auto& e = res.estimate;
    std::ostringstream o;
    o << "tx_power_db=" << fmt_db(r.tx_power_db) << "\n"
      << "rf_residual_db=" << fmt_db(r.rf_residual_db) << "\n"
      << "digital_residual_db=" << fmt_db(r.digital_residual_db) << "\n"
      << "rf_cancellation_db=" << fmt_db(r.rf_cancellation_db) << "\n"
      << "digital_cancellation_db=" << fmt_db(r.digital_cancellation_db) << "\n"
      << "total_db=" << fmt_db(r.total_db) << "\n"
      << "signal_power_E_s=" << fmt_num(r.signal_power_E_s) << "\n"
      << "derivative_power_E_d=" << fmt_num(r.derivative_power_E_d) << "\n"
      << "digital_signal_only_db=" << fmt_db(res.split.signal_db) << "\n"
      << "digital_order1_db=" << fmt_db(res.split.order1_db) << "\n"
      << "digital_order2_db=" << fmt_db(res.split.order2_db) << "\n"
      << "ls_order=" << e.order << "\n"
      << "a0_re=" << fmt_num(e.a0.real()) << "\n"
      << "a0_im=" << fmt_num(e.a0.imag()) << "\n"
      << "c1_re=" << fmt_num(e.c1.real()) << "\n"
      << "c1_im=" << fmt_num(e.c1.imag()) << "\n";
    if (e.c2) o << "c2_re=" << fmt_num(e.c2->real()) << "\n" << "c2_im=" << fmt_num(e.c2->imag()) << "\n";
    o << "ls_train_residual_db=" << fmt_db(e.residual_power_db) << "\n"
      << "gram_condition=" << fmt_num(e.gram_condition) << "\n"
      << "vm_g1=" << fmt_num(res.tune.state.g1) << "\n"
      << "vm_g2=" << fmt_num(res.tune.state.g2) << "\n"
      << "tune_probes=" << res.tune.iterations << "\n"
      << "tune_converged=" << (res.tune.converged ? 1 : 0) << "\n"
      << "rf_slope_r2=" << fmt_num(res.rf_slope_r2) << "\n"
      << "error_budget_db=" << fmt_db(res.budget_db) << "\n"
      << "eval_first=" << res.eval_first << "\n"
      << "eval_count=" << res.eval_count << "\n";
    return o.str();
}

void write_outputs(const SimulationResult& res, const fs::path& dir) {
    write_atomic(dir / "report.txt", format_report(res));
    write_psd_csv(res.pre, dir / "pre.csv");
    write_psd_csv(res.rf, dir / "rf.csv");
    write_psd_csv(res.digital, dir / "digital.csv");
    std::string t = "iteration,g1,g2,detector_db\n";
    for (const auto& s : res.tune.trace)
        t += std::to_string(s.iteration) + "," + fmt_num(s.state.g1) + "," + fmt_num(s.state.g2) + "," +
             fmt_db(to_db(s.reading)) + "\n";
    write_atomic(dir / "tune.csv", t);
}

CancellationReport run_simulate(const ExperimentConfig& cfg) {
    const auto res = simulate(cfg);
    write_outputs(res, cfg.output_dir);
    return res.report;
}

std::vector<BandwidthRow> run_sweep_bandwidth(const ExperimentConfig& cfg, const std::vector<double>& bws) {
    if (bws.empty()) throw std::invalid_argument("empty bandwidth list");
    std::vector<BandwidthRow> rows;
    for (double bw : bws) {
        ExperimentConfig c = cfg;
        c.signal.bandwidth_hz = bw;
        const auto r = simulate(c).report;
        rows.push_back({bw, r.rf_cancellation_db, r.digital_cancellation_db, r.total_db});
    }
    return rows;
}

std::string format_bandwidth_csv(const std::vector<BandwidthRow>& rows) {
    std::string s = "bandwidth_hz,rf_db,digital_db,total_db\n";
    for (const auto& r : rows)
        s += fmt_hz(r.bandwidth_hz) + "," + fmt_db(r.rf_db) + "," + fmt_db(r.digital_db) + "," + fmt_db(r.total_db) + "\n";
    return s;
}

std::vector<PowerRow> run_sweep_power(const ExperimentConfig& cfg, const std::vector<double>& powers) {
    if (powers.empty()) throw std::invalid_argument("empty power list");
    std::vector<PowerRow> rows;
    for (double p : powers) {
        ExperimentConfig c = cfg;
        c.channel.tx_power_dbm = p;
        const auto res = simulate(c);
        rows.push_back({p, res.report.rf_cancellation_db, res.report.digital_cancellation_db, res.report.total_db,
                        res.split});
    }
    return rows;
}

std::string format_power_csv(const std::vector<PowerRow>& rows) {
    std::string s = "tx_power_dbm,rf_db,digital_db,total_db,signal_db,deriv1_db,deriv2_db\n";
    for (const auto& r : rows)
        s += fmt_db(r.tx_power_dbm) + "," + fmt_db(r.rf_db) + "," + fmt_db(r.digital_db) + "," + fmt_db(r.total_db) +
             "," + fmt_db(r.split.signal_db) + "," + fmt_db(r.split.order1_db - r.split.signal_db) + "," +
             fmt_db(r.split.order2_db - r.split.order1_db) + "\n";
    return s;
}

bool Verdict::pass() const {
    if (checks.empty()) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string Verdict::format() const {
    std::ostringstream o;
    o << "suite=" << suite << "\n";
    for (const auto& c : checks)
        o << c.name << ".value=" << fmt_num(c.value) << "\n"
          << c.name << ".limit=" << fmt_num(c.limit) << "\n"
          << c.name << ".pass=" << (c.pass ? "true" : "false") << "\n";
    o << "pass=" << (pass() ? "true" : "false") << "\n";
    return o.str();
}

namespace {

Verdict verify_lemma() {
    Verdict v{"lemma", {}};
    SignalSpec spec;
    spec.kind = WaveformKind::single_carrier;
    spec.pulse = PulseShape::sinc;
    std::vector<double> lx, ly;
    for (double r : kLemmaGrid) {
        const auto res = oracle::exact_delay_oracle(spec, r, kOracleTrials);
        const double bound = kFirstOrderBudgetConstant * std::pow(r, 4);
        v.checks.push_back({"err_power_" + fmt_num(r), res.err_power, bound, res.err_power <= bound});
        const double b2 = kSecondOrderBudgetConstant * std::pow(r, 6);
        v.checks.push_back({"second_err_power_" + fmt_num(r), res.second_err_power, b2, res.second_err_power <= b2});
        lx.push_back(std::log10(r));
        ly.push_back(std::log10(res.err_power));
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / n, my += ly[i] / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) sxx += (lx[i] - mx) * (lx[i] - mx), sxy += (lx[i] - mx) * (ly[i] - my);
    const double slope = sxy / sxx;
    v.checks.push_back({"loglog_slope", slope, 4.0, std::abs(slope - 4.0) <= 0.2});
    return v;
}

Verdict verify_filters() {
    Verdict v{"filters", {}};
    std::vector<double> grid;
    for (int i = 1; i <= 3000; ++i) grid.push_back(0.3 * i / 3000.0);
    const auto d9 = filter_response(DerivativeFilter::make(DerivativeKind::d1_9tap), grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const cplx ideal(0.0, 2.0 * std::numbers::pi * grid[i]);
        worst = std::max(worst, std::abs(d9[i] - ideal) / std::abs(ideal));
    }
    v.checks.push_back({"d1_9tap_max_rel_dev", worst, 0.02, worst <= 0.02});
    std::vector<double> full;
    for (int i = 0; i <= 500; ++i) full.push_back(0.5 * i / 500.0);
    const auto d3 = filter_response(DerivativeFilter::make(DerivativeKind::d1_3tap), full);
    double err3 = 0.0;
    for (std::size_t i = 0; i < full.size(); ++i)
        err3 = std::max(err3, std::abs(d3[i] - cplx(0.0, 2.0 * std::sin(2.0 * std::numbers::pi * full[i]))));
    v.checks.push_back({"d1_3tap_abs_dev", err3, 1e-12, err3 <= 1e-12});
    return v;
}

Verdict verify_oracle_delay() {
    Verdict v{"oracle-delay", {}};
    SignalSpec spec;
    spec.num_symbols = 2;
    spec.ofdm_fft_size = 256;
    spec.ofdm_used_carriers = 150;
    double worst = -400.0;
    std::mt19937_64 rng(7);
    for (int frame = 0; frame < 10; ++frame) {
        spec.seed = 100 + frame;
        const auto x = generate(spec);
        const int fine = 1 + static_cast<int>(rng() % 63);
        const double d = fine / (64.0 * x.sample_rate_hz);
        const auto a = fractional_delay(x, d);
        const auto b = oracle::resample_delay_reference(x, d);
        cvec diff(a.size());
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a.samples[i] - b.samples[i];
        worst = std::max(worst, to_db(mean_power(diff) / x.mean_power));
    }
    v.checks.push_back({"fractional_delay_residual_db", worst, -100.0, worst <= -100.0});
    SignalSpec sinc;
    sinc.kind = WaveformKind::single_carrier;
    sinc.pulse = PulseShape::sinc;
    const auto zero = oracle::exact_delay_oracle(sinc, 0.0, 1000);
    v.checks.push_back({"zero_delay_err_power", zero.err_power, 1e-20, zero.err_power <= 1e-20});
    const auto r = oracle::exact_delay_oracle(sinc, 0.01, kOracleTrials);
    const double ratio = r.deriv_power / r.err_power;
    v.checks.push_back({"deriv_to_err_ratio_0.01", ratio, 100.0, ratio >= 100.0});
    return v;
}

Verdict verify_poisson() {
    Verdict v{"poisson", {}};
    const double target = 0.2 * std::sqrt(std::numbers::pi / 2.0);
    const double integral = oracle::lemma_kernel_integral();
    v.checks.push_back({"kernel_integral", integral, target, std::abs(integral - target) <= 1e-6});
    double worst = 0.0, sup = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto c = oracle::poisson_check(i / 100.0);
        worst = std::max(worst, c.abs_error);
        sup = std::max(sup, c.direct_sum);
    }
    v.checks.push_back({"closed_form_max_abs_error", worst, 1e-6, worst <= 1e-6});
    v.checks.push_back({"supremum", sup, 0.3, sup <= 0.3});
    return v;
}

}  // namespace

Verdict run_verify(const std::string& suite) {
    if (suite == "lemma") return verify_lemma();
    if (suite == "filters") return verify_filters();
    if (suite == "oracle-delay") return verify_oracle_delay();
    if (suite == "poisson") return verify_poisson();
    throw std::invalid_argument("unknown verify suite '" + suite + "'");
}

}  // namespace fdsic
