#include "fdsic/harness.hpp"
#include "fdsic/metrics.hpp"
#include "fdsic/rf_canceller.hpp"
#include "fdsic/taylor.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace fdsic;

namespace {

BasebandSignal noise_like(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    cvec x(n);
    for (auto& v : x) v = {g(rng), g(rng)};
    return {x, 80e6};
}

}  // namespace

TEST_CASE("vector modulator") {
    const auto x = noise_like(4096, 1);
    VmState unit{1.0, 0.0, 16};
    const auto y = vm_apply(unit, x);
    for (std::size_t i = 0; i < x.size(); i += 17) CHECK(std::abs(y.samples[i] - x.samples[i]) <= unit.step() * std::abs(x.samples[i]));

    VmState rot{0.0, 1.0, 16};
    const auto r = vm_apply(rot, x);
    const double eps = rot.step();
    for (std::size_t i = 0; i < x.size(); i += 17)
        CHECK(std::abs(r.samples[i] - cplx(0.0, 1.0) * x.samples[i]) <= eps * std::abs(x.samples[i]));

    VmState q{0.1234567, -0.7654321, 8};
    const auto s = q.quantized();
    CHECK(std::abs(s.g1 - q.g1) <= 0.5 * q.step() + 1e-15);
    CHECK(std::abs(s.g2 - q.g2) <= 0.5 * q.step() + 1e-15);
    CHECK(s.index_of(2.0) == s.levels() - 1);
    CHECK(s.value_of(0) == -1.0);
    CHECK(s.value_of(s.levels() - 1) == doctest::Approx(1.0));
    CHECK_THROWS((VmState{0.0, 0.0, 0}.quantized()));
}

TEST_CASE("vm nulls a single-tap channel") {
    const auto x = noise_like(1 << 15, 2);
    MultipathChannel ch{{{0.3, 0.0}}, 2.395e9, 1.0};
    ch.taps[0].delay_s = 0.0;
    const auto si = apply_channel(ch, x);
    const cplx c0 = taylor_coeffs(ch, 0).coeffs[0];
    VmState s{-c0.real(), -c0.imag(), 16};
    const auto res = combine(si, vm_apply(s, x));
    CHECK(cancellation_db(si, res) >= 60.0);
}

TEST_CASE("combiner") {
    const auto x = noise_like(100000, 3);
    const auto z = noise_like(100000, 4);
    CHECK(combine(x, x.scaled(-1.0)).mean_power == 0.0);
    CHECK(combine(x, x.scaled(0.0)).samples == x.samples);
    const auto sum = combine(x, z.scaled(0.5));
    CHECK(std::abs(10.0 * std::log10(sum.mean_power / (x.mean_power + 0.25 * z.mean_power))) <= 0.5);
    CHECK_THROWS(combine(x, noise_like(10, 1)));
    BasebandSignal other(z.samples, 40e6);
    CHECK_THROWS(combine(x, other));
}

TEST_CASE("power detector") {
    DetectorConfig cfg{4096};
    CHECK(power_detect(BasebandSignal(cvec(8192, 0.0), 80e6), cfg) == 0.0);
    cvec unit(8192);
    for (std::size_t i = 0; i < unit.size(); ++i) unit[i] = std::polar(1.0, 0.01 * i);
    CHECK(power_detect(BasebandSignal(unit, 80e6), cfg) == doctest::Approx(2.0));
    CHECK_THROWS(power_detect(BasebandSignal(cvec(100, 1.0), 80e6), cfg));

    // Residual (C0 + beta e^{j theta}) x on a unit-power signal.
    SignalSpec s;
    s.num_symbols = 10;
    const auto x = generate(s);
    const cplx c0(0.1, -0.08), vm(-0.09, 0.05);
    const auto r = x.scaled(c0 + vm);
    DetectorConfig wide{static_cast<int>(x.size())};
    CHECK(power_detect(r, wide) == doctest::Approx(2.0 * std::norm(c0 + vm)).epsilon(0.02));
}

TEST_CASE("tune on a quadratic bowl") {
    VmState init{0.0, 0.0, 10};
    const int i1 = 700, i2 = 123;
    const double t1 = init.value_of(i1), t2 = init.value_of(i2);
    auto env = [&](const VmState& s) { return (s.g1 - t1) * (s.g1 - t1) + (s.g2 - t2) * (s.g2 - t2); };
    const auto res = tune(env, init, 2000);
    CHECK(res.converged);
    CHECK(res.state.index_of(res.state.g1) == i1);
    CHECK(res.state.index_of(res.state.g2) == i2);
    CHECK(std::is_sorted(res.detector_readings.rbegin(), res.detector_readings.rend()));
    CHECK(res.trace.size() == res.detector_readings.size());
    CHECK(res.iterations <= 2000);
}

TEST_CASE("tune edge cases") {
    VmState init{0.25, -0.5, 12};
    auto flat = [](const VmState&) { return 3.0; };
    const auto res = tune(flat, init, 500);
    CHECK(res.converged);
    CHECK(res.state.g1 == doctest::Approx(init.quantized().g1));
    CHECK(res.state.g2 == doctest::Approx(init.quantized().g2));
    CHECK(res.detector_readings.size() == 1);
    CHECK_THROWS(tune(flat, init, 0));

    auto bowl = [](const VmState& s) { return std::norm(s.gain() - cplx(0.3, 0.3)); };
    const auto limited = tune(bowl, init, 5);
    CHECK(limited.iterations == 5);
    CHECK_FALSE(limited.converged);
    CHECK(bowl(limited.state) <= bowl(init.quantized()));
}

TEST_CASE("rf stage on a single tap") {
    SignalSpec s;
    const auto x = generate(s);
    RfStageConfig cfg;
    // No delay: only the VM grid limits the null.
    MultipathChannel flat{{{std::pow(10.0, -18.0 / 20.0), 0.0}}, 2.395e9, 1.0};
    const auto res = rf_stage(x, flat, cfg);
    const double untuned = res.report.detector_readings.front();
    CHECK(10.0 * std::log10(res.report.detector_readings.back() / untuned) <= -60.0);

    MultipathChannel ch = circulator_only_channel();

    // Ideal VM resolution: what is left is the derivative term, rising with |f|.
    cfg.vm_bits = 24;
    cfg.budget = 4000;
    const auto ideal = rf_stage(x, ch, cfg);
    const auto p = psd(ideal.residual, 1024, 512);
    CHECK(slope_diagnostic(p, diagnostic_band(s, p.bin_hz)).r2 >= 0.9);

    // The derivative component survives any VM setting.
    const auto tc = taylor_coeffs(ch, 1);
    const double deriv_floor = std::norm(tc.coeffs[1]) * analytic_derivatives(x, 1).front().mean_power;
    CHECK(ideal.residual.mean_power >= 0.9 * deriv_floor);
}

TEST_CASE("rf stage default channel trend") {
    SignalSpec s;
    const auto x = generate(s);
    double prev = 1e9;
    for (double bw : {5e6, 10e6, 15e6, 20e6}) {
        s.bandwidth_hz = bw;
        const auto xb = generate(s);
        const auto res = rf_stage(xb, default_channel(), RfStageConfig{});
        const double db = cancellation_db(xb.mean_power, res.residual.mean_power);
        CHECK(db < prev);
        prev = db;
    }
    CHECK(prev >= 50.0);
}

TEST_CASE("more vm bits never hurt (median over seeds)") {
    std::vector<double> med;
    for (int bits : {6, 8, 10, 12, 16}) {
        std::vector<double> r;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            SignalSpec s;
            s.num_symbols = 16;
            s.seed = seed;
            const auto x = generate(s);
            RfStageConfig cfg;
            cfg.vm_bits = bits;
            // The carrier offset spins C0 so the grid error differs per seed.
            const auto ch = default_channel(2.395e9 + 97e6 * static_cast<double>(seed));
            r.push_back(rf_stage(x, ch, cfg).report.detector_readings.back());
        }
        std::nth_element(r.begin(), r.begin() + 5, r.end());
        med.push_back(r[5]);
    }
    for (std::size_t i = 1; i < med.size(); ++i) CHECK(med[i] <= med[i - 1]);
}
