#include "fdsic/metrics.hpp"
#include "fdsic/taylor.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace fdsic;
using std::numbers::pi;

namespace {

BasebandSignal white(std::size_t n, double power, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(power / 2.0));
    cvec x(n);
    for (auto& v : x) v = {g(rng), g(rng)};
    return {x, 80e6};
}

// Flat spectrum up to +/- edge, built on FFT bins.
BasebandSignal flat_band(std::size_t n, double fs, double edge, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * pi);
    cvec x(n, 0.0);
    std::vector<std::pair<double, double>> bins;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = (k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - n) * fs / n;
        if (std::abs(f) <= edge) bins.emplace_back(f, ph(rng));
    }
    for (std::size_t m = 0; m < n; ++m) {
        cplx acc = 0.0;
        for (const auto& [f, p] : bins) acc += std::polar(1.0, p + 2.0 * pi * f * m / fs);
        x[m] = acc;
    }
    BasebandSignal s(x, fs);
    return s.scaled(1.0 / std::sqrt(s.mean_power));
}

}  // namespace

TEST_CASE("cancellation ratio") {
    const auto x = white(4096, 1.0, 1);
    CHECK(cancellation_db(x, x) == doctest::Approx(0.0));
    CHECK(cancellation_db(x, x.scaled(0.1)) == doctest::Approx(20.0));
    for (double k : {0.0, 20.0, 40.0})
        CHECK(std::abs(cancellation_db(x, x.scaled(std::pow(10.0, -k / 20.0))) - k) <= 1e-9);
    CHECK(cancellation_db(x, x.scaled(0.0)) == kMaxCancellationDb);
    CHECK_THROWS(cancellation_db(x.scaled(0.0), x));
    CHECK_THROWS(cancellation_db(BasebandSignal{}, x));
}

TEST_CASE("psd of a tone") {
    const std::size_t n = 1 << 15;
    const double fs = 80e6, f0 = 64.0 * fs / 1024.0;
    cvec t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = std::polar(1.0, 2.0 * pi * f0 * i / fs);
    const auto p = psd(BasebandSignal(t, fs), 1024, 512);
    REQUIRE(p.freqs_hz.size() == 1024);
    CHECK(std::is_sorted(p.freqs_hz.begin(), p.freqs_hz.end()));
    const auto peak = std::max_element(p.power_db.begin(), p.power_db.end()) - p.power_db.begin();
    CHECK(p.freqs_hz[peak] == doctest::Approx(f0));
    std::vector<double> sorted = p.power_db;
    std::nth_element(sorted.begin(), sorted.begin() + 512, sorted.end());
    CHECK(p.power_db[peak] - sorted[512] >= 40.0);
    CHECK(p.bin_hz == doctest::Approx(fs / 1024.0));
    CHECK(p.rbw_hz == doctest::Approx(1.5 * p.bin_hz));
}

TEST_CASE("psd normalization and flatness") {
    const double power = 0.37;
    const auto x = white(64 * 1024, power, 2);  // 64 disjoint segments
    const auto p = psd(x, 1024, 0);
    double sum = 0.0;
    for (double v : p.power_db) sum += std::pow(10.0, v / 10.0) * p.bin_hz;
    CHECK(std::abs(sum / x.mean_power - 1.0) <= 0.01);
    // Each bin averages 64 exponentials: Gamma(64, 1/64) puts 0.66% of bins beyond
    // +/-1.5 dB and gives a 0.545 dB spread.
    const double level = 10.0 * std::log10(x.mean_power / (p.bin_hz * 1024));
    int outliers = 0;
    double ss = 0.0;
    for (double v : p.power_db) {
        outliers += std::abs(v - level) > 1.5;
        ss += (v - level) * (v - level);
    }
    CHECK(outliers <= 20);
    CHECK(std::sqrt(ss / 1024.0) == doctest::Approx(0.545).epsilon(0.15));

    CHECK_THROWS(psd(x, 1000, 0));
    CHECK_THROWS(psd(x, 1 << 20, 0));
}

TEST_CASE("psd ignores a global phase") {
    const auto x = white(8192, 1.0, 3);
    const auto a = psd(x, 512, 256);
    const auto b = psd(x.scaled(std::polar(1.0, 1.1)), 512, 256);
    for (std::size_t i = 0; i < a.power_db.size(); ++i) CHECK(a.power_db[i] == doctest::Approx(b.power_db[i]).epsilon(1e-9));
}

TEST_CASE("slope diagnostic") {
    const double fs = 80e6, edge = 10e6;
    const auto x = flat_band(16384, fs, edge, 4);
    const auto dx = analytic_derivatives(x, 1).front();
    const FrequencyBand band{2.0 * fs / 1024.0, 0.9 * edge};

    const auto pd = psd(dx, 1024, 512);
    const auto fd = slope_diagnostic(pd, band);
    CHECK(fd.r2 >= 0.95);
    CHECK(fd.slope_db_per_decade == doctest::Approx(20.0).epsilon(0.1));

    const auto px = psd(x, 1024, 512);
    const auto fx = slope_diagnostic(px, band);
    CHECK(std::abs(fx.slope_db_per_decade) <= 2.0);

    const auto scaled = slope_diagnostic(psd(dx.scaled(1e-3), 1024, 512), band);
    CHECK(scaled.r2 == doctest::Approx(fd.r2).epsilon(1e-9));
    CHECK(scaled.slope_db_per_decade == doctest::Approx(fd.slope_db_per_decade).epsilon(1e-9));

    CHECK_THROWS(slope_diagnostic(pd, FrequencyBand{0.0, edge}));
    CHECK_THROWS(slope_diagnostic(pd, FrequencyBand{1e6, 1e6 + 10.0}));
    CHECK_THROWS(slope_diagnostic(pd, FrequencyBand{1e6, 1e9}));
}
