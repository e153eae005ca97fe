// Regenerates tests/fixtures/oracle_values.txt. Run once; the tests read the frozen copy.

#include "fdsic/channel.hpp"
#include "fdsic/oracle.hpp"
#include "fdsic/taylor.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <string>

using namespace fdsic;

namespace {

std::ofstream out;

void put(const std::string& key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << " = " << buf << "\n";
}

// Direct DTFT of the nine-tap differentiator from its rationals.
double d9_rel_dev(double f) {
    static const int num[] = {3, -32, 168, -672, 0, 672, -168, 32, -3};
    std::complex<double> h = 0.0;
    for (int k = 0; k < 9; ++k)
        h += (num[k] / 840.0) * std::exp(std::complex<double>(0.0, 2.0 * std::numbers::pi * f * (k - 4)));
    const std::complex<double> ideal(0.0, 2.0 * std::numbers::pi * f);
    return std::abs(h - ideal) / std::abs(ideal);
}

}  // namespace

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : "tests/fixtures/oracle_values.txt";
    out.open(path);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return 1;
    }
    out << "# frozen oracle values, key = value\n";
    put("version", 1);

    SignalSpec sinc;
    sinc.kind = WaveformKind::single_carrier;
    sinc.pulse = PulseShape::sinc;
    const double grid[] = {0.001, 0.005, 0.01, 0.05, 0.1};
    for (double r : grid) {
        const auto a = oracle::exact_delay_oracle(sinc, r, 100000);
        char key[32];
        std::snprintf(key, sizeof key, "%g", r);
        put(std::string("delay.angular.err_power.") + key, a.err_power);
        put(std::string("delay.angular.second_err_power.") + key, a.second_err_power);
        put(std::string("delay.angular.deriv_power.") + key, a.deriv_power);
    }
    const auto ang = oracle::exact_delay_oracle(sinc, 0.01, 100000);
    put("delay.angular.raw_signal_power", ang.raw_signal_power);
    const auto nrm = oracle::exact_delay_oracle(sinc, 0.01, 100000, oracle::SincConvention::normalized);
    put("delay.normalized.err_power.0.01", nrm.err_power);
    put("delay.normalized.second_err_power.0.01", nrm.second_err_power);
    SignalSpec rrc = sinc;
    rrc.pulse = PulseShape::rrc;
    const auto rr = oracle::exact_delay_oracle(rrc, 0.01, 100000);
    put("delay.rrc.err_power.0.01", rr.err_power);
    put("delay.rrc.deriv_power.0.01", rr.deriv_power);

    put("kernel.f0", oracle::lemma_kernel(0.0));
    put("kernel.f_pi", oracle::lemma_kernel(std::numbers::pi));
    put("kernel.integral", oracle::lemma_kernel_integral());
    put("poisson.sum.0", oracle::poisson_check(0.0).direct_sum);
    put("poisson.sum.0.25", oracle::poisson_check(0.25).direct_sum);

    double worst = 0.0, crossing = 0.5;
    for (int i = 1; i <= 30000; ++i) worst = std::max(worst, d9_rel_dev(0.3 * i / 30000.0));
    for (int i = 1; i <= 500000; ++i) {
        const double f = 0.5 * i / 500000.0;
        if (d9_rel_dev(f) > 0.02) {
            crossing = f;
            break;
        }
    }
    put("filters.d1_9tap.max_rel_dev_to_0.3", worst);
    put("filters.d1_9tap.max_rel_dev_to_0.15", d9_rel_dev(0.15));
    put("filters.d1_9tap.two_percent_crossing", crossing);

    double delay_worst = -400.0;
    SignalSpec ofdm;
    ofdm.num_symbols = 2;
    ofdm.ofdm_fft_size = 256;
    ofdm.ofdm_used_carriers = 150;
    std::mt19937_64 rng(7);
    for (int frame = 0; frame < 10; ++frame) {
        ofdm.seed = 100 + frame;
        const auto x = generate(ofdm);
        const double d = (1 + static_cast<int>(rng() % 63)) / (64.0 * x.sample_rate_hz);
        const auto a = fractional_delay(x, d);
        const auto b = oracle::resample_delay_reference(x, d);
        double e = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) e += std::norm(a.samples[i] - b.samples[i]);
        delay_worst = std::max(delay_worst, 10.0 * std::log10(std::max(e / a.size() / x.mean_power, 1e-300)));
    }
    put("delay.resample_vs_fractional_db", delay_worst);
    std::cout << "wrote " << path << "\n";
    return 0;
}
