#include "fdsic/config.hpp"

#include <doctest.h>

#include <cmath>

using namespace fdsic;

TEST_CASE("empty config gives the defaults") {
    const auto c = parse_config("");
    CHECK(c.signal.kind == WaveformKind::ofdm);
    CHECK(c.signal.bandwidth_hz == 20e6);
    CHECK(c.channel.carrier_hz == 2.395e9);
    CHECK(c.rf.vm_bits == 16);
    CHECK(c.digital.order == 2);
    CHECK(c.digital.train_len == 4096);
    CHECK_FALSE(c.impairments.noise_dbm.has_value());
}

TEST_CASE("sections and keys") {
    const auto c = parse_config(R"(
# comment
[signal]
kind = single_carrier
bandwidth_hz = 10e6   # trailing comment
pulse = sinc
constellation = qam16

[channel]
preset = custom
tx_power_dbm = 10
tap = -18, 0.5
reflector = 0.2

[impairments]
noise_dbm = -90
adc_bits = 12
sample_offset = 0.25

[digital]
order = 1
first_filter = d1_3tap
)");
    CHECK(c.signal.kind == WaveformKind::single_carrier);
    CHECK(c.signal.bandwidth_hz == 10e6);
    CHECK(c.signal.pulse == PulseShape::sinc);
    CHECK(c.signal.constellation == Constellation::qam16);
    REQUIRE(c.channel.taps.size() == 1);
    CHECK(c.channel.taps[0].gain == doctest::Approx(std::pow(10.0, -0.9)));
    CHECK(c.channel.taps[0].delay_s == doctest::Approx(0.5e-9));
    CHECK(c.channel.reflectors_m == std::vector<double>{0.2});
    CHECK(*c.impairments.noise_dbm == -90.0);
    CHECK(c.digital.order == 1);
    CHECK(c.digital.filters.first.kind == DerivativeKind::d1_3tap);

    const auto ch = c.channel.build();
    CHECK(ch.taps.size() == 2);
    CHECK(ch.tx_gain == doctest::Approx(10.0));
    const auto imp = c.impairments.build(40e6);
    CHECK(imp.noise_power == doctest::Approx(1e-9));
    CHECK(imp.sample_offset_s == doctest::Approx(0.25 / 40e6));
}

TEST_CASE("round trip through the writer") {
    auto c = parse_config("[channel]\npreset = custom\ntap = -20, 1.5\nreflector = 0.4\n[impairments]\nnoise_dbm = -70\n");
    const auto again = parse_config(format_config(c));
    CHECK(again.channel.reflectors_m == c.channel.reflectors_m);
    CHECK(again.signal.rolloff == c.signal.rolloff);
    CHECK(again.channel.taps[0].delay_s == doctest::Approx(c.channel.taps[0].delay_s).epsilon(1e-15));
    CHECK(again.channel.taps[0].gain == doctest::Approx(c.channel.taps[0].gain).epsilon(1e-14));
}

TEST_CASE("bad configs are rejected") {
    CHECK_THROWS_AS(parse_config("[signal]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("kind = ofdm\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[signal]\nkind ofdm\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[signal\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[signal]\noversampling = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[signal]\nbandwidth_hz = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[digital]\norder = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[channel]\ntap = -18\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[channel]\ntap = -18, 0.5\n"), ConfigError);  // needs preset = custom
    CHECK_THROWS_AS(parse_config("[channel]\npreset = custom\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[output]\npsd_segment = 1000\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[impairments]\nsample_offset = 1\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}
