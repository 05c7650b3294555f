#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "qvibe/error.hpp"
#include "qvibe/scenario.hpp"

using namespace qvibe;

namespace {

std::string error_of(const std::string& text) {
  try {
    (void)parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("quantities parse strictly with units") {
  CHECK(parse_quantity("10 nm", Dimension::length) == doctest::Approx(1e-8));
  CHECK(parse_quantity("10nm", Dimension::length) == doctest::Approx(1e-8));
  CHECK(parse_quantity(" 177 THz ", Dimension::frequency) == doctest::Approx(177e12));
  CHECK(parse_quantity("1.2 M/s", Dimension::rate) == doctest::Approx(1.2e6));
  CHECK(parse_quantity("90 deg", Dimension::angle) == doctest::Approx(pi / 2));
  CHECK(parse_quantity("100 ps", Dimension::time) == doctest::Approx(1e-10));
  CHECK(parse_quantity("3.7 as", Dimension::time) == doctest::Approx(3.7e-18));
  CHECK(parse_quantity("1e-3", Dimension::none) == doctest::Approx(1e-3));
  CHECK_THROWS_AS((void)parse_quantity("10", Dimension::length), ConfigError);
  CHECK_THROWS_AS((void)parse_quantity("10 Hz", Dimension::length), ConfigError);
  CHECK_THROWS_AS((void)parse_quantity("10 furlongs", Dimension::length), ConfigError);
  CHECK_THROWS_AS((void)parse_quantity("0.5 nm", Dimension::none), ConfigError);
  CHECK_THROWS_AS((void)parse_quantity("nm", Dimension::length), ConfigError);
  CHECK_THROWS_AS((void)parse_quantity("10 NM", Dimension::length), ConfigError);
}

TEST_CASE("INI scenario") {
  const auto c = parse_scenario(R"(
# comment
[pair]
detuning = 177 THz
visibility = 0.85   # trailing comment

[channel]
rate = 190 k/s
loss = 0.1
tick = 1 ns
geometry = 1

[signal]
kind = multi
component = 10 Hz, 20 nm
component = 30 Hz, 5 nm, 90 deg

[analysis]
f_max = 2 kHz
window = rectangular
p_fa = 0.01

[run]
mode = classical
exposure = 2 s
seed = 77
format = json

[sweep]
range = 1 kHz, 21 kHz, 1 kHz

[advantage]
condition = 0, 0
condition = 0.87, 0
count_equalization = false
)");
  CHECK(c.pair.delta_omega == doctest::Approx(two_pi * 177e12));
  CHECK(c.pair.visibility == doctest::Approx(0.85));
  CHECK(c.channel.rate_c == doctest::Approx(190e3));
  CHECK(c.channel.rate_a == doctest::Approx(190e3));
  CHECK(c.channel.tick_ps == 1000);
  CHECK(c.channel.geometry.value() == 1);
  REQUIRE(c.signal.components.size() == 2);
  CHECK(c.signal.components[1].phase == doctest::Approx(pi / 2));
  CHECK(c.analysis.window == Window::rectangular);
  CHECK(c.mode == Mode::classical);
  CHECK(c.seed == 77);
  CHECK(c.report_format == ReportFormat::json);
  CHECK(c.sweep.frequencies.size() == 21);
  CHECK(c.sweep.frequencies.back() == doctest::Approx(21e3));
  CHECK(c.conditions.size() == 2);
  CHECK_FALSE(c.count_equalization);
  CHECK_NOTHROW(c.validate());
  CHECK(c.build_signal().components().size() == 2);
}

TEST_CASE("JSON scenario follows the same schema") {
  const auto ini = parse_scenario("[signal]\nkind = square\nfrequency = 10 Hz\namplitude = 55 nm\n"
                                  "[advantage]\ncondition = 0, 0\ncondition = 0, 0.5\n[run]\nseed = 9\n");
  const auto json = parse_scenario(R"({"signal": {"kind": "square", "frequency": "10 Hz", "amplitude": "55 nm"},
    "advantage": {"condition": ["0, 0", "0, 0.5"]}, "run": {"seed": 9}})");
  CHECK(json.signal.kind == ini.signal.kind);
  CHECK(json.signal.amplitude_pp == ini.signal.amplitude_pp);
  CHECK(json.conditions.size() == 2);
  CHECK(json.conditions[1].background == 0.5);
  CHECK(json.seed == 9);
  CHECK_FALSE(error_of(R"({"signal": {"amplitude": 55}})").empty());  // unit required
  CHECK_FALSE(error_of(R"({"signal": {"colour": "red"}})").empty());
  CHECK_FALSE(error_of(R"({"signal": 3})").empty());
  CHECK_FALSE(error_of("{ not json").empty());
}

TEST_CASE("unknown keys and sections are rejected with their line") {
  CHECK(error_of("[pair]\ncolour = red\n").find("line 2") != std::string::npos);
  CHECK(error_of("[pair]\ncolour = red\n").find("pair.colour") != std::string::npos);
  CHECK(error_of("\n\n[photons]\nx = 1\n").find("line 4") != std::string::npos);
  CHECK_FALSE(error_of("key = 1\n").empty());
  CHECK_FALSE(error_of("[pair\n").empty());
  CHECK_FALSE(error_of("[pair]\njust text\n").empty());
  CHECK_FALSE(error_of("[channel]\ngeometry = 3\n").empty());
  CHECK_FALSE(error_of("[channel]\ntick = 0.5 ps\n").empty());
  CHECK_FALSE(error_of("[run]\nmode = semiclassical\n").empty());
  CHECK_FALSE(error_of("[advantage]\ncondition = 0.5\n").empty());
}

TEST_CASE("validation of assembled scenarios") {
  ScenarioConfig c;
  CHECK_NOTHROW(c.validate());
  apply_setting(c, "run.exposure", "0 s");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ScenarioConfig{};
  apply_setting(c, "analysis.p_fa", "1.5");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ScenarioConfig{};
  apply_setting(c, "signal.kind", "multi");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ScenarioConfig{};
  apply_setting(c, "advantage.condition", "1.0, 0");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "exposure", "1 s"), ConfigError);
}

TEST_CASE("derived scenario pieces") {
  ScenarioConfig c;
  CHECK(c.pair.visibility == doctest::Approx(0.9));
  CHECK(c.analysis.f_max == doctest::Approx(1e3));
  CHECK(c.operating_delay() == doctest::Approx(quadrature_delay(c.pair)));
  apply_setting(c, "signal.operating_delay", "1.5 fs");
  CHECK(c.operating_delay() == doctest::Approx(1.5e-15));
  const auto ref = c.classical_reference();
  CHECK(classical_port_probability(ref, 1.5e-15, 1) == doctest::Approx(0.5));
  apply_setting(c, "signal.playback_scale", "1.00142");
  CHECK(c.build_signal().components()[0].frequency == doctest::Approx(10.0142));
  apply_setting(c, "signal.kind", "square");
  apply_setting(c, "advantage.condition", "0.87, 0");
  const auto plan = c.advantage_plan();
  CHECK(plan.fundamental == doctest::Approx(10.0142));
  CHECK(plan.conditions.size() == 1);
}

TEST_CASE("an empty value resets a repeatable key") {
  auto c = parse_scenario_ini("[qcrb]\npairs = 1e4\npairs = 1e5\n[sweep]\nrange = 1 kHz, 3 kHz, 1 kHz\n");
  CHECK(c.qcrb_pairs.size() == 2);
  CHECK(c.sweep.frequencies.size() == 3);
  apply_setting(c, "qcrb.pairs", "");
  apply_setting(c, "qcrb.pairs", "59000");
  REQUIRE(c.qcrb_pairs.size() == 1);
  CHECK(c.qcrb_pairs[0] == doctest::Approx(59000.0));
  apply_setting(c, "sweep.frequency", " ");
  CHECK(c.sweep.frequencies.empty());
  CHECK_THROWS_AS(apply_setting(c, "run.exposure", ""), ConfigError);
}

TEST_CASE("shipped scenario files load and validate") {
  for (const char* name : {"gated_tones.ini", "amplitude_trials.ini", "frequency_sweep.ini", "loss_advantage.ini", "background_advantage.ini",
                           "qcrb.json"}) {
    INFO(name);
    const auto c = load_scenario(std::string(QVIBE_CONFIG_DIR) + "/" + name);
    CHECK_NOTHROW(c.validate());
  }
  CHECK_THROWS_AS((void)load_scenario("/nonexistent/scenario.ini"), IoError);
}
