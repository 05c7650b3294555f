// Exercises the shared library through the C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "qvibe/qvibe.h"

namespace fs = std::filesystem;

TEST_CASE("status codes and errors") {
  CHECK(qvibe_scenario_new(nullptr) == QVIBE_ERR_USAGE);
  CHECK(std::string(qvibe_last_error()).size() > 0);
  qvibe_scenario* s = nullptr;
  REQUIRE(qvibe_scenario_new(&s) == QVIBE_OK);
  CHECK(qvibe_scenario_set(s, "pair.colour", "red") == QVIBE_ERR_CONFIG);
  CHECK(std::string(qvibe_last_error()).find("colour") != std::string::npos);
  CHECK(qvibe_scenario_set(s, "run.exposure", "0 s") == QVIBE_OK);
  CHECK(qvibe_scenario_validate(s) == QVIBE_ERR_CONFIG);
  CHECK(qvibe_run_simulate(nullptr, nullptr, 0, nullptr) == QVIBE_ERR_USAGE);
  qvibe_scenario_free(s);
  CHECK(qvibe_scenario_load("/nonexistent.ini", &s) == QVIBE_ERR_IO);
  CHECK(qvibe_scenario_parse("[pair]\nvisibility = 2\n[run]\nseed = 1\n", &s) == QVIBE_OK);
  CHECK(qvibe_scenario_validate(s) == QVIBE_ERR_CONFIG);
  qvibe_scenario_free(s);
  CHECK(std::string(qvibe_status_name(QVIBE_ERR_ANALYSIS)) == "analysis error");
  CHECK(std::string(qvibe_version()).size() > 0);
}

TEST_CASE("bound through the C API") {
  double b = 0.0;
  REQUIRE(qvibe_qcrb_delay_std(59000.0, 177e12, 0.0, &b) == QVIBE_OK);
  CHECK(b == doctest::Approx(3.7019e-18).epsilon(1e-4));
  CHECK(qvibe_qcrb_delay_std(0.0, 177e12, 0.0, &b) == QVIBE_ERR_CONFIG);
  CHECK(qvibe_qcrb_delay_std(1.0, 177e12, 0.0, nullptr) == QVIBE_ERR_USAGE);
}

TEST_CASE("simulate, read streams and estimate through handles") {
  const auto dir = fs::temp_directory_path() / "qvibe_test_capi";
  fs::remove_all(dir);
  qvibe_scenario* s = nullptr;
  REQUIRE(qvibe_scenario_new(&s) == QVIBE_OK);
  REQUIRE(qvibe_scenario_set(s, "run.out", dir.string().c_str()) == QVIBE_OK);
  REQUIRE(qvibe_scenario_set(s, "channel.rate", "50 k/s") == QVIBE_OK);
  REQUIRE(qvibe_scenario_set(s, "signal.amplitude", "40 nm") == QVIBE_OK);
  REQUIRE(qvibe_scenario_set(s, "analysis.f_max", "100 Hz") == QVIBE_OK);

  char small[16];
  size_t needed = 0;
  REQUIRE(qvibe_run_simulate(s, small, sizeof small, &needed) == QVIBE_OK);
  CHECK(needed > sizeof small);
  CHECK(std::string(small).size() == sizeof small - 1);

  const auto c_path = (dir / "coincidence.qvts").string();
  const auto a_path = (dir / "anticoincidence.qvts").string();
  qvibe_stream* c = nullptr;
  REQUIRE(qvibe_stream_read(c_path.c_str(), &c) == QVIBE_OK);
  size_t n = 0;
  double t = 0.0;
  uint64_t tick = 0;
  CHECK(qvibe_stream_count(c, &n) == QVIBE_OK);
  CHECK(qvibe_stream_exposure(c, &t) == QVIBE_OK);
  CHECK(qvibe_stream_tick_ps(c, &tick) == QVIBE_OK);
  CHECK(std::abs(static_cast<double>(n) - 25e3) < 1e3);
  CHECK(t == 1.0);
  CHECK(tick == 100);
  double re = 0.0;
  double im = 0.0;
  REQUIRE(qvibe_stream_project(c, 0.0, QVIBE_WINDOW_RECTANGULAR, &re, &im) == QVIBE_OK);
  CHECK(re == doctest::Approx(static_cast<double>(n)));
  CHECK(im == doctest::Approx(0.0));
  CHECK(qvibe_stream_project(c, 0.0, static_cast<qvibe_window>(7), &re, &im) == QVIBE_ERR_USAGE);
  const auto txt = (dir / "copy.txt").string();
  REQUIRE(qvibe_stream_write(c, txt.c_str(), 0) == QVIBE_OK);
  qvibe_stream* back = nullptr;
  REQUIRE(qvibe_stream_read(txt.c_str(), &back) == QVIBE_OK);
  size_t n2 = 0;
  CHECK(qvibe_stream_count(back, &n2) == QVIBE_OK);
  CHECK(n2 == n);
  qvibe_stream_free(back);
  qvibe_stream_free(c);

  std::vector<char> summary(4096);
  REQUIRE(qvibe_run_estimate(s, c_path.c_str(), a_path.c_str(), summary.data(), summary.size(), nullptr) ==
          QVIBE_OK);
  CHECK(std::string(summary.data()).find("peak-to-peak") != std::string::npos);
  CHECK(fs::exists(dir / "reconstruction.json"));
  CHECK(qvibe_run_estimate(s, c_path.c_str(), (dir / "missing").string().c_str(), nullptr, 0, nullptr) ==
        QVIBE_ERR_IO);
  qvibe_scenario_free(s);
}
