#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "qvibe/error.hpp"
#include "qvibe/metrology.hpp"

using namespace qvibe;

namespace {

QuantumScenario small_tone(double pp) {
  QuantumScenario s;
  s.pair.visibility = 0.9;
  s.channel.rate_c = s.channel.rate_a = 1e5;
  s.signal = VibrationSignal::pure_tone(10.0, pp, 0.0, quadrature_delay(s.pair));
  s.exposure = 1.0;
  s.analysis.f_max = 100.0;
  return s;
}

}  // namespace

TEST_CASE("quantum Cramer-Rao bound") {
  PhotonPairSpec pair;
  pair.sigma = 0.0;
  const double b = qcrb_delay_std({59000.0, pair});
  // 1 / (sqrt(59000) * 2 pi * 177e12)
  CHECK(b == doctest::Approx(3.7019e-18).epsilon(1e-4));
  CHECK(speed_of_light * b == doctest::Approx(1.1098e-9).epsilon(1e-4));
  CHECK(qcrb_delay_std({4 * 59000.0, pair}) == doctest::Approx(0.5 * b));
  PhotonPairSpec only_bw;
  only_bw.delta_omega = 0.0;
  only_bw.sigma = two_pi * 1e12;
  CHECK(qcrb_delay_std({1.0, only_bw}) == doctest::Approx(1.0 / (4.0 * pi * 1e12)));
  CHECK_THROWS_AS((void)qcrb_delay_std({0.5, pair}), ConfigError);
  // default bandwidth changes the bound only in the fifth digit
  CHECK(qcrb_delay_std({59000.0, PhotonPairSpec{}}) == doctest::Approx(b).epsilon(1e-4));
}

TEST_CASE("sample moments") {
  const auto m = sample_moments({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(m.count == 4);
  CHECK(sample_moments({}).count == 0);
}

TEST_CASE("count equalization factors") {
  CHECK(3.0 * quantum_equalization_factor({0.87, 0.0}) == doctest::Approx(23.08).epsilon(1e-3));
  CHECK(classical_equalization_factor({0.87, 0.0}, 1.0) == doctest::Approx(2.0 / 1.13));
  CHECK(quantum_equalization_factor({0.0, 0.5}) == 1.0);
}

TEST_CASE("odd harmonic counting") {
  std::vector<ComponentEstimate> comps(5);
  comps[0].f_hat = 10.01;
  comps[1].f_hat = 29.98;
  comps[2].f_hat = 20.0;   // even
  comps[3].f_hat = 50.3;   // outside one grid step
  comps[4].f_hat = 70.1;
  CHECK(count_odd_harmonics(comps, 10.0, 0.2) == 3);
  CHECK(count_odd_harmonics(comps, 10.0, 0.6) == 4);
  CHECK(count_odd_harmonics(comps, 0.0, 0.6) == 0);
}

TEST_CASE("amplitude trials aggregate and record failures") {
  auto s = small_tone(30e-9);
  const auto stats = run_amplitude_trials(s, trial_seeds(1, 6));
  CHECK(stats.trials.size() == 6);
  CHECK(stats.failures == 0);
  CHECK(stats.truth_pp == doctest::Approx(30e-9).epsilon(1e-4));
  CHECK(stats.std_pp > 0.0);
  CHECK(std::abs(stats.mean_pp - 30e-9) < 4e-9);
  CHECK(stats.mean_frequency == doctest::Approx(10.0).epsilon(1e-2));

  auto silent = small_tone(0.0);
  const auto none = run_amplitude_trials(silent, trial_seeds(2, 4));
  CHECK(none.trials.size() == 4);
  CHECK(none.failures == 4);
  CHECK_FALSE(none.trials[0].error.empty());
  CHECK_THROWS_AS((void)run_amplitude_trials(s, trial_seeds(1, 1)), ConfigError);
}

TEST_CASE("trials are deterministic and independent of the worker count") {
  auto s = small_tone(20e-9);
  setenv("QVIBE_THREADS", "1", 1);
  const auto a = run_amplitude_trials(s, trial_seeds(5, 4));
  setenv("QVIBE_THREADS", "3", 1);
  const auto b = run_amplitude_trials(s, trial_seeds(5, 4));
  unsetenv("QVIBE_THREADS");
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.trials[i].amplitude_pp == b.trials[i].amplitude_pp);
    CHECK(a.trials[i].frequency == b.trials[i].frequency);
  }
}

TEST_CASE("precision improves as the square root of the exposure") {
  auto s = small_tone(20e-9);
  s.channel.rate_c = s.channel.rate_a = 5e4;
  const auto one = run_amplitude_trials(s, trial_seeds(11, 40));
  s.exposure = 2.0;
  const auto two = run_amplitude_trials(s, trial_seeds(12, 40));
  REQUIRE(one.failures == 0);
  REQUIRE(two.failures == 0);
  const double ratio = one.std_pp / two.std_pp;
  // sqrt(2) = 1.41; each sigma carries ~11% sampling error over 40 trials
  CHECK(ratio > 1.05);
  CHECK(ratio < 1.9);
}

TEST_CASE("frequency sweep") {
  auto base = small_tone(20e-9);
  base.analysis.f_max = 5000.0;
  base.channel.rate_c = base.channel.rate_a = 2e5;
  SweepPlan plan;
  plan.frequencies = {500.0, 2500.0};
  plan.amplitudes_pp = {20e-9};
  plan.exposure = 1.0;
  auto points = run_frequency_sweep(base, plan, 3);
  REQUIRE(points.size() == 2);
  for (const auto& p : points) {
    CHECK(p.detected);
    CHECK(std::abs(p.relative_offset) < 1e-4);
  }
  plan.playback_scale = 1.00142;
  points = run_frequency_sweep(base, plan, 3);
  for (const auto& p : points) {
    CHECK(p.relative_offset == doctest::Approx(0.00142).epsilon(0.05));
  }
  plan.frequencies = {6000.0};
  CHECK_THROWS_AS((void)run_frequency_sweep(base, plan, 3), ConfigError);
  plan.frequencies.clear();
  CHECK_THROWS_AS((void)run_frequency_sweep(base, plan, 3), ConfigError);
}

TEST_CASE("advantage experiment: schedule and equalized exposures") {
  AdvantagePlan plan;
  plan.pair.visibility = 0.9;
  plan.quantum_channel.rate_c = plan.quantum_channel.rate_a = 1e5;
  plan.classical_channel.singles_rate = 2e5;
  const double tau = quadrature_delay(plan.pair);
  plan.classical_reference.phase_offset = classical_quadrature_offset(plan.classical_reference.omega_optical, tau);
  plan.signal = VibrationSignal::square_wave(10.0, 55e-9, 3, tau);
  plan.fundamental = 10.0;
  plan.quantum_exposure = 1.0;
  plan.classical_exposure = 1.0;
  plan.analysis.f_max = 100.0;
  CHECK_THROWS_AS((void)run_advantage_experiment(plan, 1), ConfigError);
  plan.conditions = {{0.0, 0.0}, {0.5, 0.0}};
  const auto report = run_advantage_experiment(plan, 1);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.nominal_pp == doctest::Approx(55e-9));
  CHECK(report.rows[1].quantum.exposure == doctest::Approx(2.0));
  CHECK(report.rows[1].classical.exposure == doctest::Approx(2.0 / 1.5));
  CHECK(report.rows[0].quantum.detected);
  CHECK(report.rows[0].quantum.harmonics >= 1);
  CHECK(report.rows[0].quantum.square_equivalent_pp ==
        doctest::Approx(0.25 * pi * report.rows[0].quantum.fundamental_pp));
}

TEST_CASE("static delay study runs near the bound") {
  PhotonPairSpec pair;
  const auto study = run_static_delay_study(pair, 1e4, 300, 1);
  CHECK(study.bound == doctest::Approx(qcrb_delay_std({1e4, pair})));
  CHECK(study.ratio > 0.85);
  CHECK(study.ratio < 1.3);
  CHECK(study.saturation == doctest::Approx(1.0 / study.ratio));
  CHECK(std::abs(study.mean_delay - study.true_delay) < 4.0 * study.empirical_std / std::sqrt(300.0));
}

TEST_CASE("false alarm study on a signal-free scenario") {
  auto s = small_tone(0.0);
  s.channel.rate_c = s.channel.rate_a = 5e3;
  s.analysis.p_fa = 0.1;
  const auto fa = run_false_alarm_study(s, 400, 21);
  CHECK(fa.runs == 400);
  // binomial(400, 0.1) stays inside [18, 64] with overwhelming probability
  CHECK(fa.runs_with_detection >= 18);
  CHECK(fa.runs_with_detection <= 64);
}
