#include "qvibe/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qvibe/error.hpp"
#include "qvibe/parallel.hpp"

namespace qvibe {

namespace {

constexpr int truth_samples_per_period = 1000;

double truth_peak_to_peak(const VibrationSignal& signal, double exposure) {
  return signal.peak_to_peak(peak_to_peak_span(signal.lowest_frequency(), exposure), truth_samples_per_period);
}

// Strongest component by combined modulation |a_first - ratio * a_second|.
std::size_t strongest_component(const ReconstructedSignal& r) {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t i = 0; i < r.components.size(); ++i) {
    const double mag = std::abs(r.components[i].a_first - r.ratio * r.components[i].a_second);
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  return best;
}

PipelineSummary summarize(const PipelineResult& result, double fundamental, double exposure, std::size_t events,
                          const ReconstructOptions& options) {
  PipelineSummary s;
  s.exposure = exposure;
  s.events = events;
  if (!result.signal) {
    return s;
  }
  const auto& sig = *result.signal;
  s.detected = true;
  s.components = sig.components.size();
  s.harmonics = count_odd_harmonics(sig.components, fundamental, result.spectrum.df);
  s.pp = sig.displacement_pp;
  s.clamp_fraction = sig.clamp_fraction();
  std::size_t nearest = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sig.components.size(); ++i) {
    const double d = std::abs(sig.components[i].f_hat - fundamental);
    if (d < dist) {
      dist = d;
      nearest = i;
    }
  }
  if (dist <= result.spectrum.df) {
    s.fundamental_pp = component_displacement_pp(sig, nearest, options);
    s.square_equivalent_pp = 0.25 * pi * s.fundamental_pp;
  }
  return s;
}

}  // namespace

double qcrb_delay_std(const QcrbQuery& query) {
  if (!(query.n_pairs >= 1.0)) {
    throw ConfigError("QCRB: number of pairs must be at least 1");
  }
  const auto& p = query.pair;
  // Only the two spectral parameters enter the bound; a zero detuning is allowed.
  if (!(p.delta_omega >= 0.0) || !(p.sigma >= 0.0) || !(p.delta_omega > 0.0 || p.sigma > 0.0) ||
      !std::isfinite(p.delta_omega) || !std::isfinite(p.sigma)) {
    throw ConfigError("QCRB: detuning and bandwidth must be non-negative, finite and not both zero");
  }
  return 1.0 / (std::sqrt(query.n_pairs) * std::sqrt(p.delta_omega * p.delta_omega + 4.0 * p.sigma * p.sigma));
}

SampleMoments sample_moments(const std::vector<double>& values) {
  SampleMoments m;
  m.count = values.size();
  if (values.empty()) {
    return m;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  m.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) {
      ss += (v - m.mean) * (v - m.mean);
    }
    m.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return m;
}

std::vector<std::uint64_t> trial_seeds(std::uint64_t base, std::size_t n) {
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t i = 0; i < n; ++i) {
    seeds[i] = derive_seed(base, 1000 + i);
  }
  return seeds;
}

TrialStatistics run_amplitude_trials(const QuantumScenario& scenario, const std::vector<std::uint64_t>& seeds) {
  if (seeds.size() < 2) {
    throw ConfigError("trial statistics need at least 2 trials");
  }
  TrialStatistics stats;
  stats.truth_pp = truth_peak_to_peak(scenario.signal, scenario.exposure);
  double strongest = -1.0;
  for (const auto& c : scenario.signal.components()) {
    if (c.amplitude_pp > strongest) {
      strongest = c.amplitude_pp;
      stats.truth_frequency = c.frequency;
    }
  }
  stats.trials.resize(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    auto& rec = stats.trials[i];
    rec.seed = seeds[i];
    try {
      const auto run =
          simulate_quantum_run(scenario.pair, scenario.signal, scenario.channel, scenario.exposure, seeds[i]);
      rec.events = run.first.size() + run.second.size();
      const auto result =
          quantum_pipeline(run.first, run.second, scenario.pair, scenario.channel.geometry, scenario.analysis);
      if (!result.signal) {
        rec.error = "no frequency above threshold";
        return;
      }
      rec.detected = true;
      rec.amplitude_pp = result.signal->displacement_pp;
      rec.components = result.signal->components.size();
      rec.frequency = result.signal->components[strongest_component(*result.signal)].f_hat;
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  });
  std::vector<double> pps;
  std::vector<double> freqs;
  for (const auto& rec : stats.trials) {
    if (rec.detected) {
      pps.push_back(rec.amplitude_pp);
      freqs.push_back(rec.frequency);
    } else {
      ++stats.failures;
    }
  }
  const auto pm = sample_moments(pps);
  const auto fm = sample_moments(freqs);
  stats.mean_pp = pm.mean;
  stats.std_pp = pm.stddev;
  stats.accuracy = std::abs(stats.truth_pp - pm.mean);
  stats.mean_frequency = fm.mean;
  stats.std_frequency = fm.stddev;
  return stats;
}

std::vector<SweepPoint> run_frequency_sweep(const QuantumScenario& base, const SweepPlan& plan, std::uint64_t seed) {
  if (plan.frequencies.empty()) {
    throw ConfigError("sweep: empty frequency list");
  }
  if (plan.amplitudes_pp.size() != 1 && plan.amplitudes_pp.size() != plan.frequencies.size()) {
    throw ConfigError("sweep: give one amplitude or one per frequency");
  }
  if (!(plan.exposure > 0.0) || !(plan.playback_scale > 0.0)) {
    throw ConfigError("sweep: exposure and playback scale must be positive");
  }
  for (double f : plan.frequencies) {
    if (!(f > 0.0) || f * plan.playback_scale >= base.analysis.f_max) {
      throw ConfigError("sweep: frequency " + std::to_string(f) + " Hz outside the analysis grid");
    }
  }
  std::vector<SweepPoint> points(plan.frequencies.size());
  parallel_for(points.size(), [&](std::size_t i) {
    auto& pt = points[i];
    pt.f_set = plan.frequencies[i];
    pt.f_true = pt.f_set * plan.playback_scale;
    const double app = plan.amplitudes_pp.size() == 1 ? plan.amplitudes_pp[0] : plan.amplitudes_pp[i];
    const auto signal = VibrationSignal::pure_tone(pt.f_true, app, 0.0, base.signal.operating_delay());
    const auto run = simulate_quantum_run(base.pair, signal, base.channel, plan.exposure, derive_seed(seed, 2000 + i));
    pt.events = run.first.size() + run.second.size();
    const auto result = quantum_pipeline(run.first, run.second, base.pair, base.channel.geometry, base.analysis);
    if (!result.signal) {
      return;
    }
    pt.detected = true;
    const auto& comp = result.signal->components[strongest_component(*result.signal)];
    pt.f_hat = comp.f_hat;
    pt.relative_offset = (pt.f_hat - pt.f_set) / pt.f_set;
    pt.amplitude_pp = result.signal->displacement_pp;
  });
  return points;
}

double quantum_equalization_factor(const AdvantageCondition& c) { return 1.0 / (1.0 - c.loss); }

double classical_equalization_factor(const AdvantageCondition& c, double reference_arm_ratio) {
  return (1.0 + reference_arm_ratio) / (1.0 + reference_arm_ratio * (1.0 - c.loss));
}

std::size_t count_odd_harmonics(const std::vector<ComponentEstimate>& comps, double fundamental, double df) {
  if (!(fundamental > 0.0)) {
    return 0;
  }
  std::vector<int> seen;
  for (const auto& c : comps) {
    const double k = std::round(c.f_hat / fundamental);
    if (k < 1.0 || static_cast<long long>(k) % 2 == 0) {
      continue;
    }
    if (std::abs(c.f_hat - k * fundamental) <= df) {
      seen.push_back(static_cast<int>(k));
    }
  }
  std::sort(seen.begin(), seen.end());
  return static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
}

AdvantageReport run_advantage_experiment(const AdvantagePlan& plan, std::uint64_t seed) {
  if (plan.conditions.empty()) {
    throw ConfigError("advantage: empty condition schedule");
  }
  if (!(plan.quantum_exposure > 0.0) || !(plan.classical_exposure > 0.0)) {
    throw ConfigError("advantage: exposures must be positive");
  }
  AdvantageReport report;
  report.truth_pp = truth_peak_to_peak(plan.signal, std::max(plan.quantum_exposure, plan.classical_exposure));
  const double fundamental = plan.fundamental > 0.0 ? plan.fundamental : plan.signal.lowest_frequency();
  for (const auto& c : plan.signal.components()) {
    if (c.frequency == fundamental) {
      report.nominal_pp = 0.25 * pi * c.amplitude_pp;
    }
  }
  report.rows.resize(plan.conditions.size());
  // Two jobs per condition: quantum then classical.
  parallel_for(2 * plan.conditions.size(), [&](std::size_t job) {
    const std::size_t i = job / 2;
    const auto& cond = plan.conditions[i];
    auto& row = report.rows[i];
    row.condition = cond;
    if (job % 2 == 0) {
      auto chan = plan.quantum_channel;
      chan.loss_b = cond.loss;
      chan.background = cond.background;
      const double t = plan.quantum_exposure * (plan.count_equalization ? quantum_equalization_factor(cond) : 1.0);
      const auto run = simulate_quantum_run(plan.pair, plan.signal, chan, t, derive_seed(seed, 3000 + i));
      const auto result = quantum_pipeline(run.first, run.second, plan.pair, chan.geometry, plan.analysis);
      row.quantum = summarize(result, fundamental, t, run.first.size() + run.second.size(),
                              plan.analysis.reconstruct);
    } else {
      auto chan = plan.classical_channel;
      chan.loss_b = cond.loss;
      chan.background = cond.background;
      const double t = plan.classical_exposure *
                       (plan.count_equalization
                            ? classical_equalization_factor(cond, plan.classical_reference.arm_intensity_ratio)
                            : 1.0);
      const auto run =
          simulate_classical_run(plan.classical_reference, plan.signal, chan, t, derive_seed(seed, 4000 + i));
      const auto result =
          classical_pipeline(run.first, run.second, plan.classical_reference, chan.geometry, plan.analysis);
      row.classical = summarize(result, fundamental, t, run.first.size() + run.second.size(),
                                plan.analysis.reconstruct);
    }
  });
  return report;
}

StaticDelayStudy run_static_delay_study(const PhotonPairSpec& pair, double n_pairs, std::size_t trials,
                                        std::uint64_t seed) {
  if (trials < 2) {
    throw ConfigError("static delay study needs at least 2 trials");
  }
  StaticDelayStudy study;
  study.n_pairs = n_pairs;
  study.trials = trials;
  study.true_delay = quadrature_delay(pair);
  study.bound = qcrb_delay_std({n_pairs, pair});

  // R_C = R_A = n_pairs over 1 s gives n_pairs expected detections in total.
  ChannelModel chan;
  chan.rate_c = n_pairs;
  chan.rate_a = n_pairs;
  chan.geometry = GeometryFactor{1};
  const auto still = VibrationSignal::multi_tone({}, study.true_delay);
  std::vector<double> estimates(trials);
  parallel_for(trials, [&](std::size_t i) {
    const auto run = simulate_quantum_run(pair, still, chan, 1.0, derive_seed(seed, 5000 + i));
    estimates[i] = estimate_static_delay(run.first, run.second, 1.0, pair);
  });
  const auto m = sample_moments(estimates);
  study.mean_delay = m.mean;
  study.empirical_std = m.stddev;
  study.ratio = m.stddev / study.bound;
  study.saturation = study.bound / m.stddev;
  return study;
}

FalseAlarmStudy run_false_alarm_study(const QuantumScenario& scenario, std::size_t runs, std::uint64_t seed) {
  if (runs == 0) {
    throw ConfigError("false-alarm study needs at least one run");
  }
  FalseAlarmStudy study;
  study.runs = runs;
  study.p_fa = scenario.analysis.p_fa;
  std::vector<unsigned char> hit(runs, 0);
  const auto& a = scenario.analysis;
  parallel_for(runs, [&](std::size_t i) {
    const auto run =
        simulate_quantum_run(scenario.pair, scenario.signal, scenario.channel, scenario.exposure, derive_seed(seed, i));
    auto spec = combined_spectrum(run.first, run.second, a.ratio, a.f_max, a.window);
    spec.threshold_kappa = detection_threshold(run.first, run.second, a.ratio, a.window, a.p_fa, spec.size());
    hit[i] = detect_frequencies(spec).empty() ? 0 : 1;
  });
  for (auto h : hit) {
    study.runs_with_detection += h;
  }
  study.fraction = static_cast<double>(study.runs_with_detection) / static_cast<double>(runs);
  return study;
}

}  // namespace qvibe
