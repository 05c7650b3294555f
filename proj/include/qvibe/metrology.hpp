#pragma once

// Experiment harness: quantum Cramer-Rao bound, repeated-trial amplitude
// statistics, discrete frequency sweeps and the quantum/classical comparison
// under loss and background.

#include <cstdint>
#include <string>
#include <vector>

#include "qvibe/estimate.hpp"
#include "qvibe/simulate.hpp"

namespace qvibe {

struct QcrbQuery {
  double n_pairs = 1.0;
  PhotonPairSpec pair;
};

/// 1 / (sqrt(N) sqrt(delta_omega^2 + 4 sigma^2)), in seconds.
[[nodiscard]] double qcrb_delay_std(const QcrbQuery& query);

struct QuantumScenario {
  PhotonPairSpec pair;
  ChannelModel channel;
  VibrationSignal signal;
  double exposure = 1.0;  ///< s
  AnalysisOptions analysis;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  bool detected = false;
  double amplitude_pp = 0.0;  ///< m
  double frequency = 0.0;     ///< Hz, strongest detected component
  std::size_t components = 0;
  std::size_t events = 0;
  std::string error;
};

struct TrialStatistics {
  double truth_pp = 0.0;
  double truth_frequency = 0.0;
  std::vector<TrialRecord> trials;
  std::size_t failures = 0;
  double mean_pp = 0.0;
  double std_pp = 0.0;    ///< sigma_x, precision
  double accuracy = 0.0;  ///< |truth - mean|
  double mean_frequency = 0.0;
  double std_frequency = 0.0;
};

/// Mean and sample standard deviation (n - 1).
struct SampleMoments {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};
[[nodiscard]] SampleMoments sample_moments(const std::vector<double>& values);

/// One simulate + estimate run per seed (trials run concurrently). Trials that
/// fail detection or analysis stay in the record with their error and are
/// counted in `failures`; the moments use the successful trials only.
[[nodiscard]] TrialStatistics run_amplitude_trials(const QuantumScenario& scenario,
                                                   const std::vector<std::uint64_t>& seeds);

/// Seeds base, base+1, ... mixed through derive_seed.
[[nodiscard]] std::vector<std::uint64_t> trial_seeds(std::uint64_t base, std::size_t n);

struct SweepPlan {
  std::vector<double> frequencies;   ///< set frequencies, Hz
  std::vector<double> amplitudes_pp; ///< per frequency, m (a single value applies to all)
  double exposure = 5.0;
  double playback_scale = 1.0;       ///< actual frequency = set frequency * scale
};

struct SweepPoint {
  double f_set = 0.0;
  double f_true = 0.0;
  double f_hat = 0.0;
  double amplitude_pp = 0.0;
  double relative_offset = 0.0;  ///< (f_hat - f_set) / f_set
  bool detected = false;
  std::size_t events = 0;
};

/// Pure tones at each set frequency on the scenario's pair and channel.
[[nodiscard]] std::vector<SweepPoint> run_frequency_sweep(const QuantumScenario& base, const SweepPlan& plan,
                                                          std::uint64_t seed);

struct AdvantageCondition {
  double loss = 0.0;
  double background = 0.0;
};

struct AdvantagePlan {
  PhotonPairSpec pair;
  ClassicalFringeSpec classical_reference;  ///< lossless, background-free fringe
  ChannelModel quantum_channel;
  ChannelModel classical_channel;
  VibrationSignal signal;
  double fundamental = 0.0;  ///< Hz, for harmonic counting
  double quantum_exposure = 3.0;
  double classical_exposure = 1.0;
  bool count_equalization = true;
  std::vector<AdvantageCondition> conditions;
  AnalysisOptions analysis;
};

struct PipelineSummary {
  double exposure = 0.0;
  std::size_t events = 0;
  bool detected = false;
  std::size_t components = 0;
  std::size_t harmonics = 0;       ///< odd harmonics of the fundamental above threshold
  double pp = 0.0;                 ///< raw peak-to-peak of the reconstruction, m
  double fundamental_pp = 0.0;     ///< fundamental alone, m
  double square_equivalent_pp = 0.0;  ///< pi/4 * fundamental_pp
  double clamp_fraction = 0.0;
};

struct AdvantageRow {
  AdvantageCondition condition;
  PipelineSummary quantum;
  PipelineSummary classical;
};

struct AdvantageReport {
  double truth_pp = 0.0;      ///< peak-to-peak of the simulated waveform
  double nominal_pp = 0.0;    ///< ideal square-wave peak-to-peak (pi/4 of the fundamental pp)
  std::vector<AdvantageRow> rows;
};

/// Exposure multiplier keeping the expected signal-event count fixed under
/// loss (background events are not counted).
[[nodiscard]] double quantum_equalization_factor(const AdvantageCondition& c);
[[nodiscard]] double classical_equalization_factor(const AdvantageCondition& c, double reference_arm_ratio);

[[nodiscard]] AdvantageReport run_advantage_experiment(const AdvantagePlan& plan, std::uint64_t seed);

/// Odd multiples k * fundamental (k = 1, 3, ...) matched by a component within one grid step.
[[nodiscard]] std::size_t count_odd_harmonics(const std::vector<ComponentEstimate>& comps, double fundamental,
                                              double df);

struct StaticDelayStudy {
  double n_pairs = 0.0;
  std::size_t trials = 0;
  double true_delay = 0.0;
  double mean_delay = 0.0;
  double empirical_std = 0.0;  ///< s
  double bound = 0.0;          ///< qcrb_delay_std at n_pairs
  double ratio = 0.0;          ///< empirical_std / bound
  double saturation = 0.0;     ///< bound / empirical_std
};

/// Repeated static-delay estimation at quadrature from simulated C/A streams
/// with an expected total of n_pairs pairs per trial.
[[nodiscard]] StaticDelayStudy run_static_delay_study(const PhotonPairSpec& pair, double n_pairs, std::size_t trials,
                                                      std::uint64_t seed);

struct FalseAlarmStudy {
  std::size_t runs = 0;
  std::size_t runs_with_detection = 0;
  double fraction = 0.0;
  double p_fa = 0.0;
};

/// Detection stage only, on signal-free scenarios.
[[nodiscard]] FalseAlarmStudy run_false_alarm_study(const QuantumScenario& scenario, std::size_t runs,
                                                    std::uint64_t seed);

}  // namespace qvibe
