#pragma once

// Scenario configuration: line-oriented `key = value` files with [section]
// headers, or a JSON document with the same sections and keys. Physical
// quantities carry explicit unit suffixes ("10 nm", "177 THz", "100 ps").

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qvibe/metrology.hpp"

namespace qvibe {

enum class Mode { quantum, classical };
enum class ReportFormat { json, csv };

[[nodiscard]] std::string_view to_string(Mode mode);
[[nodiscard]] std::string_view to_string(ReportFormat format);

/// Signal descriptor as written in the config; built into a VibrationSignal on demand.
struct SignalConfig {
  std::string kind = "tone";  ///< none | tone | multi | square | alternating
  double frequency = 10.0;
  double amplitude_pp = 10e-9;
  double phase = 0.0;
  std::vector<SinusoidComponent> components;  ///< kind = multi
  int harmonics = 7;                          ///< square: highest odd harmonic; alternating: gate harmonics
  double gate = 25.0;
  double frequency_a = 50.0;
  double amplitude_a = 36e-9;
  double frequency_b = 100.0;
  double amplitude_b = 22e-9;
  double playback_scale = 1.0;
  double operating_delay = -1.0;  ///< s; negative selects the quantum quadrature point
};

/// Defaults: visibility 0.9 and a 1 kHz analysis band; everything else takes the
/// defaults of the owning types.
struct ScenarioConfig {
  ScenarioConfig();

  Mode mode = Mode::quantum;
  PhotonPairSpec pair;
  ClassicalFringeSpec classical;
  bool classical_quadrature = true;  ///< phase offset placed at quadrature for the operating delay
  ChannelModel channel;
  SignalConfig signal;
  AnalysisOptions analysis;

  double exposure = 1.0;
  std::uint64_t seed = 1;
  StreamFormat stream_format = StreamFormat::binary;
  ReportFormat report_format = ReportFormat::csv;
  std::string out_dir = "out";

  // trials
  std::size_t trials = 10;
  std::vector<double> trial_amplitudes;  ///< empty: the signal amplitude only

  SweepPlan sweep;

  // advantage
  std::vector<AdvantageCondition> conditions;
  double quantum_exposure = 3.0;
  double classical_exposure = 1.0;
  bool count_equalization = true;
  double fundamental = 0.0;

  // qcrb
  std::vector<double> qcrb_pairs;
  std::size_t qcrb_trials = 0;

  /// Operating delay: the configured one or the quantum quadrature point.
  [[nodiscard]] double operating_delay() const;
  [[nodiscard]] VibrationSignal build_signal() const;
  [[nodiscard]] ClassicalFringeSpec classical_reference() const;
  [[nodiscard]] QuantumScenario quantum_scenario() const;
  [[nodiscard]] AdvantagePlan advantage_plan() const;
  /// Cross-field validation; throws ConfigError.
  void validate() const;
};

/// Applies one `key = value` setting from section `section`. Unknown sections
/// or keys and malformed values throw ConfigError. Repeatable keys
/// (signal.component, trials.amplitude, sweep.frequency, advantage.condition,
/// qcrb.pairs) append.
void apply_setting(ScenarioConfig& config, std::string_view section, std::string_view key, std::string_view value);

/// Same, with a dotted "section.key" name.
void apply_setting(ScenarioConfig& config, std::string_view dotted_key, std::string_view value);

[[nodiscard]] ScenarioConfig parse_scenario_ini(std::string_view text);
[[nodiscard]] ScenarioConfig parse_scenario_json(std::string_view text);
/// JSON when the first non-blank character is '{', INI otherwise.
[[nodiscard]] ScenarioConfig parse_scenario(std::string_view text);
[[nodiscard]] ScenarioConfig load_scenario(const std::filesystem::path& path);

enum class Dimension { none, frequency, length, time, angle, rate };

/// Parses "<number> <unit>" into SI. Dimension::none accepts a bare number only;
/// every other dimension requires a matching unit suffix.
[[nodiscard]] double parse_quantity(std::string_view text, Dimension dim);

}  // namespace qvibe
