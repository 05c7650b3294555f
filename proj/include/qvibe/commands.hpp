#pragma once

// Batch commands behind the CLI: each runs one experiment from a scenario,
// writes its report files into the scenario's output directory and returns a
// short human-readable summary.
//
// Report tables (CSV columns; JSON uses the same names):
//   spectrum:        m, frequency_hz, re_y, im_y, abs_y, kappa, above
//   trials:          truth_pp_m, trial, seed, detected, amplitude_pp_m, frequency_hz, components, events, error
//   trials_summary:  truth_pp_m, truth_frequency_hz, trials, failures, mean_pp_m, std_pp_m, accuracy_m,
//                    mean_frequency_hz, std_frequency_hz
//   sweep:           f_set_hz, f_true_hz, f_hat_hz, relative_offset, amplitude_pp_m, detected, events
//   advantage:       loss, background, pipeline, exposure_s, events, detected, components, harmonics, pp_m,
//                    fundamental_pp_m, square_equivalent_pp_m, clamp_fraction, truth_pp_m, nominal_pp_m
//   qcrb:            n_pairs, bound_s, bound_path_m, bound_displacement_m, trials, true_delay_s,
//                    mean_delay_s, empirical_std_s, ratio, saturation

#include <filesystem>
#include <string>
#include <vector>

#include "qvibe/scenario.hpp"

namespace qvibe {

struct CommandResult {
  std::string summary;
  std::vector<std::filesystem::path> files;
};

[[nodiscard]] CommandResult cmd_simulate(const ScenarioConfig& config);
[[nodiscard]] CommandResult cmd_estimate(const ScenarioConfig& config, const std::filesystem::path& first,
                                         const std::filesystem::path& second);
[[nodiscard]] CommandResult cmd_trials(const ScenarioConfig& config);
[[nodiscard]] CommandResult cmd_sweep(const ScenarioConfig& config);
[[nodiscard]] CommandResult cmd_advantage(const ScenarioConfig& config);
[[nodiscard]] CommandResult cmd_qcrb(const ScenarioConfig& config);

// Report serializers (exposed for round-trip tests).
[[nodiscard]] std::string spectrum_csv(const SpectrumEstimate& spectrum);
[[nodiscard]] std::string spectrum_json(const SpectrumEstimate& spectrum);
[[nodiscard]] std::string reconstruction_json(const PipelineResult& result);
[[nodiscard]] std::string sweep_csv(const std::vector<SweepPoint>& points);

}  // namespace qvibe
