#pragma once

#include <string_view>
#include <vector>

#include "qvibe/core.hpp"

namespace qvibe {

/// One displacement sinusoid: (amplitude_pp / 2) * cos(2 pi f t + phase).
struct SinusoidComponent {
  double amplitude_pp = 0.0;  ///< m, peak-to-peak
  double frequency = 0.0;     ///< Hz
  double phase = 0.0;         ///< rad
};

enum class SignalKind { pure_tone, multi_tone, square_wave, amplitude_modulated };

[[nodiscard]] std::string_view to_string(SignalKind kind);

/// Ground-truth displacement waveform as a sparse set of sinusoids around an
/// operating-point delay.
class VibrationSignal {
 public:
  VibrationSignal() = default;

  static VibrationSignal pure_tone(double frequency, double amplitude_pp, double phase, double tau_op);
  static VibrationSignal multi_tone(std::vector<SinusoidComponent> components, double tau_op);

  /// Fourier series of a square wave with the given peak-to-peak amplitude,
  /// truncated to n_harmonics (odd harmonics 1, 3, ..., n_harmonics).
  static VibrationSignal square_wave(double fundamental, double amplitude_pp, int n_harmonics, double tau_op);

  /// Periodic waveform alternating between two tones: tone A for the first half
  /// of each gate period, tone B for the second half. Represented by its
  /// Fourier series in harmonics of the gate frequency up to n_harmonics.
  static VibrationSignal alternating_tones(double gate_frequency, double frequency_a, double amplitude_pp_a,
                                           double frequency_b, double amplitude_pp_b, int n_harmonics,
                                           double tau_op);

  /// Same waveform with every frequency multiplied by scale (playback-rate error).
  [[nodiscard]] VibrationSignal with_frequency_scale(double scale) const;
  /// Same waveform scaled in amplitude.
  [[nodiscard]] VibrationSignal scaled(double factor) const;

  [[nodiscard]] double displacement(double t) const;
  /// tau(t) = tau_op + g x(t) / c.
  [[nodiscard]] double delay(double t, GeometryFactor g) const;

  [[nodiscard]] const std::vector<SinusoidComponent>& components() const noexcept { return components_; }
  [[nodiscard]] double operating_delay() const noexcept { return tau_op_; }
  [[nodiscard]] SignalKind kind() const noexcept { return kind_; }

  /// Sum of component amplitudes (half of the worst-case peak-to-peak).
  [[nodiscard]] double amplitude_bound() const;
  [[nodiscard]] double highest_frequency() const;
  [[nodiscard]] double lowest_frequency() const;

  /// Peak-to-peak displacement sampled over [0, span] at samples_per_period
  /// points per period of the highest component.
  [[nodiscard]] double peak_to_peak(double span, int samples_per_period = 100) const;

  void validate() const;

 private:
  VibrationSignal(SignalKind kind, std::vector<SinusoidComponent> components, double tau_op);

  SignalKind kind_ = SignalKind::multi_tone;
  std::vector<SinusoidComponent> components_;
  double tau_op_ = 0.0;
};

/// Analysis span used for peak-to-peak evaluation: four periods of the lowest
/// component, limited to the exposure.
[[nodiscard]] double peak_to_peak_span(double lowest_frequency, double t_exp);

}  // namespace qvibe
