#pragma once

// Flux-probing estimation: windowed projections of raw timestamps, threshold
// detection on a uniform frequency grid, Brent refinement, per-stream sinusoid
// amplitudes and inversion of the fringe into a delay/displacement trace.
//
// Timestamps are centred on the exposure (T' = T - t_exp/2) everywhere, so the
// Hann taper cos^2(pi T'/t_exp) vanishes at both ends of the record and phases
// refer to the middle of the exposure.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qvibe/core.hpp"
#include "qvibe/stream.hpp"

namespace qvibe {

enum class Window { hann, rectangular };

/// Grid spacing 0.6 / t_exp.
[[nodiscard]] double grid_spacing(double t_exp);
/// M = floor(f_max / df) + 1.
[[nodiscard]] std::size_t grid_size(double f_max, double t_exp);

[[nodiscard]] double window_weight(Window window, double centred_time, double t_exp);

/// (1/t_exp) sum_i w(T_i') exp(-i 2 pi f T_i').
[[nodiscard]] std::complex<double> project_timestamps(const TimestampStream& stream, double f, Window window);

/// p_f(first) - ratio * p_f(second), evaluated directly.
[[nodiscard]] std::complex<double> combined_projection(const TimestampStream& first, const TimestampStream& second,
                                                       double ratio, double f, Window window);

struct SpectrumEstimate {
  double df = 0.0;
  double t_exp = 0.0;
  Window window = Window::hann;
  std::vector<std::complex<double>> projections;  ///< y at m * df, m = 0 .. M-1
  double threshold_kappa = 0.0;
  double p_fa = 0.0;
  std::vector<double> detected;  ///< seed frequencies, Hz

  [[nodiscard]] std::size_t size() const noexcept { return projections.size(); }
  [[nodiscard]] double frequency(std::size_t m) const noexcept { return static_cast<double>(m) * df; }
};

/// y_f on the grid m * 0.6/t_exp up to f_max. Fills projections only.
/// Throws ConfigError when the streams disagree in exposure or tick duration.
[[nodiscard]] SpectrumEstimate combined_spectrum(const TimestampStream& first, const TimestampStream& second,
                                                 double ratio, double f_max, Window window);

/// kappa = (1/t_exp) sqrt(-log{1 - (1 - p_fa)^(1/M)}) sqrt(sum_C w^2 + ratio^2 sum_A w^2).
[[nodiscard]] double detection_threshold(const TimestampStream& first, const TimestampStream& second, double ratio,
                                         Window window, double p_fa, std::size_t n_grid);

/// Contiguous runs of bins with |y| > kappa, each reduced to its largest bin.
/// The DC bin is excluded, and so is any seed at or below one grid step (it
/// cannot be bracketed by the refinement interval).
[[nodiscard]] std::vector<double> detect_frequencies(const SpectrumEstimate& spectrum);

struct RefinedFrequency {
  double frequency = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Brent maximization of |y_f| (rectangular window) over [f_seed - df, f_seed + df]
/// to an absolute tolerance of 1e-4 df with at most 100 iterations. On
/// non-convergence the seed is returned with converged = false.
[[nodiscard]] RefinedFrequency refine_frequency(const TimestampStream& first, const TimestampStream& second,
                                                double ratio, double f_seed, double df);

/// arg y_f (rectangular window) in (-pi, pi]. Throws AnalysisError when |y_f| is zero.
[[nodiscard]] double estimate_phase(const TimestampStream& first, const TimestampStream& second, double ratio,
                                    double f_hat);

struct AmplitudeEstimate {
  double amplitude = 0.0;  ///< signed, events/s
  double dc = 0.0;         ///< N / t_exp
};

/// a = (2/t_exp) sum_i cos(2 pi f T_i' + theta), a0 = N / t_exp.
[[nodiscard]] AmplitudeEstimate estimate_amplitudes(const TimestampStream& stream, double f_hat, double theta_hat);

struct ComponentEstimate {
  double f_hat = 0.0;
  double theta_hat = 0.0;
  double a_first = 0.0;   ///< a_hat for C (or port 1), events/s, signed
  double a_second = 0.0;  ///< a_hat for A (or port 2), events/s, signed
  bool converged = true;
};

/// Maps the reconstructed probability P_hat onto a delay.
struct FringeInversion {
  enum class Kind { quantum, classical };
  Kind kind = Kind::quantum;
  double scale = 0.0;       ///< delta_omega or omega_optical, rad/s
  double visibility = 1.0;  ///< V0 or the reference classical visibility
  double offset = 0.0;      ///< classical vertical offset correction

  static FringeInversion quantum(const PhotonPairSpec& pair);
  static FringeInversion classical(const ClassicalFringeSpec& reference, double offset = 0.0);

  /// Argument of arccos before clamping: (1 - 2P) / V - offset.
  [[nodiscard]] double argument(double p) const noexcept { return (1.0 - 2.0 * p) / visibility - offset; }
};

struct ReconstructedSignal {
  std::vector<ComponentEstimate> components;
  double a0_first = 0.0;
  double a0_second = 0.0;
  double ratio = 1.0;
  FringeInversion inversion;
  int geometry = 2;
  double t_exp = 0.0;
  /// tau_hat(t) sampled at trace_start + i * trace_dt.
  double trace_start = 0.0;
  double trace_dt = 0.0;
  std::vector<double> tau_trace;
  double tau_mean = 0.0;
  double displacement_pp = 0.0;  ///< m
  std::size_t flux_clamps = 0;
  std::size_t arccos_clamps = 0;

  /// c (tau_hat - mean tau_hat) / g at sample i.
  [[nodiscard]] double displacement(std::size_t i) const;
  [[nodiscard]] double clamp_fraction() const;
};

struct ReconstructOptions {
  int samples_per_period = 100;
  std::size_t max_samples = 4'000'000;
  /// Trace span; 0 selects four periods of the lowest component (capped at t_exp).
  double span = 0.0;
};

/// Estimates the per-stream amplitudes of each component (f_hat, theta_hat
/// must be set), builds phi_C and phi_A from them, forms
/// P_hat = phi_C / (phi_C + ratio phi_A) and inverts the fringe. Fluxes are
/// clamped at zero and the arccos argument to [-1, 1]; both are counted.
[[nodiscard]] ReconstructedSignal reconstruct(const TimestampStream& first, const TimestampStream& second, double ratio,
                                              const FringeInversion& inversion, GeometryFactor g,
                                              std::vector<ComponentEstimate> components,
                                              const ReconstructOptions& options = {});

/// Quantum form of reconstruct using V0 and delta_omega from the pair spec.
[[nodiscard]] ReconstructedSignal reconstruct(const TimestampStream& c, const TimestampStream& a, double ratio,
                                              double v0, const PhotonPairSpec& pair, GeometryFactor g,
                                              std::vector<ComponentEstimate> components,
                                              const ReconstructOptions& options = {});

/// Static delay from the count ratio: the reconstruction with no sinusoidal components.
[[nodiscard]] double estimate_static_delay(const TimestampStream& c, const TimestampStream& a, double ratio,
                                           const PhotonPairSpec& pair);

/// ratio = [N_C / p] / [N_A / (1 - p)] from streams recorded at a fixed delay with known P_C = p.
[[nodiscard]] double calibrate_ratio(const TimestampStream& c_cal, const TimestampStream& a_cal, double known_p);

struct AnalysisOptions {
  double p_fa = 1e-3;
  double f_max = 50e3;
  Window window = Window::hann;
  double ratio = 1.0;
  ReconstructOptions reconstruct;
};

struct PipelineResult {
  SpectrumEstimate spectrum;
  std::optional<ReconstructedSignal> signal;  ///< empty when nothing was detected
};

/// Spectrum, threshold, detection, refinement, phases, amplitudes and
/// reconstruction for a pair of tagged streams.
[[nodiscard]] PipelineResult run_pipeline(const TimestampStream& first, const TimestampStream& second,
                                          const FringeInversion& inversion, GeometryFactor g,
                                          const AnalysisOptions& options);

[[nodiscard]] PipelineResult quantum_pipeline(const TimestampStream& c, const TimestampStream& a,
                                              const PhotonPairSpec& pair, GeometryFactor g,
                                              const AnalysisOptions& options);

/// Singles from the two beamsplitter outputs take the place of C and A; the
/// fringe is inverted with a fixed reference (visibility and offset), so a
/// channel that drifts from the reference biases the amplitude.
[[nodiscard]] PipelineResult classical_pipeline(const TimestampStream& p1, const TimestampStream& p2,
                                                const ClassicalFringeSpec& reference, GeometryFactor g,
                                                const AnalysisOptions& options, double reference_offset = 0.0);

/// Peak-to-peak displacement of one component of a reconstruction, re-synthesized
/// on its own (same DC levels, ratio and inversion).
[[nodiscard]] double component_displacement_pp(const ReconstructedSignal& full, std::size_t index,
                                               const ReconstructOptions& options = {});

}  // namespace qvibe
