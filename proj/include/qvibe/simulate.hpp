#pragma once

#include <cstdint>
#include <functional>

#include "qvibe/core.hpp"
#include "qvibe/signal.hpp"
#include "qvibe/stream.hpp"

namespace qvibe {

/// Detection channel: rates, loss, background and timing.
struct ChannelModel {
  double loss_b = 0.0;                  ///< excess loss L in mode b, [0, 1)
  double background = 0.0;              ///< background fraction B of detected singles, [0, 1)
  double coincidence_window = 100e-12;  ///< s
  double rate_c = 190e3;                ///< R_C, events/s
  double rate_a = 190e3;                ///< R_A, events/s
  double singles_rate = 1.2e6;          ///< classical mode: total lossless signal singles, events/s
  /// Quantum mode: signal singles per detector feeding accidental coincidences
  /// (0 disables accidentals).
  double detector_singles = 0.0;
  GeometryFactor geometry{2};
  std::uint64_t tick_ps = 100;

  void validate() const;

  /// 2 w_c S_1 S_2 with S_i = detector_singles / (1 - B).
  [[nodiscard]] double accidental_rate() const;
};

using FluxFunction = std::function<double(double)>;

/// Inhomogeneous Poisson realization over [0, t_exp) by thinning homogeneous
/// candidates generated at flux_upper_bound, quantized to tick_ps.
///
/// Deterministic for a given seed. Throws ConfigError when the flux exceeds the
/// bound on a dense check grid or at any candidate time.
[[nodiscard]] TimestampStream sample_inhomogeneous_poisson(const FluxFunction& flux, double flux_upper_bound,
                                                           double t_exp, std::uint64_t seed,
                                                           StreamTag tag = StreamTag::coincidence,
                                                           std::uint64_t tick_ps = 100);

struct FluxPair {
  FluxFunction first;   ///< coincidences (quantum) or port 1 (classical)
  FluxFunction second;  ///< anti-coincidences (quantum) or port 2 (classical)
  double first_bound = 0.0;
  double second_bound = 0.0;
  double background = 0.0;  ///< flat flux added to each stream, events/s
};

/// phi_C = (1-L) R_C P_C[tau(t)] + acc and phi_A = (1-L) R_A (1 - P_C[tau(t)]) + acc.
[[nodiscard]] FluxPair quantum_fluxes(const PhotonPairSpec& pair, const VibrationSignal& signal,
                                      const ChannelModel& chan);

/// Port fluxes S (1+r)/2 P_port[tau(t)] + b with r = r_ref (1 - L), and flat
/// background b = B/(1-B) times the mean signal flux per port.
[[nodiscard]] FluxPair classical_fluxes(const ClassicalFringeSpec& fringe, const VibrationSignal& signal,
                                        const ChannelModel& chan);

struct SimulatedRun {
  TimestampStream first;   ///< C or port 1
  TimestampStream second;  ///< A or port 2
  GroundTruth truth;
};

[[nodiscard]] SimulatedRun simulate_quantum_run(const PhotonPairSpec& pair, const VibrationSignal& signal,
                                                const ChannelModel& chan, double t_exp, std::uint64_t seed);

[[nodiscard]] SimulatedRun simulate_classical_run(const ClassicalFringeSpec& fringe, const VibrationSignal& signal,
                                                  const ChannelModel& chan, double t_exp, std::uint64_t seed);

/// Independent sub-seed for stream `index` of a run.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace qvibe
