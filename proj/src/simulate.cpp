#include "qvibe/simulate.hpp"

#include <cmath>
#include <random>
#include <string>

#include "qvibe/error.hpp"

namespace qvibe {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// 53-bit uniform in [0, 1); std::uniform_real_distribution is not specified bit-exactly.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

constexpr int bound_check_points = 10001;

GroundTruth truth_of(const VibrationSignal& signal, GeometryFactor g) {
  return {signal.components(), signal.operating_delay(), g.value()};
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (0xa0761d6478bd642full * (index + 1)));
}

void ChannelModel::validate() const {
  if (!(loss_b >= 0.0 && loss_b < 1.0)) {
    throw ConfigError("channel: loss must lie in [0, 1)");
  }
  if (!(background >= 0.0 && background < 1.0)) {
    throw ConfigError("channel: background fraction must lie in [0, 1)");
  }
  if (!(coincidence_window > 0.0)) {
    throw ConfigError("channel: coincidence window must be positive");
  }
  if (!(rate_c > 0.0) || !(rate_a > 0.0)) {
    throw ConfigError("channel: rate_c and rate_a must be positive");
  }
  if (!(singles_rate >= 0.0) || !(detector_singles >= 0.0)) {
    throw ConfigError("channel: singles rates must be non-negative");
  }
  if (tick_ps == 0) {
    throw ConfigError("channel: tick duration must be positive");
  }
}

double ChannelModel::accidental_rate() const {
  const double s = detector_singles / (1.0 - background);
  return 2.0 * coincidence_window * s * s;
}

TimestampStream sample_inhomogeneous_poisson(const FluxFunction& flux, double flux_upper_bound, double t_exp,
                                             std::uint64_t seed, StreamTag tag, std::uint64_t tick_ps) {
  if (!(t_exp > 0.0) || !std::isfinite(t_exp)) {
    throw ConfigError("sampler: exposure must be positive");
  }
  if (!(flux_upper_bound >= 0.0) || !std::isfinite(flux_upper_bound)) {
    throw ConfigError("sampler: flux bound must be finite and non-negative");
  }
  if (tick_ps == 0) {
    throw ConfigError("sampler: tick duration must be positive");
  }
  const double slack = flux_upper_bound * 1e-12;
  for (int i = 0; i < bound_check_points; ++i) {
    const double t = t_exp * i / (bound_check_points - 1);
    const double v = flux(t);
    if (!(v >= 0.0) || v > flux_upper_bound + slack) {
      throw ConfigError("sampler: flux " + std::to_string(v) + " at t=" + std::to_string(t) +
                        " s violates [0, bound=" + std::to_string(flux_upper_bound) + "]");
    }
  }

  TimestampStream out;
  out.tag = tag;
  out.tick_ps = tick_ps;
  out.t_exp = t_exp;
  if (flux_upper_bound == 0.0) {
    return out;
  }
  out.ticks.reserve(static_cast<std::size_t>(flux_upper_bound * t_exp * 0.6) + 16);

  std::mt19937_64 rng(derive_seed(seed, 0x5eed));
  const double tick_s = static_cast<double>(tick_ps) * 1e-12;
  const double ticks_per_second = 1e12 / static_cast<double>(tick_ps);
  double t = 0.0;
  for (;;) {
    t += -std::log1p(-uniform01(rng)) / flux_upper_bound;
    if (t >= t_exp) {
      break;
    }
    const double v = flux(t);
    if (!(v >= 0.0) || v > flux_upper_bound + slack) {
      throw ConfigError("sampler: flux " + std::to_string(v) + " at t=" + std::to_string(t) +
                        " s violates the declared bound");
    }
    if (uniform01(rng) * flux_upper_bound < v) {
      auto tick = static_cast<std::uint64_t>(t * ticks_per_second);
      while (tick > 0 && static_cast<double>(tick) * tick_s >= t_exp) {
        --tick;
      }
      out.ticks.push_back(tick);
    }
  }
  return out;
}

FluxPair quantum_fluxes(const PhotonPairSpec& pair, const VibrationSignal& signal, const ChannelModel& chan) {
  pair.validate();
  chan.validate();
  const double keep = 1.0 - chan.loss_b;
  const double acc = chan.accidental_rate();
  const double rc = keep * chan.rate_c;
  const double ra = keep * chan.rate_a;
  const auto g = chan.geometry;
  FluxPair f;
  f.first = [=](double t) { return rc * quantum_coincidence_probability(pair, signal.delay(t, g)) + acc; };
  f.second = [=](double t) { return ra * (1.0 - quantum_coincidence_probability(pair, signal.delay(t, g))) + acc; };
  f.first_bound = rc + acc;
  f.second_bound = ra + acc;
  f.background = acc;
  return f;
}

FluxPair classical_fluxes(const ClassicalFringeSpec& fringe, const VibrationSignal& signal,
                          const ChannelModel& chan) {
  fringe.validate();
  chan.validate();
  ClassicalFringeSpec actual = fringe;
  actual.arm_intensity_ratio = fringe.arm_intensity_ratio * (1.0 - chan.loss_b);
  const double total = chan.singles_rate * (1.0 + actual.arm_intensity_ratio) / (1.0 + fringe.arm_intensity_ratio);
  const double bg = chan.background / (1.0 - chan.background) * 0.5 * total;
  const auto g = chan.geometry;
  FluxPair f;
  f.first = [=](double t) { return total * classical_port_probability(actual, signal.delay(t, g), 1) + bg; };
  f.second = [=](double t) { return total * classical_port_probability(actual, signal.delay(t, g), 2) + bg; };
  f.first_bound = total + bg;
  f.second_bound = total + bg;
  f.background = bg;
  return f;
}

SimulatedRun simulate_quantum_run(const PhotonPairSpec& pair, const VibrationSignal& signal,
                                  const ChannelModel& chan, double t_exp, std::uint64_t seed) {
  const auto f = quantum_fluxes(pair, signal, chan);
  SimulatedRun run;
  run.first = sample_inhomogeneous_poisson(f.first, f.first_bound, t_exp, derive_seed(seed, 0),
                                           StreamTag::coincidence, chan.tick_ps);
  run.second = sample_inhomogeneous_poisson(f.second, f.second_bound, t_exp, derive_seed(seed, 1),
                                            StreamTag::anticoincidence, chan.tick_ps);
  run.truth = truth_of(signal, chan.geometry);
  return run;
}

SimulatedRun simulate_classical_run(const ClassicalFringeSpec& fringe, const VibrationSignal& signal,
                                    const ChannelModel& chan, double t_exp, std::uint64_t seed) {
  const auto f = classical_fluxes(fringe, signal, chan);
  SimulatedRun run;
  run.first = sample_inhomogeneous_poisson(f.first, f.first_bound, t_exp, derive_seed(seed, 2),
                                           StreamTag::singles_port1, chan.tick_ps);
  run.second = sample_inhomogeneous_poisson(f.second, f.second_bound, t_exp, derive_seed(seed, 3),
                                            StreamTag::singles_port2, chan.tick_ps);
  run.truth = truth_of(signal, chan.geometry);
  return run;
}

}  // namespace qvibe
