#include "qvibe/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>

#include "qvibe/error.hpp"

namespace qvibe {

std::string_view to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::pure_tone:
      return "pure-tone";
    case SignalKind::multi_tone:
      return "multi-tone";
    case SignalKind::square_wave:
      return "square-wave";
    case SignalKind::amplitude_modulated:
      return "amplitude-modulated";
  }
  return "unknown";
}

VibrationSignal::VibrationSignal(SignalKind kind, std::vector<SinusoidComponent> components, double tau_op)
    : kind_(kind), components_(std::move(components)), tau_op_(tau_op) {
  validate();
}

void VibrationSignal::validate() const {
  for (const auto& c : components_) {
    if (!(c.frequency > 0.0) || !std::isfinite(c.frequency)) {
      throw ConfigError("signal: component frequencies must be positive");
    }
    if (!(c.amplitude_pp >= 0.0) || !std::isfinite(c.amplitude_pp)) {
      throw ConfigError("signal: component amplitudes must be non-negative");
    }
    if (!std::isfinite(c.phase)) {
      throw ConfigError("signal: component phase must be finite");
    }
  }
  if (!std::isfinite(tau_op_)) {
    throw ConfigError("signal: operating delay must be finite");
  }
}

VibrationSignal VibrationSignal::pure_tone(double frequency, double amplitude_pp, double phase, double tau_op) {
  return VibrationSignal(SignalKind::pure_tone, {{amplitude_pp, frequency, phase}}, tau_op);
}

VibrationSignal VibrationSignal::multi_tone(std::vector<SinusoidComponent> components, double tau_op) {
  return VibrationSignal(SignalKind::multi_tone, std::move(components), tau_op);
}

VibrationSignal VibrationSignal::square_wave(double fundamental, double amplitude_pp, int n_harmonics,
                                             double tau_op) {
  if (n_harmonics < 1) {
    throw ConfigError("square wave: n_harmonics must be at least 1");
  }
  // sq(t) = (4/pi) sum_k sin(2 pi k f t) / k over odd k; sin(z) = cos(z - pi/2).
  std::vector<SinusoidComponent> comps;
  for (int k = 1; k <= n_harmonics; k += 2) {
    comps.push_back({amplitude_pp * 4.0 / (pi * k), fundamental * k, -0.5 * pi});
  }
  return VibrationSignal(SignalKind::square_wave, std::move(comps), tau_op);
}

VibrationSignal VibrationSignal::alternating_tones(double gate_frequency, double frequency_a, double amplitude_pp_a,
                                                   double frequency_b, double amplitude_pp_b, int n_harmonics,
                                                   double tau_op) {
  if (!(gate_frequency > 0.0) || !(frequency_a > 0.0) || !(frequency_b > 0.0) || n_harmonics < 1) {
    throw ConfigError("alternating tones: frequencies and n_harmonics must be positive");
  }
  const double period = 1.0 / gate_frequency;
  constexpr int samples = 16384;
  std::vector<double> x(samples);
  for (int j = 0; j < samples; ++j) {
    const double t = period * j / samples;
    x[j] = t < 0.5 * period ? 0.5 * amplitude_pp_a * std::sin(two_pi * frequency_a * t)
                            : 0.5 * amplitude_pp_b * std::sin(two_pi * frequency_b * (t - 0.5 * period));
  }
  std::vector<SinusoidComponent> comps;
  double largest = 0.0;
  for (int k = 1; k <= n_harmonics; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (int j = 0; j < samples; ++j) {
      acc += x[j] * std::polar(1.0, -two_pi * k * j / samples);
    }
    acc *= 2.0 / samples;
    // x ~ |c_k| cos(2 pi k f_g t + arg c_k)
    comps.push_back({2.0 * std::abs(acc), k * gate_frequency, std::arg(acc)});
    largest = std::max(largest, comps.back().amplitude_pp);
  }
  std::erase_if(comps, [&](const SinusoidComponent& c) { return c.amplitude_pp < 1e-6 * largest; });
  return VibrationSignal(SignalKind::amplitude_modulated, std::move(comps), tau_op);
}

VibrationSignal VibrationSignal::with_frequency_scale(double scale) const {
  if (!(scale > 0.0)) {
    throw ConfigError("signal: frequency scale must be positive");
  }
  auto comps = components_;
  for (auto& c : comps) {
    c.frequency *= scale;
  }
  return VibrationSignal(kind_, std::move(comps), tau_op_);
}

VibrationSignal VibrationSignal::scaled(double factor) const {
  auto comps = components_;
  for (auto& c : comps) {
    c.amplitude_pp *= factor;
  }
  return VibrationSignal(kind_, std::move(comps), tau_op_);
}

double VibrationSignal::displacement(double t) const {
  double x = 0.0;
  for (const auto& c : components_) {
    x += 0.5 * c.amplitude_pp * std::cos(two_pi * c.frequency * t + c.phase);
  }
  return x;
}

double VibrationSignal::delay(double t, GeometryFactor g) const {
  return tau_op_ + displacement_to_delay(displacement(t), g);
}

double VibrationSignal::amplitude_bound() const {
  double s = 0.0;
  for (const auto& c : components_) {
    s += 0.5 * c.amplitude_pp;
  }
  return s;
}

double VibrationSignal::highest_frequency() const {
  double f = 0.0;
  for (const auto& c : components_) {
    f = std::max(f, c.frequency);
  }
  return f;
}

double VibrationSignal::lowest_frequency() const {
  if (components_.empty()) {
    return 0.0;
  }
  double f = std::numeric_limits<double>::infinity();
  for (const auto& c : components_) {
    f = std::min(f, c.frequency);
  }
  return f;
}

double VibrationSignal::peak_to_peak(double span, int samples_per_period) const {
  if (components_.empty() || !(span > 0.0)) {
    return 0.0;
  }
  const auto n = static_cast<std::size_t>(std::ceil(span * highest_frequency() * samples_per_period)) + 1;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = displacement(span * static_cast<double>(i) / static_cast<double>(n - 1));
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi - lo;
}

double peak_to_peak_span(double lowest_frequency, double t_exp) {
  if (!(lowest_frequency > 0.0)) {
    return t_exp;
  }
  return std::min(t_exp, 4.0 / lowest_frequency);
}

}  // namespace qvibe
