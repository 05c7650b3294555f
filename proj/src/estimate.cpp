#include "qvibe/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qvibe/error.hpp"
#include "qvibe/mode_sums.hpp"

namespace qvibe {

namespace {

constexpr double refine_tolerance_in_df = 1e-4;
constexpr int refine_max_iterations = 100;

void require_compatible(const TimestampStream& a, const TimestampStream& b) {
  if (a.t_exp != b.t_exp) {
    throw ConfigError("streams have mismatched exposures (" + std::to_string(a.t_exp) + " s vs " +
                      std::to_string(b.t_exp) + " s)");
  }
  if (a.tick_ps != b.tick_ps) {
    throw ConfigError("streams have mismatched tick durations");
  }
  if (!(a.t_exp > 0.0)) {
    throw ConfigError("stream exposure must be positive");
  }
}

void require_ratio(double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw ConfigError("flux ratio R_C/R_A must be positive");
  }
}

// Centred time T' = T - t_exp/2 of event i.
double centred_time(const TimestampStream& s, std::size_t i) { return s.time(i) - 0.5 * s.t_exp; }

// Phase 2 pi f T' reduced to a single turn before scaling, for accuracy at large f T'.
double phase_of(double f, double centred) {
  double cycles = f * centred;
  cycles -= std::nearbyint(cycles);
  return two_pi * cycles;
}

std::complex<double> raw_projection(const TimestampStream& s, double f, Window window) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double tc = centred_time(s, i);
    const double w = window_weight(window, tc, s.t_exp);
    const double ph = phase_of(f, tc);
    re += w * std::cos(ph);
    im -= w * std::sin(ph);
  }
  return {re, im};
}

double sum_squared_weights(const TimestampStream& s, Window window) {
  if (window == Window::rectangular) {
    return static_cast<double>(s.size());
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double w = window_weight(window, centred_time(s, i), s.t_exp);
    acc += w * w;
  }
  return acc;
}

double flux_at(double dc, const std::vector<ComponentEstimate>& comps, bool first, double centred) {
  double v = dc;
  for (const auto& c : comps) {
    v += (first ? c.a_first : c.a_second) * std::cos(phase_of(c.f_hat, centred) + c.theta_hat);
  }
  return v;
}

ReconstructedSignal synthesize(double a0_first, double a0_second, double ratio, const FringeInversion& inversion,
                               int geometry, double t_exp, std::vector<ComponentEstimate> components,
                               const ReconstructOptions& options) {
  require_ratio(ratio);
  if (!(a0_first > 0.0) && !(a0_second > 0.0)) {
    throw AnalysisError("reconstruction: both streams are empty, fluxes are identically zero");
  }
  ReconstructedSignal out;
  out.a0_first = a0_first;
  out.a0_second = a0_second;
  out.ratio = ratio;
  out.inversion = inversion;
  out.geometry = geometry;
  out.t_exp = t_exp;
  out.components = std::move(components);

  double f_lo = std::numeric_limits<double>::infinity();
  double f_hi = 0.0;
  for (const auto& c : out.components) {
    f_lo = std::min(f_lo, c.f_hat);
    f_hi = std::max(f_hi, c.f_hat);
  }
  const double span =
      options.span > 0.0 ? std::min(options.span, t_exp) : peak_to_peak_span(out.components.empty() ? 0.0 : f_lo, t_exp);
  std::size_t n = 2;
  if (f_hi > 0.0) {
    const double wanted = std::ceil(span * f_hi * options.samples_per_period) + 1.0;
    n = static_cast<std::size_t>(std::min<double>(wanted, static_cast<double>(options.max_samples)));
    n = std::max<std::size_t>(n, 2);
  }
  out.trace_start = 0.0;
  out.trace_dt = span / static_cast<double>(n - 1);
  out.tau_trace.resize(n);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double centred = out.trace_start + out.trace_dt * static_cast<double>(i) - 0.5 * t_exp;
    double phi1 = flux_at(a0_first, out.components, true, centred);
    double phi2 = flux_at(a0_second, out.components, false, centred);
    if (phi1 < 0.0) {
      phi1 = 0.0;
      ++out.flux_clamps;
    }
    if (phi2 < 0.0) {
      phi2 = 0.0;
      ++out.flux_clamps;
    }
    const double denom = phi1 + ratio * phi2;
    double p = 0.5;
    if (denom > 0.0) {
      p = phi1 / denom;
    } else {
      ++out.flux_clamps;
    }
    double arg = inversion.argument(p);
    if (arg > 1.0 || arg < -1.0) {
      arg = std::clamp(arg, -1.0, 1.0);
      ++out.arccos_clamps;
    }
    const double tau = std::acos(arg) / inversion.scale;
    out.tau_trace[i] = tau;
    lo = std::min(lo, tau);
    hi = std::max(hi, tau);
    sum += tau;
  }
  out.tau_mean = sum / static_cast<double>(n);
  out.displacement_pp = delay_to_displacement(hi - lo, GeometryFactor{geometry});
  return out;
}

}  // namespace

double grid_spacing(double t_exp) {
  if (!(t_exp > 0.0)) {
    throw ConfigError("exposure must be positive");
  }
  return 0.6 / t_exp;
}

std::size_t grid_size(double f_max, double t_exp) {
  if (!(f_max > 0.0)) {
    throw ConfigError("f_max must be positive");
  }
  return static_cast<std::size_t>(std::floor(f_max / grid_spacing(t_exp))) + 1;
}

double window_weight(Window window, double centred_time, double t_exp) {
  if (window == Window::rectangular) {
    return 1.0;
  }
  const double c = std::cos(pi * centred_time / t_exp);
  return c * c;
}

std::complex<double> project_timestamps(const TimestampStream& stream, double f, Window window) {
  if (!(stream.t_exp > 0.0)) {
    throw ConfigError("stream exposure must be positive");
  }
  return raw_projection(stream, f, window) / stream.t_exp;
}

std::complex<double> combined_projection(const TimestampStream& first, const TimestampStream& second, double ratio,
                                         double f, Window window) {
  require_compatible(first, second);
  return (raw_projection(first, f, window) - ratio * raw_projection(second, f, window)) / first.t_exp;
}

SpectrumEstimate combined_spectrum(const TimestampStream& first, const TimestampStream& second, double ratio,
                                   double f_max, Window window) {
  require_compatible(first, second);
  require_ratio(ratio);
  const double t_exp = first.t_exp;
  const double df = grid_spacing(t_exp);
  const std::size_t m = grid_size(f_max, t_exp);

  std::vector<double> x;
  std::vector<double> w;
  x.reserve(first.size() + second.size());
  w.reserve(first.size() + second.size());
  auto append = [&](const TimestampStream& s, double sign) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double tc = centred_time(s, i);
      x.push_back(two_pi * df * tc);
      w.push_back(sign * window_weight(window, tc, t_exp));
    }
  };
  append(first, 1.0);
  append(second, -ratio);

  SpectrumEstimate spec;
  spec.df = df;
  spec.t_exp = t_exp;
  spec.window = window;
  spec.projections = uniform_mode_sums(x, w, m);
  for (auto& y : spec.projections) {
    y /= t_exp;
  }
  return spec;
}

double detection_threshold(const TimestampStream& first, const TimestampStream& second, double ratio, Window window,
                           double p_fa, std::size_t n_grid) {
  require_compatible(first, second);
  if (!(p_fa > 0.0 && p_fa < 1.0)) {
    throw ConfigError("false-alarm probability must lie in (0, 1)");
  }
  if (n_grid < 1) {
    throw ConfigError("grid size must be at least 1");
  }
  // 1 - (1 - p)^(1/M) evaluated without cancellation.
  const double per_bin = -std::expm1(std::log1p(-p_fa) / static_cast<double>(n_grid));
  const double energy = sum_squared_weights(first, window) + ratio * ratio * sum_squared_weights(second, window);
  return std::sqrt(-std::log(per_bin)) * std::sqrt(energy) / first.t_exp;
}

std::vector<double> detect_frequencies(const SpectrumEstimate& spectrum) {
  std::vector<double> seeds;
  const std::size_t m = spectrum.size();
  std::size_t i = 1;  // DC excluded
  while (i < m) {
    if (std::abs(spectrum.projections[i]) <= spectrum.threshold_kappa) {
      ++i;
      continue;
    }
    std::size_t best = i;
    while (i < m && std::abs(spectrum.projections[i]) > spectrum.threshold_kappa) {
      if (std::abs(spectrum.projections[i]) > std::abs(spectrum.projections[best])) {
        best = i;
      }
      ++i;
    }
    if (best >= 2) {
      seeds.push_back(spectrum.frequency(best));
    }
  }
  return seeds;
}

RefinedFrequency refine_frequency(const TimestampStream& first, const TimestampStream& second, double ratio,
                                  double f_seed, double df) {
  require_compatible(first, second);
  if (!(df > 0.0) || !(f_seed > df)) {
    throw ConfigError("refinement requires f_seed > df > 0");
  }
  auto objective = [&](double f) {
    return -std::abs(combined_projection(first, second, ratio, f, Window::rectangular));
  };

  // Brent's localmin: golden-section steps with parabolic interpolation.
  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  const double abs_tol = refine_tolerance_in_df * df;
  const double rel_eps = 1e-14;
  double a = f_seed - df;
  double b = f_seed + df;
  double x = a + golden * (b - a);
  double w = x;
  double v = x;
  double fx = objective(x);
  double fw = fx;
  double fv = fx;
  double d = 0.0;
  double e = 0.0;
  RefinedFrequency out{f_seed, false, 0};
  for (int iter = 0; iter < refine_max_iterations; ++iter) {
    const double mid = 0.5 * (a + b);
    const double tol = rel_eps * std::abs(x) + abs_tol / 3.0;
    const double tol2 = 2.0 * tol;
    if (std::abs(x - mid) <= tol2 - 0.5 * (b - a)) {
      out.frequency = x;
      out.converged = true;
      out.iterations = iter;
      return out;
    }
    bool golden_step = true;
    if (std::abs(e) > tol) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) {
        p = -p;
      } else {
        q = -q;
      }
      const double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) {
          d = x < mid ? tol : -tol;
        }
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x < mid ? b : a) - x;
      d = golden * e;
    }
    const double u = x + (std::abs(d) >= tol ? d : (d > 0.0 ? tol : -tol));
    const double fu = objective(u);
    if (fu <= fx) {
      (u < x ? b : a) = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      (u < x ? a : b) = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  out.iterations = refine_max_iterations;
  return out;
}

double estimate_phase(const TimestampStream& first, const TimestampStream& second, double ratio, double f_hat) {
  if (!(f_hat > 0.0)) {
    throw ConfigError("phase estimation requires f_hat > 0");
  }
  const auto y = combined_projection(first, second, ratio, f_hat, Window::rectangular);
  if (std::abs(y) == 0.0) {
    throw AnalysisError("phase undefined: projection vanishes at " + std::to_string(f_hat) + " Hz");
  }
  double theta = std::arg(y);
  if (theta == -pi) {
    theta = pi;
  }
  return theta;
}

AmplitudeEstimate estimate_amplitudes(const TimestampStream& stream, double f_hat, double theta_hat) {
  if (!(f_hat > 0.0)) {
    throw ConfigError("amplitude estimation requires f_hat > 0");
  }
  if (!(stream.t_exp > 0.0)) {
    throw ConfigError("stream exposure must be positive");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    acc += std::cos(phase_of(f_hat, centred_time(stream, i)) + theta_hat);
  }
  return {2.0 * acc / stream.t_exp, static_cast<double>(stream.size()) / stream.t_exp};
}

FringeInversion FringeInversion::quantum(const PhotonPairSpec& pair) {
  pair.validate();
  return {Kind::quantum, pair.delta_omega, pair.visibility, 0.0};
}

FringeInversion FringeInversion::classical(const ClassicalFringeSpec& reference, double offset) {
  reference.validate();
  const double v = reference.visibility();
  if (!(v > 0.0)) {
    throw ConfigError("classical reference fringe has zero visibility");
  }
  return {Kind::classical, reference.omega_optical, v, offset};
}

double ReconstructedSignal::displacement(std::size_t i) const {
  return delay_to_displacement(tau_trace.at(i) - tau_mean, GeometryFactor{geometry});
}

double ReconstructedSignal::clamp_fraction() const {
  return tau_trace.empty() ? 0.0 : static_cast<double>(arccos_clamps) / static_cast<double>(tau_trace.size());
}

ReconstructedSignal reconstruct(const TimestampStream& first, const TimestampStream& second, double ratio,
                                const FringeInversion& inversion, GeometryFactor g,
                                std::vector<ComponentEstimate> components, const ReconstructOptions& options) {
  require_compatible(first, second);
  require_ratio(ratio);
  if (components.empty()) {
    throw ConfigError("reconstruction needs at least one component");
  }
  if (!(inversion.visibility > 0.0 && inversion.visibility <= 1.0) || !(inversion.scale > 0.0)) {
    throw ConfigError("reconstruction: visibility must lie in (0, 1] and the fringe scale be positive");
  }
  for (auto& c : components) {
    c.a_first = estimate_amplitudes(first, c.f_hat, c.theta_hat).amplitude;
    c.a_second = estimate_amplitudes(second, c.f_hat, c.theta_hat).amplitude;
  }
  const double t_exp = first.t_exp;
  return synthesize(static_cast<double>(first.size()) / t_exp, static_cast<double>(second.size()) / t_exp, ratio,
                    inversion, g.value(), t_exp, std::move(components), options);
}

ReconstructedSignal reconstruct(const TimestampStream& c, const TimestampStream& a, double ratio, double v0,
                                const PhotonPairSpec& pair, GeometryFactor g,
                                std::vector<ComponentEstimate> components, const ReconstructOptions& options) {
  if (!(v0 > 0.0 && v0 <= 1.0)) {
    throw ConfigError("reconstruction: V0 must lie in (0, 1]");
  }
  auto inversion = FringeInversion::quantum(pair);
  inversion.visibility = v0;
  return reconstruct(c, a, ratio, inversion, g, std::move(components), options);
}

double estimate_static_delay(const TimestampStream& c, const TimestampStream& a, double ratio,
                             const PhotonPairSpec& pair) {
  require_compatible(c, a);
  require_ratio(ratio);
  if (c.empty() && a.empty()) {
    throw AnalysisError("static delay: both streams are empty");
  }
  const auto inversion = FringeInversion::quantum(pair);
  const double nc = static_cast<double>(c.size());
  const double na = static_cast<double>(a.size());
  const double p = nc / (nc + ratio * na);
  return std::acos(std::clamp(inversion.argument(p), -1.0, 1.0)) / inversion.scale;
}

double calibrate_ratio(const TimestampStream& c_cal, const TimestampStream& a_cal, double known_p) {
  if (!(known_p > 0.0 && known_p < 1.0)) {
    throw ConfigError("calibration probability must lie in (0, 1)");
  }
  if (a_cal.empty()) {
    throw AnalysisError("calibration: zero anti-coincidence count");
  }
  const double nc = static_cast<double>(c_cal.size());
  const double na = static_cast<double>(a_cal.size());
  return (nc / known_p) / (na / (1.0 - known_p));
}

double component_displacement_pp(const ReconstructedSignal& full, std::size_t index,
                                 const ReconstructOptions& options) {
  const auto single = synthesize(full.a0_first, full.a0_second, full.ratio, full.inversion, full.geometry, full.t_exp,
                                 {full.components.at(index)}, options);
  return single.displacement_pp;
}

PipelineResult run_pipeline(const TimestampStream& first, const TimestampStream& second,
                            const FringeInversion& inversion, GeometryFactor g, const AnalysisOptions& options) {
  require_compatible(first, second);
  require_ratio(options.ratio);
  PipelineResult result;
  result.spectrum = combined_spectrum(first, second, options.ratio, options.f_max, options.window);
  auto& spec = result.spectrum;
  spec.p_fa = options.p_fa;
  spec.threshold_kappa = detection_threshold(first, second, options.ratio, options.window, options.p_fa, spec.size());
  spec.detected = detect_frequencies(spec);
  if (spec.detected.empty()) {
    return result;
  }
  std::vector<ComponentEstimate> comps;
  comps.reserve(spec.detected.size());
  for (double seed : spec.detected) {
    const auto refined = refine_frequency(first, second, options.ratio, seed, spec.df);
    ComponentEstimate c;
    c.f_hat = refined.frequency;
    c.converged = refined.converged;
    c.theta_hat = estimate_phase(first, second, options.ratio, c.f_hat);
    comps.push_back(c);
  }
  result.signal = reconstruct(first, second, options.ratio, inversion, g, std::move(comps), options.reconstruct);
  return result;
}

PipelineResult quantum_pipeline(const TimestampStream& c, const TimestampStream& a, const PhotonPairSpec& pair,
                                GeometryFactor g, const AnalysisOptions& options) {
  return run_pipeline(c, a, FringeInversion::quantum(pair), g, options);
}

PipelineResult classical_pipeline(const TimestampStream& p1, const TimestampStream& p2,
                                  const ClassicalFringeSpec& reference, GeometryFactor g,
                                  const AnalysisOptions& options, double reference_offset) {
  return run_pipeline(p1, p2, FringeInversion::classical(reference, reference_offset), g, options);
}

}  // namespace qvibe
