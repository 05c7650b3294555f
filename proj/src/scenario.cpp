#include "qvibe/scenario.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qvibe/error.hpp"

namespace qvibe {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    parts.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) {
      return parts;
    }
    start = comma + 1;
  }
}

struct Unit {
  std::string_view name;
  double factor;
};

constexpr std::array frequency_units{Unit{"Hz", 1.0}, Unit{"kHz", 1e3}, Unit{"MHz", 1e6}, Unit{"GHz", 1e9},
                                     Unit{"THz", 1e12}};
constexpr std::array length_units{Unit{"m", 1.0},    Unit{"mm", 1e-3},  Unit{"um", 1e-6},
                                  Unit{"nm", 1e-9},  Unit{"pm", 1e-12}};
constexpr std::array time_units{Unit{"s", 1.0},    Unit{"ms", 1e-3},  Unit{"us", 1e-6}, Unit{"ns", 1e-9},
                                Unit{"ps", 1e-12}, Unit{"fs", 1e-15}, Unit{"as", 1e-18}};
constexpr std::array angle_units{Unit{"rad", 1.0}, Unit{"deg", pi / 180.0}};
constexpr std::array rate_units{Unit{"/s", 1.0}, Unit{"k/s", 1e3}, Unit{"M/s", 1e6}};

std::string_view dimension_name(Dimension dim) {
  switch (dim) {
    case Dimension::none: return "a plain number";
    case Dimension::frequency: return "a frequency (Hz, kHz, MHz, GHz, THz)";
    case Dimension::length: return "a length (m, mm, um, nm, pm)";
    case Dimension::time: return "a time (s, ms, us, ns, ps, fs, as)";
    case Dimension::angle: return "an angle (rad, deg)";
    case Dimension::rate: return "a rate (/s, k/s, M/s)";
  }
  return "?";
}

template <std::size_t N>
bool lookup(const std::array<Unit, N>& units, std::string_view name, double& factor) {
  for (const auto& u : units) {
    if (u.name == name) {
      factor = u.factor;
      return true;
    }
  }
  return false;
}

bool unit_factor(Dimension dim, std::string_view unit, double& factor) {
  switch (dim) {
    case Dimension::none: return false;
    case Dimension::frequency: return lookup(frequency_units, unit, factor);
    case Dimension::length: return lookup(length_units, unit, factor);
    case Dimension::time: return lookup(time_units, unit, factor);
    case Dimension::angle: return lookup(angle_units, unit, factor);
    case Dimension::rate: return lookup(rate_units, unit, factor);
  }
  return false;
}

std::uint64_t parse_u64(std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "yes" || text == "1") {
    return true;
  }
  if (text == "false" || text == "no" || text == "0") {
    return false;
  }
  throw ConfigError("expected true or false, got '" + std::string(text) + "'");
}

double parse_operating_delay(std::string_view text) {
  return trim(text) == "quadrature" ? -1.0 : parse_quantity(text, Dimension::time);
}

void apply_pair(ScenarioConfig& c, std::string_view key, std::string_view v) {
  if (key == "detuning") {
    c.pair.delta_omega = two_pi * parse_quantity(v, Dimension::frequency);
  } else if (key == "bandwidth") {
    c.pair.sigma = two_pi * parse_quantity(v, Dimension::frequency);
  } else if (key == "visibility") {
    c.pair.visibility = parse_quantity(v, Dimension::none);
  } else if (key == "lambda_1") {
    c.pair.lambda_1 = parse_quantity(v, Dimension::length);
  } else if (key == "lambda_2") {
    c.pair.lambda_2 = parse_quantity(v, Dimension::length);
  } else {
    throw ConfigError("unknown key");
  }
}

void apply_classical(ScenarioConfig& c, std::string_view key, std::string_view v) {
  if (key == "wavelength") {
    const double wl = parse_quantity(v, Dimension::length);
    if (!(wl > 0.0)) {
      throw ConfigError("wavelength must be positive");
    }
    c.classical.omega_optical = two_pi * speed_of_light / wl;
  } else if (key == "arm_ratio") {
    c.classical.arm_intensity_ratio = parse_quantity(v, Dimension::none);
  } else if (key == "phase_offset") {
    if (trim(v) == "quadrature") {
      c.classical_quadrature = true;
    } else {
      c.classical_quadrature = false;
      c.classical.phase_offset = parse_quantity(v, Dimension::angle);
    }
  } else {
    throw ConfigError("unknown key");
  }
}

void apply_channel(ScenarioConfig& c, std::string_view key, std::string_view v) {
  auto& ch = c.channel;
  if (key == "loss") {
    ch.loss_b = parse_quantity(v, Dimension::none);
  } else if (key == "background") {
    ch.background = parse_quantity(v, Dimension::none);
  } else if (key == "coincidence_window") {
    ch.coincidence_window = parse_quantity(v, Dimension::time);
  } else if (key == "rate") {
    ch.rate_c = ch.rate_a = parse_quantity(v, Dimension::rate);
  } else if (key == "rate_c") {
    ch.rate_c = parse_quantity(v, Dimension::rate);
  } else if (key == "rate_a") {
    ch.rate_a = parse_quantity(v, Dimension::rate);
  } else if (key == "singles_rate") {
    ch.singles_rate = parse_quantity(v, Dimension::rate);
  } else if (key == "detector_singles") {
    ch.detector_singles = parse_quantity(v, Dimension::rate);
  } else if (key == "geometry") {
    ch.geometry = GeometryFactor(static_cast<int>(parse_u64(v)));
  } else if (key == "tick") {
    const double ps = parse_quantity(v, Dimension::time) * 1e12;
    const double rounded = std::round(ps);
    if (!(rounded >= 1.0) || std::abs(ps - rounded) > 1e-6 * rounded) {
      throw ConfigError("tick must be a whole number of picoseconds");
    }
    ch.tick_ps = static_cast<std::uint64_t>(rounded);
  } else {
    throw ConfigError("unknown key");
  }
}

void apply_signal(ScenarioConfig& c, std::string_view key, std::string_view v) {
  auto& s = c.signal;
  if (key == "kind") {
    const auto kind = trim(v);
    if (kind != "none" && kind != "tone" && kind != "multi" && kind != "square" && kind != "alternating") {
      throw ConfigError("kind must be none, tone, multi, square or alternating");
    }
    s.kind = std::string(kind);
  } else if (key == "frequency") {
    s.frequency = parse_quantity(v, Dimension::frequency);
  } else if (key == "amplitude") {
    s.amplitude_pp = parse_quantity(v, Dimension::length);
  } else if (key == "phase") {
    s.phase = parse_quantity(v, Dimension::angle);
  } else if (key == "component") {
    const auto parts = split_commas(v);
    if (parts.size() < 2 || parts.size() > 3) {
      throw ConfigError("component needs 'frequency, amplitude[, phase]'");
    }
    SinusoidComponent comp;
    comp.frequency = parse_quantity(parts[0], Dimension::frequency);
    comp.amplitude_pp = parse_quantity(parts[1], Dimension::length);
    comp.phase = parts.size() == 3 ? parse_quantity(parts[2], Dimension::angle) : 0.0;
    s.components.push_back(comp);
  } else if (key == "harmonics") {
    s.harmonics = static_cast<int>(parse_u64(v));
  } else if (key == "gate") {
    s.gate = parse_quantity(v, Dimension::frequency);
  } else if (key == "frequency_a") {
    s.frequency_a = parse_quantity(v, Dimension::frequency);
  } else if (key == "amplitude_a") {
    s.amplitude_a = parse_quantity(v, Dimension::length);
  } else if (key == "frequency_b") {
    s.frequency_b = parse_quantity(v, Dimension::frequency);
  } else if (key == "amplitude_b") {
    s.amplitude_b = parse_quantity(v, Dimension::length);
  } else if (key == "playback_scale") {
    s.playback_scale = parse_quantity(v, Dimension::none);
  } else if (key == "operating_delay") {
    s.operating_delay = parse_operating_delay(v);
  } else {
    throw ConfigError("unknown key");
  }
}

void apply_analysis(ScenarioConfig& c, std::string_view key, std::string_view v) {
  auto& a = c.analysis;
  if (key == "p_fa") {
    a.p_fa = parse_quantity(v, Dimension::none);
  } else if (key == "f_max") {
    a.f_max = parse_quantity(v, Dimension::frequency);
  } else if (key == "window") {
    const auto w = trim(v);
    if (w == "hann") {
      a.window = Window::hann;
    } else if (w == "rectangular") {
      a.window = Window::rectangular;
    } else {
      throw ConfigError("window must be hann or rectangular");
    }
  } else if (key == "ratio") {
    a.ratio = parse_quantity(v, Dimension::none);
  } else if (key == "samples_per_period") {
    a.reconstruct.samples_per_period = static_cast<int>(parse_u64(v));
  } else if (key == "max_samples") {
    a.reconstruct.max_samples = parse_u64(v);
  } else if (key == "span") {
    a.reconstruct.span = parse_quantity(v, Dimension::time);
  } else {
    throw ConfigError("unknown key");
  }
}

void apply_run(ScenarioConfig& c, std::string_view key, std::string_view v) {
  if (key == "mode") {
    const auto m = trim(v);
    if (m == "quantum") {
      c.mode = Mode::quantum;
    } else if (m == "classical") {
      c.mode = Mode::classical;
    } else {
      throw ConfigError("mode must be quantum or classical");
    }
  } else if (key == "exposure") {
    c.exposure = parse_quantity(v, Dimension::time);
  } else if (key == "seed") {
    c.seed = parse_u64(v);
  } else if (key == "stream_format") {
    const auto f = trim(v);
    if (f == "text") {
      c.stream_format = StreamFormat::text;
    } else if (f == "binary") {
      c.stream_format = StreamFormat::binary;
    } else {
      throw ConfigError("stream_format must be text or binary");
    }
  } else if (key == "format") {
    const auto f = trim(v);
    if (f == "json") {
      c.report_format = ReportFormat::json;
    } else if (f == "csv") {
      c.report_format = ReportFormat::csv;
    } else {
      throw ConfigError("format must be json or csv");
    }
  } else if (key == "out") {
    c.out_dir = std::string(trim(v));
  } else {
    throw ConfigError("unknown key");
  }
}

void apply_trials(ScenarioConfig& c, std::string_view key, std::string_view v) {
  if (key == "count") {
    c.trials = parse_u64(v);
  } else if (key == "amplitude") {
    c.trial_amplitudes.push_back(parse_quantity(v, Dimension::length));
  } else {
    throw ConfigError("unknown key");
  }
}

void apply_sweep(ScenarioConfig& c, std::string_view key, std::string_view v) {
  auto& s = c.sweep;
  if (key == "frequency") {
    s.frequencies.push_back(parse_quantity(v, Dimension::frequency));
  } else if (key == "range") {
    const auto parts = split_commas(v);
    if (parts.size() != 3) {
      throw ConfigError("range needs 'start, stop, step'");
    }
    const double start = parse_quantity(parts[0], Dimension::frequency);
    const double stop = parse_quantity(parts[1], Dimension::frequency);
    const double step = parse_quantity(parts[2], Dimension::frequency);
    if (!(step > 0.0) || !(stop >= start)) {
      throw ConfigError("range needs step > 0 and stop >= start");
    }
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
      s.frequencies.push_back(start + static_cast<double>(i) * step);
    }
  } else if (key == "amplitude") {
    s.amplitudes_pp.push_back(parse_quantity(v, Dimension::length));
  } else if (key == "exposure") {
    s.exposure = parse_quantity(v, Dimension::time);
  } else if (key == "playback_scale") {
    s.playback_scale = parse_quantity(v, Dimension::none);
  } else {
    throw ConfigError("unknown key");
  }
}

void apply_advantage(ScenarioConfig& c, std::string_view key, std::string_view v) {
  if (key == "condition") {
    const auto parts = split_commas(v);
    if (parts.size() != 2) {
      throw ConfigError("condition needs 'loss, background'");
    }
    c.conditions.push_back({parse_quantity(parts[0], Dimension::none), parse_quantity(parts[1], Dimension::none)});
  } else if (key == "quantum_exposure") {
    c.quantum_exposure = parse_quantity(v, Dimension::time);
  } else if (key == "classical_exposure") {
    c.classical_exposure = parse_quantity(v, Dimension::time);
  } else if (key == "count_equalization") {
    c.count_equalization = parse_bool(v);
  } else if (key == "fundamental") {
    c.fundamental = parse_quantity(v, Dimension::frequency);
  } else {
    throw ConfigError("unknown key");
  }
}

void apply_qcrb(ScenarioConfig& c, std::string_view key, std::string_view v) {
  if (key == "pairs") {
    c.qcrb_pairs.push_back(parse_quantity(v, Dimension::none));
  } else if (key == "trials") {
    c.qcrb_trials = parse_u64(v);
  } else {
    throw ConfigError("unknown key");
  }
}

std::string json_scalar_text(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) {
    return v.get<std::string>();
  }
  if (v.is_boolean()) {
    return v.get<bool>() ? "true" : "false";
  }
  if (v.is_number_unsigned()) {
    return std::to_string(v.get<std::uint64_t>());
  }
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  throw ConfigError(where + ": expected a string, number or boolean");
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::quantum ? "quantum" : "classical"; }

std::string_view to_string(ReportFormat format) { return format == ReportFormat::json ? "json" : "csv"; }

double parse_quantity(std::string_view text, Dimension dim) {
  const auto t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || t.empty()) {
    throw ConfigError("expected " + std::string(dimension_name(dim)) + ", got '" + std::string(t) + "'");
  }
  const auto unit = trim(std::string_view(ptr, static_cast<std::size_t>(t.data() + t.size() - ptr)));
  if (!std::isfinite(value)) {
    throw ConfigError("non-finite value '" + std::string(t) + "'");
  }
  if (dim == Dimension::none) {
    if (!unit.empty()) {
      throw ConfigError("expected a plain number, got '" + std::string(t) + "'");
    }
    return value;
  }
  double factor = 0.0;
  if (unit.empty() || !unit_factor(dim, unit, factor)) {
    throw ConfigError("expected " + std::string(dimension_name(dim)) + ", got '" + std::string(t) + "'");
  }
  return value * factor;
}

void apply_setting(ScenarioConfig& config, std::string_view section, std::string_view key, std::string_view value) {
  key = trim(key);
  section = trim(section);
  try {
    // An empty value resets a repeatable key, so overrides can replace a list.
    if (trim(value).empty()) {
      if (section == "signal" && key == "component") {
        config.signal.components.clear();
        return;
      }
      if (section == "trials" && key == "amplitude") {
        config.trial_amplitudes.clear();
        return;
      }
      if (section == "sweep" && (key == "frequency" || key == "range")) {
        config.sweep.frequencies.clear();
        return;
      }
      if (section == "sweep" && key == "amplitude") {
        config.sweep.amplitudes_pp.clear();
        return;
      }
      if (section == "advantage" && key == "condition") {
        config.conditions.clear();
        return;
      }
      if (section == "qcrb" && key == "pairs") {
        config.qcrb_pairs.clear();
        return;
      }
    }
    if (section == "pair") {
      apply_pair(config, key, value);
    } else if (section == "classical") {
      apply_classical(config, key, value);
    } else if (section == "channel") {
      apply_channel(config, key, value);
    } else if (section == "signal") {
      apply_signal(config, key, value);
    } else if (section == "analysis") {
      apply_analysis(config, key, value);
    } else if (section == "run") {
      apply_run(config, key, value);
    } else if (section == "trials") {
      apply_trials(config, key, value);
    } else if (section == "sweep") {
      apply_sweep(config, key, value);
    } else if (section == "advantage") {
      apply_advantage(config, key, value);
    } else if (section == "qcrb") {
      apply_qcrb(config, key, value);
    } else {
      throw ConfigError("unknown section [" + std::string(section) + "]");
    }
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(section) + "." + std::string(key) + ": " + e.what());
  }
}

void apply_setting(ScenarioConfig& config, std::string_view dotted_key, std::string_view value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string_view::npos) {
    throw ConfigError("setting '" + std::string(dotted_key) + "' must be written section.key");
  }
  apply_setting(config, dotted_key.substr(0, dot), dotted_key.substr(dot + 1), value);
}

ScenarioConfig parse_scenario_ini(std::string_view text) {
  ScenarioConfig config;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(where + "malformed section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + "expected key = value");
    }
    if (section.empty()) {
      throw ConfigError(where + "setting outside of a section");
    }
    try {
      apply_setting(config, section, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return config;
}

ScenarioConfig parse_scenario_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("scenario JSON: top level must be an object of sections");
  }
  ScenarioConfig config;
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object()) {
      throw ConfigError("scenario JSON: section '" + section + "' must be an object");
    }
    for (const auto& [key, value] : body.items()) {
      const std::string where = section + "." + key;
      if (value.is_array()) {
        for (const auto& item : value) {
          apply_setting(config, section, key, json_scalar_text(item, where));
        }
      } else {
        apply_setting(config, section, key, json_scalar_text(value, where));
      }
    }
  }
  return config;
}

ScenarioConfig parse_scenario(std::string_view text) {
  const auto t = trim(text);
  if (!t.empty() && t.front() == '{') {
    return parse_scenario_json(text);
  }
  return parse_scenario_ini(text);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open scenario file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ScenarioConfig::ScenarioConfig() {
  pair.visibility = 0.9;
  analysis.f_max = 1e3;
}

double ScenarioConfig::operating_delay() const {
  return signal.operating_delay < 0.0 ? quadrature_delay(pair) : signal.operating_delay;
}

VibrationSignal ScenarioConfig::build_signal() const {
  const double tau = operating_delay();
  const auto& s = signal;
  VibrationSignal out;
  if (s.kind == "none") {
    out = VibrationSignal::multi_tone({}, tau);
  } else if (s.kind == "tone") {
    out = VibrationSignal::pure_tone(s.frequency, s.amplitude_pp, s.phase, tau);
  } else if (s.kind == "multi") {
    if (s.components.empty()) {
      throw ConfigError("signal: kind = multi needs at least one component");
    }
    out = VibrationSignal::multi_tone(s.components, tau);
  } else if (s.kind == "square") {
    out = VibrationSignal::square_wave(s.frequency, s.amplitude_pp, s.harmonics, tau);
  } else if (s.kind == "alternating") {
    out = VibrationSignal::alternating_tones(s.gate, s.frequency_a, s.amplitude_a, s.frequency_b, s.amplitude_b,
                                             s.harmonics, tau);
  } else {
    throw ConfigError("signal: unknown kind '" + s.kind + "'");
  }
  if (s.playback_scale != 1.0) {
    if (!(s.playback_scale > 0.0)) {
      throw ConfigError("signal: playback_scale must be positive");
    }
    out = out.with_frequency_scale(s.playback_scale);
  }
  return out;
}

ClassicalFringeSpec ScenarioConfig::classical_reference() const {
  auto ref = classical;
  if (classical_quadrature) {
    ref.phase_offset = classical_quadrature_offset(ref.omega_optical, operating_delay());
  }
  return ref;
}

QuantumScenario ScenarioConfig::quantum_scenario() const {
  QuantumScenario s;
  s.pair = pair;
  s.channel = channel;
  s.signal = build_signal();
  s.exposure = exposure;
  s.analysis = analysis;
  return s;
}

AdvantagePlan ScenarioConfig::advantage_plan() const {
  AdvantagePlan plan;
  plan.pair = pair;
  plan.classical_reference = classical_reference();
  plan.quantum_channel = channel;
  plan.classical_channel = channel;
  plan.signal = build_signal();
  plan.fundamental = fundamental > 0.0 ? fundamental : plan.signal.lowest_frequency();
  plan.quantum_exposure = quantum_exposure;
  plan.classical_exposure = classical_exposure;
  plan.count_equalization = count_equalization;
  plan.conditions = conditions;
  plan.analysis = analysis;
  return plan;
}

void ScenarioConfig::validate() const {
  pair.validate();
  classical_reference().validate();
  channel.validate();
  build_signal().validate();
  if (!(exposure > 0.0)) {
    throw ConfigError("run.exposure must be positive");
  }
  if (!(analysis.p_fa > 0.0 && analysis.p_fa < 1.0)) {
    throw ConfigError("analysis.p_fa must lie in (0, 1)");
  }
  if (!(analysis.f_max > 0.0)) {
    throw ConfigError("analysis.f_max must be positive");
  }
  if (!(analysis.ratio > 0.0)) {
    throw ConfigError("analysis.ratio must be positive");
  }
  if (analysis.reconstruct.samples_per_period < 2) {
    throw ConfigError("analysis.samples_per_period must be at least 2");
  }
  for (const auto& c : conditions) {
    AdvantageCondition probe = c;
    ChannelModel ch = channel;
    ch.loss_b = probe.loss;
    ch.background = probe.background;
    ch.validate();
  }
}

}  // namespace qvibe
