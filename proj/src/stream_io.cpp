#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qvibe/error.hpp"
#include "qvibe/stream.hpp"

namespace qvibe {

namespace {

constexpr std::string_view text_magic = "qvibe-ts";
constexpr std::array<char, 8> binary_magic = {'Q', 'V', 'I', 'B', 'E', 'T', 'S', '\0'};
constexpr std::uint8_t format_version = 1;
constexpr std::size_t binary_header_size = 32;

static_assert(std::endian::native == std::endian::little, "binary stream I/O assumes a little-endian host");

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
void put(std::string& out, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t offset) {
  T v;
  std::memcpy(&v, in.data() + offset, sizeof(T));
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

TimestampStream parse_text(const std::string& data, const std::string& name) {
  TimestampStream s;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= data.size()) {
      return false;
    }
    auto end = data.find('\n', pos);
    if (end == std::string::npos) {
      end = data.size();
    }
    line = std::string_view(data).substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    pos = end + 1;
    ++line_no;
    return true;
  };
  auto fail = [&](const std::string& msg) -> IoError {
    return IoError(name + ": line " + std::to_string(line_no) + ": " + msg);
  };

  std::string_view line;
  if (!next_line(line)) {
    throw IoError(name + ": empty file");
  }
  std::istringstream header{std::string(line)};
  std::string magic, version, tag;
  std::uint64_t tick_ps = 0, count = 0;
  std::string t_exp_text;
  if (!(header >> magic >> version >> tag >> tick_ps >> t_exp_text >> count) || magic != text_magic) {
    throw fail("malformed header, expected 'qvibe-ts v1 <tag> <tick_ps> <t_exp_s> <count>'");
  }
  std::string extra;
  if (header >> extra) {
    throw fail("trailing data in header");
  }
  if (version != "v1") {
    throw fail("unsupported version " + version);
  }
  try {
    s.tag = stream_tag_from_string(tag);
  } catch (const IoError& e) {
    throw fail(e.what());
  }
  s.tick_ps = tick_ps;
  char* endp = nullptr;
  s.t_exp = std::strtod(t_exp_text.c_str(), &endp);
  if (endp == t_exp_text.c_str() || *endp != '\0' || !(s.t_exp > 0.0)) {
    throw fail("invalid exposure '" + t_exp_text + "'");
  }
  if (tick_ps == 0) {
    throw fail("tick duration must be positive");
  }
  s.ticks.reserve(count);
  while (next_line(line)) {
    if (line.empty() && pos >= data.size()) {
      break;
    }
    std::uint64_t v = 0;
    const auto* first = line.data();
    const auto* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || line.empty()) {
      throw fail("invalid tick '" + std::string(line) + "'");
    }
    if (!s.ticks.empty() && v < s.ticks.back()) {
      throw fail("ticks not sorted");
    }
    if (static_cast<double>(v) * s.tick_duration() >= s.t_exp) {
      throw fail("tick beyond exposure");
    }
    s.ticks.push_back(v);
  }
  if (s.ticks.size() != count) {
    throw IoError(name + ": line " + std::to_string(line_no) + ": truncated stream, header announces " +
                  std::to_string(count) + " ticks but found " + std::to_string(s.ticks.size()));
  }
  return s;
}

TimestampStream parse_binary(const std::string& data, const std::string& name) {
  auto fail = [&](std::size_t offset, const std::string& msg) {
    return IoError(name + ": byte offset " + std::to_string(offset) + ": " + msg);
  };
  if (data.size() < binary_header_size) {
    throw fail(data.size(), "truncated header");
  }
  TimestampStream s;
  const auto version = get<std::uint8_t>(data, 8);
  const auto tag = get<std::uint8_t>(data, 9);
  if (version != format_version) {
    throw fail(8, "unsupported version " + std::to_string(version));
  }
  if (tag > 3) {
    throw fail(9, "unknown stream tag " + std::to_string(tag));
  }
  s.tag = static_cast<StreamTag>(tag);
  s.tick_ps = get<std::uint32_t>(data, 12);
  s.t_exp = get<double>(data, 16);
  const auto count = get<std::uint64_t>(data, 24);
  if (s.tick_ps == 0) {
    throw fail(12, "tick duration must be positive");
  }
  if (!(s.t_exp > 0.0) || !std::isfinite(s.t_exp)) {
    throw fail(16, "invalid exposure");
  }
  const std::size_t payload = data.size() - binary_header_size;
  if (payload % 8 != 0 || payload / 8 != count) {
    throw fail(binary_header_size + (payload / 8) * 8,
               "truncated stream, header announces " + std::to_string(count) + " ticks but payload holds " +
                   std::to_string(payload / 8));
  }
  s.ticks.resize(count);
  std::memcpy(s.ticks.data(), data.data() + binary_header_size, count * 8);
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0 && s.ticks[i] < s.ticks[i - 1]) {
      throw fail(binary_header_size + 8 * i, "ticks not sorted");
    }
    if (static_cast<double>(s.ticks[i]) * s.tick_duration() >= s.t_exp) {
      throw fail(binary_header_size + 8 * i, "tick beyond exposure");
    }
  }
  return s;
}

}  // namespace

std::string_view to_string(StreamTag tag) {
  switch (tag) {
    case StreamTag::coincidence:
      return "coincidence";
    case StreamTag::anticoincidence:
      return "anticoincidence";
    case StreamTag::singles_port1:
      return "singles_port1";
    case StreamTag::singles_port2:
      return "singles_port2";
  }
  return "unknown";
}

StreamTag stream_tag_from_string(std::string_view name) {
  for (auto tag : {StreamTag::coincidence, StreamTag::anticoincidence, StreamTag::singles_port1,
                   StreamTag::singles_port2}) {
    if (to_string(tag) == name) {
      return tag;
    }
  }
  throw IoError("unknown stream tag '" + std::string(name) + "'");
}

void TimestampStream::validate() const {
  if (!(t_exp > 0.0) || !std::isfinite(t_exp)) {
    throw ConfigError("stream: exposure must be positive");
  }
  if (tick_ps == 0) {
    throw ConfigError("stream: tick duration must be positive");
  }
  if (!std::is_sorted(ticks.begin(), ticks.end())) {
    throw ConfigError("stream: ticks must be sorted");
  }
  if (!ticks.empty() && static_cast<double>(ticks.back()) * tick_duration() >= t_exp) {
    throw ConfigError("stream: tick beyond exposure");
  }
}

void write_stream_text(const TimestampStream& stream, const std::filesystem::path& path) {
  std::string out;
  out.reserve(64 + stream.size() * 12);
  out += "qvibe-ts v1 ";
  out += to_string(stream.tag);
  out += ' ';
  out += std::to_string(stream.tick_ps);
  out += ' ';
  out += format_double(stream.t_exp);
  out += ' ';
  out += std::to_string(stream.size());
  out += '\n';
  char buf[24];
  for (auto t : stream.ticks) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, t);
    out.append(buf, ptr);
    out += '\n';
  }
  dump(path, out);
}

void write_stream_binary(const TimestampStream& stream, const std::filesystem::path& path) {
  if (stream.tick_ps > 0xFFFFFFFFull) {
    throw IoError("tick duration does not fit the binary header");
  }
  std::string out;
  out.reserve(binary_header_size + 8 * stream.size());
  out.append(binary_magic.data(), binary_magic.size());
  put<std::uint8_t>(out, format_version);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(stream.tag));
  put<std::uint16_t>(out, 0);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(stream.tick_ps));
  put<double>(out, stream.t_exp);
  put<std::uint64_t>(out, stream.size());
  out.append(reinterpret_cast<const char*>(stream.ticks.data()), 8 * stream.size());
  dump(path, out);
}

void write_stream(const TimestampStream& stream, const std::filesystem::path& path, StreamFormat format) {
  if (format == StreamFormat::binary) {
    write_stream_binary(stream, path);
  } else {
    write_stream_text(stream, path);
  }
}

TimestampStream read_stream(const std::filesystem::path& path) {
  const auto data = slurp(path);
  if (data.size() >= binary_magic.size() &&
      std::equal(binary_magic.begin(), binary_magic.end(), data.begin())) {
    return parse_binary(data, path.string());
  }
  return parse_text(data, path.string());
}

VibrationSignal GroundTruth::signal() const { return VibrationSignal::multi_tone(components, tau_op); }

std::string ground_truth_json(const GroundTruth& truth) {
  nlohmann::json j;
  j["components"] = nlohmann::json::array();
  for (const auto& c : truth.components) {
    j["components"].push_back({{"f", c.frequency}, {"app", c.amplitude_pp}, {"phase", c.phase}});
  }
  j["tau_op"] = truth.tau_op;
  j["g"] = truth.g;
  return j.dump(2) + "\n";
}

GroundTruth parse_ground_truth(std::string_view json_text) {
  GroundTruth truth;
  try {
    const auto j = nlohmann::json::parse(json_text);
    for (const auto& c : j.at("components")) {
      truth.components.push_back(
          {c.at("app").get<double>(), c.at("f").get<double>(), c.at("phase").get<double>()});
    }
    truth.tau_op = j.at("tau_op").get<double>();
    truth.g = j.at("g").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("ground truth: ") + e.what());
  }
  GeometryFactor{truth.g};
  return truth;
}

void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& path) {
  dump(path, ground_truth_json(truth));
}

GroundTruth read_ground_truth(const std::filesystem::path& path) { return parse_ground_truth(slurp(path)); }

}  // namespace qvibe
