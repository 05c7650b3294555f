#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "qvibe/signal.hpp"

namespace qvibe {

enum class StreamTag : std::uint8_t { coincidence = 0, anticoincidence = 1, singles_port1 = 2, singles_port2 = 3 };

[[nodiscard]] std::string_view to_string(StreamTag tag);
/// Throws IoError on an unknown name.
[[nodiscard]] StreamTag stream_tag_from_string(std::string_view name);

/// Tagged detection times over one exposure, in integer ticks.
///
/// Ticks are sorted; duplicates are legal (several events quantized into the
/// same tick are kept as a multiset).
struct TimestampStream {
  StreamTag tag = StreamTag::coincidence;
  std::vector<std::uint64_t> ticks;
  std::uint64_t tick_ps = 100;
  double t_exp = 0.0;  ///< s

  [[nodiscard]] std::size_t size() const noexcept { return ticks.size(); }
  [[nodiscard]] bool empty() const noexcept { return ticks.empty(); }
  [[nodiscard]] double tick_duration() const noexcept { return static_cast<double>(tick_ps) * 1e-12; }
  [[nodiscard]] double time(std::size_t i) const noexcept {
    return static_cast<double>(ticks[i]) * tick_duration();
  }
  /// Throws ConfigError if unsorted, out of range or with a non-positive exposure.
  void validate() const;
};

enum class StreamFormat { text, binary };

/// `qvibe-ts v1 <tag> <tick_ps> <t_exp_s> <count>` followed by one tick per line.
void write_stream_text(const TimestampStream& stream, const std::filesystem::path& path);
/// Little-endian binary: 32-byte header then u64 ticks.
void write_stream_binary(const TimestampStream& stream, const std::filesystem::path& path);
void write_stream(const TimestampStream& stream, const std::filesystem::path& path, StreamFormat format);

/// Detects the format from the leading bytes. Throws IoError with the line
/// number (text) or byte offset (binary) of the first malformed record.
[[nodiscard]] TimestampStream read_stream(const std::filesystem::path& path);

/// Ground truth record: {components:[{f,app,phase}], tau_op, g}.
struct GroundTruth {
  std::vector<SinusoidComponent> components;
  double tau_op = 0.0;
  int g = 2;

  [[nodiscard]] VibrationSignal signal() const;
};

[[nodiscard]] std::string ground_truth_json(const GroundTruth& truth);
[[nodiscard]] GroundTruth parse_ground_truth(std::string_view json_text);
void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& path);
[[nodiscard]] GroundTruth read_ground_truth(const std::filesystem::path& path);

}  // namespace qvibe
