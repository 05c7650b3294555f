#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "qvibe/error.hpp"
#include "qvibe/stream.hpp"

using namespace qvibe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "qvibe_test_stream_io";
  fs::create_directories(dir);
  return dir / name;
}

TimestampStream sample_stream() {
  TimestampStream s;
  s.tag = StreamTag::anticoincidence;
  s.tick_ps = 100;
  s.t_exp = 0.1234567890123;
  s.ticks = {0, 5, 5, 17, 999, 1'234'567'000ULL};
  return s;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string error_of(const fs::path& p) {
  try {
    (void)read_stream(p);
  } catch (const IoError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("text and binary round trips are lossless") {
  const auto s = sample_stream();
  for (auto fmt : {StreamFormat::text, StreamFormat::binary}) {
    const auto p = scratch(fmt == StreamFormat::text ? "rt.txt" : "rt.bin");
    write_stream(s, p, fmt);
    const auto r = read_stream(p);
    CHECK(r.tag == s.tag);
    CHECK(r.tick_ps == s.tick_ps);
    CHECK(r.t_exp == s.t_exp);
    CHECK(r.ticks == s.ticks);
  }
}

TEST_CASE("binary layout: 32-byte header then little-endian ticks") {
  const auto s = sample_stream();
  const auto p = scratch("layout.bin");
  write_stream_binary(s, p);
  CHECK(fs::file_size(p) == 32 + 8 * s.size());
  std::ifstream in(p, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  CHECK(std::string(magic, 7) == "QVIBETS");
}

TEST_CASE("truncated binary stream reports the byte offset") {
  const auto s = sample_stream();
  const auto p = scratch("trunc.bin");
  write_stream_binary(s, p);
  fs::resize_file(p, 32 + 8 * 3 + 4);
  const auto msg = error_of(p);
  CHECK(msg.find("offset") != std::string::npos);
  fs::resize_file(p, 20);
  CHECK(error_of(p).find("offset") != std::string::npos);
}

TEST_CASE("malformed text stream reports the line number") {
  const auto p = scratch("bad.txt");
  write_file(p, "qvibe-ts v1 coincidence 100 1 3\n10\n2x0\n30\n");
  CHECK(error_of(p).find("line 3") != std::string::npos);
  write_file(p, "qvibe-ts v1 coincidence 100 1 3\n10\n20\n");
  CHECK(error_of(p).find("line") != std::string::npos);
  write_file(p, "qvibe-ts v1 photons 100 1 0\n");
  CHECK_FALSE(error_of(p).empty());
  write_file(p, "qvibe-ts v1 coincidence 100 1 2\n20\n10\n");
  CHECK(error_of(p).find("line 3") != std::string::npos);  // unsorted
  write_file(p, "qvibe-ts v1 coincidence 100 1 1\n20000000000\n");
  CHECK_FALSE(error_of(p).empty());  // beyond the exposure
  write_file(p, "hello\n");
  CHECK(error_of(p).find("line 1") != std::string::npos);
}

TEST_CASE("missing file and unknown tag") {
  CHECK_THROWS_AS((void)read_stream(scratch("does_not_exist")), IoError);
  CHECK_THROWS_AS((void)stream_tag_from_string("photons"), IoError);
  CHECK(stream_tag_from_string("singles_port2") == StreamTag::singles_port2);
  CHECK(to_string(StreamTag::coincidence) == "coincidence");
}

TEST_CASE("stream validation") {
  auto s = sample_stream();
  CHECK_NOTHROW(s.validate());
  s.ticks = {5, 4};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = sample_stream();
  s.t_exp = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("ground truth JSON round trip") {
  GroundTruth t;
  t.components = {{55e-9, 10.0, -1.2345678901234567}, {1e-9, 30.000000001, 0.1}};
  t.tau_op = 1.4124293785310734e-15;
  t.g = 1;
  const auto text = ground_truth_json(t);
  const auto r = parse_ground_truth(text);
  REQUIRE(r.components.size() == 2);
  CHECK(r.components[0].amplitude_pp == t.components[0].amplitude_pp);
  CHECK(r.components[0].phase == t.components[0].phase);
  CHECK(r.components[1].frequency == t.components[1].frequency);
  CHECK(r.tau_op == t.tau_op);
  CHECK(r.g == 1);
  CHECK(ground_truth_json(r) == text);
  const auto p = scratch("truth.json");
  write_ground_truth(t, p);
  CHECK(read_ground_truth(p).tau_op == t.tau_op);
  CHECK_THROWS((void)parse_ground_truth("{\"components\": 3}"));
}
