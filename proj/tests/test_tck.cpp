#include <doctest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>

#include "passconn/error.hpp"
#include "passconn/tck.hpp"

using namespace passconn;
namespace fs = std::filesystem;

namespace {

fs::path temp(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "passconn_test_tck";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

Tractogram sample() {
  Tractogram tg;
  int counter = 0;
  for (int n : {2, 5, 9}) {
    std::vector<Vec3> pts;
    for (int k = 0; k < n; ++k, ++counter) pts.emplace_back(0.1 * counter, -3.3 + counter, 1e3 / (counter + 1));
    tg.streamlines.emplace_back(pts);
  }
  tg.metadata["step_size_mm"] = "0.5";
  return tg;
}

// Header + payload built by hand in the requested byte order.
std::string encode(const Tractogram& tg, bool big_endian, const std::string& datatype) {
  std::string payload;
  auto put = [&](float v) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    for (int n = 0; n < 4; ++n) {
      const int shift = big_endian ? 8 * (3 - n) : 8 * n;
      payload.push_back(static_cast<char>((bits >> shift) & 0xFF));
    }
  };
  for (const auto& s : tg.streamlines) {
    for (const auto& p : s.points())
      for (int a = 0; a < 3; ++a) put(static_cast<float>(p[a]));
    for (int a = 0; a < 3; ++a) put(std::numeric_limits<float>::quiet_NaN());
  }
  for (int a = 0; a < 3; ++a) put(std::numeric_limits<float>::infinity());
  const std::string head = "mrtrix tracks\ndatatype: " + datatype + "\nfile: . 100\nEND\n";
  return head + std::string(100 - head.size(), ' ') + payload;
}

}  // namespace

TEST_CASE("tck round trip") {
  const auto tg = sample();
  const auto path = temp("rt.tck");
  tck::write(tg, path);
  const auto back = tck::read(path);
  REQUIRE(back.size() == 3);
  for (std::size_t n = 0; n < 3; ++n) {
    REQUIRE(back.streamlines[n].size() == tg.streamlines[n].size());
    for (std::size_t k = 0; k < tg.streamlines[n].size(); ++k)
      for (int a = 0; a < 3; ++a)
        CHECK(back.streamlines[n].points()[k][a] == static_cast<float>(tg.streamlines[n].points()[k][a]));
  }
  CHECK(back.metadata.at("step_size_mm") == "0.5");

  // write(read(write(x))) is byte-identical.
  const auto again = temp("rt2.tck");
  tck::write(back, again);
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("empty tractogram") {
  const auto path = temp("empty.tck");
  tck::write(Tractogram{}, path);
  CHECK(tck::read(path).empty());
}

TEST_CASE("big-endian payload reads like its little-endian twin") {
  const auto tg = sample();
  dump(temp("le.tck"), encode(tg, false, "Float32LE"));
  dump(temp("be.tck"), encode(tg, true, "Float32BE"));
  const auto le = tck::read(temp("le.tck"));
  const auto be = tck::read(temp("be.tck"));
  REQUIRE(le.size() == 3);
  CHECK(le.streamlines == be.streamlines);
}

TEST_CASE("repeated header keys survive a round trip") {
  Tractogram tg = sample();
  tg.metadata["command_history"] = "tckgen a b\ntckedit c d";
  tck::write(tg, temp("hist.tck"));
  CHECK(tck::read(temp("hist.tck")).metadata.at("command_history") == "tckgen a b\ntckedit c d");
}

TEST_CASE("tck error paths") {
  const auto good = encode(sample(), false, "Float32LE");
  SUBCASE("bad first line") {
    dump(temp("bad1.tck"), "mrtrix image\n" + good.substr(14));
    CHECK_THROWS_WITH_AS(tck::read(temp("bad1.tck")), doctest::Contains("line 1"), ParseError);
  }
  SUBCASE("malformed entry names the line") {
    std::string bytes = good;
    bytes.replace(bytes.find("file:"), 5, "file ");
    dump(temp("bad2.tck"), bytes);
    CHECK_THROWS_WITH_AS(tck::read(temp("bad2.tck")), doctest::Contains("line 3"), ParseError);
  }
  SUBCASE("truncated payload reports a byte offset") {
    dump(temp("trunc.tck"), good.substr(0, good.size() - 14));
    CHECK_THROWS_WITH_AS(tck::read(temp("trunc.tck")), doctest::Contains("byte"), ParseError);
  }
  SUBCASE("Float64 is unsupported") {
    dump(temp("f64.tck"), encode(sample(), false, "Float64LE"));
    CHECK_THROWS_AS(tck::read(temp("f64.tck")), UnsupportedFormat);
  }
  SUBCASE("stray NaN inside a point") {
    std::string bytes = good;
    const float nan = std::numeric_limits<float>::quiet_NaN();
    std::memcpy(bytes.data() + 100 + 4, &nan, 4);
    dump(temp("nan.tck"), bytes);
    CHECK_THROWS_WITH_AS(tck::read(temp("nan.tck")), doctest::Contains("byte 100"), ParseError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(tck::read(temp("none.tck")), ArgumentError); }
}
