#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "passconn/error.hpp"
#include "passconn/matrix_io.hpp"

using namespace passconn;
namespace fs = std::filesystem;

namespace {

fs::path temp(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "passconn_test_matrix";
  fs::create_directories(dir);
  return dir / name;
}

ConnectivityMatrix sample() {
  ConnectivityMatrix m({{4, 5, 6}, {0, 0, 0}, {31, 2, 7}}, {3, 17, 4000000000u});
  std::int64_t v = 0;
  for (auto& c : m.counts()) c = (v++ * 977) % 1013;
  m.at(2, 3) = std::numeric_limits<std::int64_t>::max();
  return m;
}

void dump(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("CSV round trip with sidecar") {
  const auto m = sample();
  const auto path = temp("c.csv");
  matrix_io::write(m, path);
  CHECK(matrix_io::rows_path(path) == temp("c.rows.csv"));
  CHECK(fs::exists(temp("c.rows.csv")));
  const auto back = matrix_io::read(path);
  CHECK(back == m);
  CHECK(back.row_voxels() == m.row_voxels());
  CHECK(back.labels() == m.labels());

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "unassigned,3,17,4000000000");
}

TEST_CASE("binary round trip") {
  const auto m = sample();
  matrix_io::write(m, temp("c.bin"));
  std::ifstream in(temp("c.bin"), std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  CHECK(std::string(magic, 8) == "PCONNMAT");
  CHECK(fs::file_size(temp("c.bin")) == 8 + 4 + 4 + 8 + 4 * 3 + 4 * 9 + 8 * 12);
  CHECK(matrix_io::read(temp("c.bin")) == m);
}

TEST_CASE("matrix parse errors") {
  matrix_io::write(sample(), temp("e.csv"));
  SUBCASE("bad header") {
    dump(temp("e.csv"), "region,3,17,4000000000\n");
    CHECK_THROWS_WITH_AS(matrix_io::read(temp("e.csv")), doctest::Contains("line 1"), ParseError);
  }
  SUBCASE("bad integer") {
    dump(temp("e.csv"), "unassigned,3,17,4000000000\n1,2,x,4\n");
    CHECK_THROWS_WITH_AS(matrix_io::read(temp("e.csv")), doctest::Contains("line 2"), ParseError);
  }
  SUBCASE("row count mismatch") {
    dump(temp("e.csv"), "unassigned,3,17,4000000000\n1,2,3,4\n");
    CHECK_THROWS_AS(matrix_io::read(temp("e.csv")), ParseError);
  }
  SUBCASE("truncated binary") {
    matrix_io::write(sample(), temp("t.bin"));
    fs::resize_file(temp("t.bin"), 40);
    CHECK_THROWS_AS(matrix_io::read(temp("t.bin")), ParseError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(matrix_io::read(temp("nope.csv")), ArgumentError); }
}
