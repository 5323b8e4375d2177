#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "passconn/error.hpp"
#include "passconn/glyph.hpp"

using namespace passconn;
using namespace passconn::glyph;

namespace {

double sweep_sum(const std::vector<Sector>& s) {
  double total = 0.0;
  for (const auto& x : s) total += x.sweep_deg;
  return total;
}

struct Fixture {
  LabelVolume source{GridShape({3, 2, 2}), Affine()};
  ConnectivityMatrix m;
  Fixture() {
    for (int i = 0; i < 3; ++i) source.set({i, 1, 0}, 1);
    source.set({0, 0, 1}, 1);
    m = ConnectivityMatrix({{0, 1, 0}, {1, 1, 0}, {2, 1, 0}, {0, 0, 1}}, {10, 20});
    const std::vector<std::vector<std::int64_t>> rows{{0, 50, 50}, {0, 30, 10}, {9, 0, 0}, {0, 1, 1}};
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 3; ++c) m.at(r, c) = rows[r][c];
  }
};

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("pie sector arithmetic") {
  const std::vector<std::uint32_t> labels{7, 9};
  const std::vector<std::int64_t> row{0, 30, 10};
  const auto s = pie_sectors(row, labels, 0.02);
  REQUIRE(s.size() == 2);
  CHECK(s[0].label == 7);
  CHECK(s[0].sweep_deg == doctest::Approx(270.0));
  CHECK(s[1].label == 9);
  CHECK(s[1].sweep_deg == doctest::Approx(90.0));
  CHECK(pie_sectors(std::vector<std::int64_t>{5, 0, 0}, labels, 0.02).empty());

  const std::vector<std::uint32_t> five{1, 2, 3, 4, 5};
  const auto merged = pie_sectors(std::vector<std::int64_t>{0, 500, 400, 5, 3, 92}, five, 0.02);
  REQUIRE(merged.size() == 4);
  CHECK(merged.back().label == 0);
  CHECK(merged.back().sweep_deg == doctest::Approx(360.0 * 8 / 1000));
}

TEST_CASE("sector sweeps sum to 360 degrees") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> v(0, 1000);
  std::vector<std::uint32_t> labels;
  for (std::uint32_t l = 1; l <= 40; ++l) labels.push_back(l * 3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::int64_t> row(labels.size() + 1);
    for (auto& x : row) x = v(rng) < 700 ? 0 : v(rng);
    row[1 + trial % labels.size()] += 1;
    const auto s = pie_sectors(row, labels, 0.02);
    CHECK(std::abs(sweep_sum(s) - 360.0) <= 1e-6);
  }
}

TEST_CASE("default palette is distinct for 64 labels") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::set<std::uint32_t> chosen;
    while (chosen.size() < 64) chosen.insert(static_cast<std::uint32_t>(rng() % (trial < 10 ? 100000 : 200)) + 1);
    const std::vector<std::uint32_t> labels(chosen.begin(), chosen.end());
    const auto pal = Palette::for_labels(labels);
    std::set<Rgb> colors;
    for (auto l : labels) colors.insert(pal.color(l));
    CHECK(colors.size() == 64);
    CHECK(colors.count(other_color) == 0);
  }
  CHECK(Palette::hashed(42) == Palette::hashed(42));
  CHECK(Rgb{0x9e, 0x9e, 0x9e}.hex() == "#9e9e9e");
}

TEST_CASE("render_pie_glyphs") {
  Fixture f;
  const auto pal = Palette::for_labels(f.m.labels());
  Options o;
  o.axis = Axis::z;
  o.slice = 0;
  const auto svg = render_pie_glyphs(f.m, f.source, 1, o, pal);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count(svg, "data-label=") == 4);  // 180/180 and 270/90; the zero row draws nothing
  CHECK(count(svg, "data-sweep=\"180.000\"") == 2);
  CHECK(count(svg, "data-sweep=\"270.000\"") == 1);
  CHECK(count(svg, "data-sweep=\"90.000\"") == 1);
  CHECK(svg.find(" A 10.800 10.800 ") != std::string::npos);  // radius 0.45 * 24
  CHECK(render_pie_glyphs(f.m, f.source, 1, o, pal) == svg);
  CHECK(svg.find("legend") == std::string::npos);

  o.names = {{10, "left"}, {20, "right"}};
  const auto with_legend = render_pie_glyphs(f.m, f.source, 1, o, pal);
  CHECK(with_legend.find(">left<") != std::string::npos);

  o.slice = 1;
  CHECK(count(render_pie_glyphs(f.m, f.source, 1, o, pal), "data-sweep=\"180.000\"") == 2);
  o.slice = 2;
  CHECK_THROWS_AS(render_pie_glyphs(f.m, f.source, 1, o, pal), ArgumentError);
  o.slice = -1;
  CHECK_THROWS_AS(render_pie_glyphs(f.m, f.source, 1, o, pal), ArgumentError);
  CHECK_THROWS_AS(parse_axis("w"), ArgumentError);
}

TEST_CASE("label names file") {
  const auto path = std::filesystem::temp_directory_path() / "passconn_names.tsv";
  std::ofstream(path) << "10\tleft cortex\n20\tright\n";
  const auto names = read_label_names(path);
  CHECK(names.at(10) == "left cortex");
  CHECK(names.at(20) == "right");
  std::ofstream(path) << "ten\tleft\n";
  CHECK_THROWS_WITH_AS(read_label_names(path), doctest::Contains("line 1"), ParseError);
}
