#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "passconn/connectivity.hpp"

namespace passconn::glyph {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  auto operator<=>(const Rgb&) const = default;
  std::string hex() const;
};

// Colour used for the merged below-threshold sector.
inline constexpr Rgb other_color{0x9e, 0x9e, 0x9e};

class Palette {
 public:
  // Colour from the label value alone (hash to hue).
  static Rgb hashed(std::uint32_t label);
  // Hashed colours for `labels`, nudged along the hue circle where needed so
  // that every label gets a distinct colour (guaranteed for up to 64 labels).
  static Palette for_labels(std::span<const std::uint32_t> labels);

  void set(std::uint32_t label, Rgb color) { colors_[label] = color; }
  Rgb color(std::uint32_t label) const;

 private:
  std::map<std::uint32_t, Rgb> colors_;
};

struct Sector {
  std::uint32_t label = 0;  // 0 for the merged "other" sector
  double start_deg = 0.0;   // clockwise from 12 o'clock
  double sweep_deg = 0.0;
};

// Pie sectors for one matrix row (all M + 1 columns; column 0 is ignored).
// Regions whose share is below min_fraction are merged into a trailing
// "other" sector. Empty for a row with no target counts.
std::vector<Sector> pie_sectors(std::span<const std::int64_t> row, std::span<const std::uint32_t> labels,
                                double min_fraction);

enum class Axis { x = 0, y = 1, z = 2 };
Axis parse_axis(const std::string& text);

struct Options {
  Axis axis = Axis::z;
  int slice = 0;
  double min_fraction = 0.02;
  double pitch = 24.0;  // rendered voxel edge in SVG user units
  std::map<std::uint32_t, std::string> names;  // legend entries; no legend when empty
};

// SVG 1.1 document with one pie per in-slice source voxel that has target
// counts. Output is byte-stable for identical inputs.
std::string render_pie_glyphs(const ConnectivityMatrix& c, const LabelVolume& source, std::uint32_t source_label,
                              const Options& options, const Palette& palette);

// Lookup table with one `label<TAB>name` entry per line.
std::map<std::uint32_t, std::string> read_label_names(const std::filesystem::path& path);

}  // namespace passconn::glyph
