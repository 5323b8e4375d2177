#include "passconn/glyph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "passconn/error.hpp"
#include "passconn/random.hpp"

namespace passconn::glyph {
namespace {

Rgb hsv(double h, double s, double v) {
  h = (h - std::floor(h)) * 6.0;
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = v, g = t, b = p; break;
    case 1: r = q, g = v, b = p; break;
    case 2: r = p, g = v, b = t; break;
    case 3: r = p, g = q, b = v; break;
    case 4: r = t, g = p, b = v; break;
    default: r = v, g = p, b = q; break;
  }
  auto byte = [](double x) { return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)); };
  return {byte(r), byte(g), byte(b)};
}

double hash_hue(std::uint32_t label) { return static_cast<double>(mix64(label) >> 11) * 0x1.0p-53; }

constexpr double saturation = 0.65;
constexpr double value = 0.90;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string Rgb::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

Rgb Palette::hashed(std::uint32_t label) { return hsv(hash_hue(label), saturation, value); }

Palette Palette::for_labels(std::span<const std::uint32_t> labels) {
  std::vector<std::uint32_t> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  Palette p;
  std::vector<double> hues;
  std::set<Rgb> used{other_color};
  constexpr double min_gap = 1.0 / 256.0;
  constexpr double golden = 0.6180339887498949;
  for (auto label : sorted) {
    double h = hash_hue(label);
    for (int tries = 0; tries < 64; ++tries) {
      const bool crowded = std::any_of(hues.begin(), hues.end(), [&](double u) {
        const double d = std::abs(u - h);
        return std::min(d, 1.0 - d) < min_gap;
      });
      if (!crowded && !used.contains(hsv(h, saturation, value))) break;
      h = h + golden - std::floor(h + golden);
    }
    Rgb c = hsv(h, saturation, value);
    for (double v = value; used.contains(c); v -= 1.0 / 255.0) c = hsv(h, saturation, v);
    hues.push_back(h);
    used.insert(c);
    p.colors_[label] = c;
  }
  return p;
}

Rgb Palette::color(std::uint32_t label) const {
  if (label == 0) return other_color;
  const auto it = colors_.find(label);
  return it != colors_.end() ? it->second : hashed(label);
}

std::vector<Sector> pie_sectors(std::span<const std::int64_t> row, std::span<const std::uint32_t> labels,
                                double min_fraction) {
  if (row.size() != labels.size() + 1) throw ArgumentError("row width does not match the column labels");
  std::int64_t total = 0;
  for (std::size_t c = 1; c < row.size(); ++c) total += row[c];
  std::vector<Sector> out;
  if (total == 0) return out;

  std::vector<std::pair<std::uint32_t, double>> shares;
  double other = 0.0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] == 0) continue;
    const double f = static_cast<double>(row[c]) / static_cast<double>(total);
    if (f < min_fraction) other += f;
    else shares.emplace_back(labels[c - 1], f);
  }
  if (other > 0.0) shares.emplace_back(0u, other);

  double start = 0.0;
  for (std::size_t n = 0; n < shares.size(); ++n) {
    const double sweep = n + 1 == shares.size() ? 360.0 - start : shares[n].second * 360.0;
    out.push_back({shares[n].first, start, sweep});
    start += sweep;
  }
  return out;
}

Axis parse_axis(const std::string& text) {
  if (text == "x") return Axis::x;
  if (text == "y") return Axis::y;
  if (text == "z") return Axis::z;
  throw ArgumentError("axis must be x, y or z, got '" + text + "'");
}

std::string render_pie_glyphs(const ConnectivityMatrix& c, const LabelVolume& source, std::uint32_t source_label,
                              const Options& options, const Palette& palette) {
  const auto& dims = source.shape().dims();
  const int axis = static_cast<int>(options.axis);
  if (options.slice < 0 || options.slice >= dims[axis])
    throw ArgumentError("slice " + std::to_string(options.slice) + " is outside [0, " + std::to_string(dims[axis]) +
                        ") along the chosen axis");
  if (!(options.pitch > 0.0)) throw ArgumentError("glyph pitch must be positive");
  // In-plane axes: (u, v) with v drawn upwards.
  const int u_axis = axis == 0 ? 1 : 0;
  const int v_axis = axis == 2 ? 1 : 2;
  const double pitch = options.pitch;
  const double radius = 0.45 * pitch;
  const double plot_w = dims[u_axis] * pitch;
  const double plot_h = dims[v_axis] * pitch;
  const bool legend = !options.names.empty();
  const double legend_w = legend ? 12.0 * pitch : 0.0;
  const double legend_h = legend ? (c.regions() + 2) * 0.8 * pitch : 0.0;
  const double width = plot_w + legend_w;
  const double height = std::max(plot_h, legend_h);

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"#ffffff\"/>\n";
  svg += "<g id=\"glyphs\" stroke=\"none\">\n";

  for (std::size_t r = 0; r < c.rows(); ++r) {
    const auto& v = c.row_voxels()[r];
    const int idx[3] = {v.i, v.j, v.k};
    if (idx[axis] != options.slice) continue;
    if (!source.shape().contains(v) || source.at(v) != source_label) continue;
    const double x0 = idx[u_axis] * pitch;
    const double y0 = (dims[v_axis] - 1 - idx[v_axis]) * pitch;
    svg += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(pitch) + "\" height=\"" + num(pitch) +
           "\" fill=\"none\" stroke=\"#dddddd\" stroke-width=\"" + num(pitch / 40.0) + "\"/>\n";
    const auto sectors = pie_sectors(c.row(r), c.labels(), options.min_fraction);
    if (sectors.empty()) continue;
    const double cx = x0 + 0.5 * pitch;
    const double cy = y0 + 0.5 * pitch;
    svg += "<g data-voxel=\"" + std::to_string(v.i) + "," + std::to_string(v.j) + "," + std::to_string(v.k) + "\">\n";
    for (const auto& s : sectors) {
      const std::string fill = palette.color(s.label).hex();
      const std::string label_attr = s.label == 0 ? "other" : std::to_string(s.label);
      if (sectors.size() == 1) {
        svg += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(radius) + "\" fill=\"" + fill +
               "\" data-label=\"" + label_attr + "\"/>\n";
        continue;
      }
      const double a0 = s.start_deg * std::numbers::pi / 180.0;
      const double a1 = (s.start_deg + s.sweep_deg) * std::numbers::pi / 180.0;
      const double sx = cx + radius * std::sin(a0), sy = cy - radius * std::cos(a0);
      const double ex = cx + radius * std::sin(a1), ey = cy - radius * std::cos(a1);
      const int large = s.sweep_deg > 180.0 ? 1 : 0;
      svg += "<path d=\"M " + num(cx) + " " + num(cy) + " L " + num(sx) + " " + num(sy) + " A " + num(radius) + " " +
             num(radius) + " 0 " + std::to_string(large) + " 1 " + num(ex) + " " + num(ey) + " Z\" fill=\"" + fill +
             "\" data-label=\"" + label_attr + "\" data-sweep=\"" + num(s.sweep_deg) + "\"/>\n";
    }
    svg += "</g>\n";
  }
  svg += "</g>\n";

  if (legend) {
    svg += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"" + num(0.5 * pitch) + "\">\n";
    const double lx = plot_w + 0.5 * pitch;
    double ly = 0.5 * pitch;
    auto entry = [&](const Rgb& color, const std::string& text) {
      svg += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" width=\"" + num(0.5 * pitch) + "\" height=\"" +
             num(0.5 * pitch) + "\" fill=\"" + color.hex() + "\"/>\n";
      svg += "<text x=\"" + num(lx + 0.8 * pitch) + "\" y=\"" + num(ly + 0.45 * pitch) + "\">" + xml_escape(text) +
             "</text>\n";
      ly += 0.8 * pitch;
    };
    for (auto label : c.labels()) {
      const auto it = options.names.find(label);
      entry(palette.color(label), it != options.names.end() ? it->second : std::to_string(label));
    }
    entry(other_color, "other");
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::map<std::uint32_t, std::string> read_label_names(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ArgumentError("file not found: " + path.string());
  std::ifstream in(path);
  std::map<std::uint32_t, std::string> names;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": expected label<TAB>name");
    try {
      std::size_t used = 0;
      const unsigned long label = std::stoul(line.substr(0, tab), &used);
      if (used != tab) throw std::invalid_argument("trailing characters");
      names[static_cast<std::uint32_t>(label)] = line.substr(tab + 1);
    } catch (const std::logic_error&) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": invalid label '" + line.substr(0, tab) + "'");
    }
  }
  return names;
}

}  // namespace passconn::glyph
