#include "passconn/tck.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "passconn/error.hpp"

namespace passconn::tck {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

float load_float(const char* p, bool big_endian) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  if (big_endian != (std::endian::native == std::endian::big)) {
    bits = ((bits & 0xFF) << 24) | ((bits & 0xFF00) << 8) | ((bits >> 8) & 0xFF00) | (bits >> 24);
  }
  return std::bit_cast<float>(bits);
}

void append_float_le(std::string& out, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  for (int n = 0; n < 4; ++n) out.push_back(static_cast<char>((bits >> (8 * n)) & 0xFF));
}

}  // namespace

Tractogram read(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ArgumentError("file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  Tractogram tg;
  std::size_t pos = 0;
  int line_no = 0;
  bool ended = false;
  bool big_endian = false;
  bool have_datatype = false;
  long long offset = -1;
  while (pos < bytes.size()) {
    const auto eol = bytes.find('\n', pos);
    if (eol == std::string::npos) break;
    const std::string line = bytes.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    const std::string text = trim(line);
    if (line_no == 1) {
      if (text != "mrtrix tracks")
        throw ParseError(path.string() + ": line 1: expected 'mrtrix tracks', got '" + text + "'");
      continue;
    }
    if (text == "END") {
      ended = true;
      break;
    }
    const auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0)
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": malformed header entry '" + text + "'");
    const std::string key = trim(text.substr(0, colon));
    const std::string value = trim(text.substr(colon + 1));
    if (key == "datatype") {
      have_datatype = true;
      if (value == "Float32LE") big_endian = false;
      else if (value == "Float32BE") big_endian = true;
      else if (value == "Float64LE" || value == "Float64BE")
        throw UnsupportedFormat(path.string() + ": datatype " + value + " is not supported (Float32LE/BE only)");
      else
        throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": unknown datatype '" + value + "'");
    } else if (key == "file") {
      std::istringstream ss(value);
      std::string dot;
      if (!(ss >> dot >> offset) || dot != "." || offset < 0)
        throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": malformed file entry '" + value + "'");
    } else if (key == "count" || key == "total_count") {
      // Recomputed from the payload.
    } else {
      auto [it, inserted] = tg.metadata.try_emplace(key, value);
      if (!inserted) it->second += "\n" + value;
    }
  }
  if (line_no == 0) throw ParseError(path.string() + ": empty file");
  if (!ended) throw ParseError(path.string() + ": header has no END line (line " + std::to_string(line_no) + ")");
  if (!have_datatype) throw ParseError(path.string() + ": header has no datatype entry");
  if (offset < 0) throw ParseError(path.string() + ": header has no file entry");
  if (static_cast<std::size_t>(offset) < pos || static_cast<std::size_t>(offset) > bytes.size())
    throw ParseError(path.string() + ": data offset " + std::to_string(offset) + " is outside the file");

  std::vector<Vec3> current;
  std::size_t at = static_cast<std::size_t>(offset);
  bool terminated = false;
  while (at + 12 <= bytes.size()) {
    const float x = load_float(bytes.data() + at, big_endian);
    const float y = load_float(bytes.data() + at + 4, big_endian);
    const float z = load_float(bytes.data() + at + 8, big_endian);
    const bool nan = std::isnan(x) && std::isnan(y) && std::isnan(z);
    const bool inf = std::isinf(x) && std::isinf(y) && std::isinf(z);
    if (nan || inf) {
      if (!current.empty()) {
        if (current.size() < 2)
          throw ParseError(path.string() + ": single-point streamline ending at byte " + std::to_string(at));
        tg.streamlines.emplace_back(std::move(current));
        current.clear();
      }
      if (inf) {
        terminated = true;
        break;
      }
    } else if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw ParseError(path.string() + ": corrupt triplet (stray NaN/Inf) at byte " + std::to_string(at));
    } else {
      current.emplace_back(x, y, z);
    }
    at += 12;
  }
  if (!terminated)
    throw ParseError(path.string() + ": track data truncated at byte " + std::to_string(at) +
                     " (no end-of-data marker)");
  return tg;
}

void write(const Tractogram& tg, const std::filesystem::path& path) {
  std::string header = "mrtrix tracks\n";
  for (const auto& [key, value] : tg.metadata) {
    if (key.find_first_of(":\n") != std::string::npos)
      throw ArgumentError("invalid tck header key '" + key + "'");
    std::istringstream ss(value);
    std::string part;
    while (std::getline(ss, part)) header += key + ": " + part + "\n";
  }
  header += "datatype: Float32LE\n";
  header += "count: " + std::to_string(tg.size()) + "\n";
  // The offset is part of the header it points past.
  std::size_t offset = header.size() + 4;
  std::string file_line;
  while (true) {
    file_line = "file: . " + std::to_string(offset) + "\n";
    const std::size_t total = header.size() + file_line.size() + 4;  // "END\n"
    if (total == offset) break;
    offset = total;
  }
  header += file_line + "END\n";

  std::string payload;
  std::size_t points = 0;
  for (const auto& s : tg.streamlines) points += s.size() + 1;
  payload.reserve(12 * (points + 1));
  const float nan = std::numeric_limits<float>::quiet_NaN();
  const float inf = std::numeric_limits<float>::infinity();
  for (const auto& s : tg.streamlines) {
    for (const auto& p : s.points())
      for (int a = 0; a < 3; ++a) append_float_le(payload, static_cast<float>(p[a]));
    for (int a = 0; a < 3; ++a) append_float_le(payload, nan);
  }
  for (int a = 0; a < 3; ++a) append_float_le(payload, inf);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace passconn::tck
