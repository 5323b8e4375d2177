#include "passconn/matrix_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "passconn/error.hpp"

namespace passconn::matrix_io {
namespace {

static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");

constexpr char magic[8] = {'P', 'C', 'O', 'N', 'N', 'M', 'A', 'T'};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_int(const std::string& text, const std::filesystem::path& path, int line_no) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": invalid integer '" + text + "'");
  return value;
}

std::ifstream open_in(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ArgumentError("file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

template <typename T>
void put(std::string& buf, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  buf.append(bytes, sizeof(T));
}

template <typename T>
T get(const std::string& buf, std::size_t& at, const std::filesystem::path& path) {
  if (at + sizeof(T) > buf.size())
    throw ParseError(path.string() + ": truncated at byte " + std::to_string(at));
  T v;
  std::memcpy(&v, buf.data() + at, sizeof(T));
  at += sizeof(T);
  return v;
}

}  // namespace

std::filesystem::path rows_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".rows.csv");
  return p;
}

void write_csv(const ConnectivityMatrix& m, const std::filesystem::path& path) {
  std::string text = "unassigned";
  for (auto l : m.labels()) text += "," + std::to_string(l);
  text += "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) text += ',';
      text += std::to_string(row[c]);
    }
    text += '\n';
  }
  auto out = open_out(path);
  out << text;

  std::string index = "row,i,j,k\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto& v = m.row_voxels()[r];
    index += std::to_string(r) + "," + std::to_string(v.i) + "," + std::to_string(v.j) + "," + std::to_string(v.k) + "\n";
  }
  auto side = open_out(rows_path(path));
  side << index;
  if (!out || !side) throw Error("failed writing " + path.string());
}

ConnectivityMatrix read_csv(const std::filesystem::path& path) {
  const auto side_path = rows_path(path);
  std::vector<VoxelIndex> voxels;
  {
    auto in = open_in(side_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line_no == 1) continue;
      if (line.empty()) continue;
      const auto f = split(line);
      if (f.size() != 4) throw ParseError(side_path.string() + ": line " + std::to_string(line_no) + ": expected row,i,j,k");
      if (parse_int<std::size_t>(f[0], side_path, line_no) != voxels.size())
        throw ParseError(side_path.string() + ": line " + std::to_string(line_no) + ": rows must be listed in order");
      voxels.push_back({parse_int<int>(f[1], side_path, line_no), parse_int<int>(f[2], side_path, line_no),
                        parse_int<int>(f[3], side_path, line_no)});
    }
  }

  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  const auto header = split(line);
  if (header.empty() || header[0] != "unassigned")
    throw ParseError(path.string() + ": line 1: header must start with 'unassigned'");
  std::vector<std::uint32_t> labels;
  for (std::size_t c = 1; c < header.size(); ++c) labels.push_back(parse_int<std::uint32_t>(header[c], path, 1));
  ConnectivityMatrix m(std::move(voxels), std::move(labels));

  std::size_t r = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != m.cols())
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": expected " + std::to_string(m.cols()) +
                       " fields, got " + std::to_string(f.size()));
    if (r >= m.rows())
      throw ParseError(path.string() + ": more rows than the " + std::to_string(m.rows()) + " listed in " +
                       side_path.string());
    for (std::size_t c = 0; c < f.size(); ++c) {
      const auto v = parse_int<std::int64_t>(f[c], path, line_no);
      if (v < 0) throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": negative count");
      m.at(r, c) = v;
    }
    ++r;
  }
  if (r != m.rows())
    throw ParseError(path.string() + ": has " + std::to_string(r) + " rows, index lists " + std::to_string(m.rows()));
  return m;
}

void write_binary(const ConnectivityMatrix& m, const std::filesystem::path& path) {
  std::string buf(magic, sizeof magic);
  put<std::uint32_t>(buf, 1);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.regions()));
  put<std::uint64_t>(buf, m.rows());
  for (auto l : m.labels()) put<std::uint32_t>(buf, l);
  for (const auto& v : m.row_voxels()) {
    put<std::int32_t>(buf, v.i);
    put<std::int32_t>(buf, v.j);
    put<std::int32_t>(buf, v.k);
  }
  for (auto c : m.counts()) put<std::int64_t>(buf, c);
  auto out = open_out(path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("failed writing " + path.string());
}

ConnectivityMatrix read_binary(const std::filesystem::path& path) {
  auto in = open_in(path);
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < sizeof magic || std::memcmp(buf.data(), magic, sizeof magic) != 0)
    throw ParseError(path.string() + ": not a binary connectivity matrix");
  std::size_t at = sizeof magic;
  const auto version = get<std::uint32_t>(buf, at, path);
  if (version != 1) throw UnsupportedFormat(path.string() + ": matrix format version " + std::to_string(version));
  const auto regions = get<std::uint32_t>(buf, at, path);
  const auto rows = get<std::uint64_t>(buf, at, path);
  const std::size_t expected = at + 4ull * regions + 12ull * rows + 8ull * rows * (regions + 1ull);
  if (buf.size() != expected)
    throw ParseError(path.string() + ": size " + std::to_string(buf.size()) + " does not match header (expected " +
                     std::to_string(expected) + ")");
  std::vector<std::uint32_t> labels(regions);
  for (auto& l : labels) l = get<std::uint32_t>(buf, at, path);
  std::vector<VoxelIndex> voxels(rows);
  for (auto& v : voxels) {
    v.i = get<std::int32_t>(buf, at, path);
    v.j = get<std::int32_t>(buf, at, path);
    v.k = get<std::int32_t>(buf, at, path);
  }
  ConnectivityMatrix m(std::move(voxels), std::move(labels));
  for (auto& c : m.counts()) {
    c = get<std::int64_t>(buf, at, path);
    if (c < 0) throw ParseError(path.string() + ": negative count");
  }
  return m;
}

ConnectivityMatrix read(const std::filesystem::path& path) {
  auto in = open_in(path);
  char head[sizeof magic] = {};
  in.read(head, sizeof head);
  if (in.gcount() == sizeof head && std::memcmp(head, magic, sizeof magic) == 0) return read_binary(path);
  return read_csv(path);
}

void write(const ConnectivityMatrix& m, const std::filesystem::path& path) {
  if (path.extension() == ".bin") write_binary(m, path);
  else write_csv(m, path);
}

}  // namespace passconn::matrix_io
