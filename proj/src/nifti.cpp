#include "passconn/nifti.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include <zlib.h>

#include "passconn/error.hpp"

namespace passconn::nifti {
namespace {

static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");

constexpr int header_size = 348;
constexpr int data_offset = 352;

template <typename T>
T load(const unsigned char* p, bool swap) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, p, sizeof(T));
  if (swap)
    for (std::size_t n = 0; n < sizeof(T) / 2; ++n) std::swap(buf[n], buf[sizeof(T) - 1 - n]);
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

template <typename T>
void store(unsigned char* p, T v) {
  std::memcpy(p, &v, sizeof(T));
}

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ArgumentError("file not found: " + path.string());
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (!f) throw ArgumentError("cannot open " + path.string());
  std::vector<unsigned char> bytes;
  unsigned char chunk[1 << 16];
  int got;
  while ((got = gzread(f, chunk, sizeof chunk)) > 0) bytes.insert(bytes.end(), chunk, chunk + got);
  const bool failed = got < 0;
  gzclose(f);
  if (failed) throw ParseError("decompression failed for " + path.string());
  return bytes;
}

int bytes_per_value(Datatype t) {
  switch (t) {
    case Datatype::uint8: return 1;
    case Datatype::int16:
    case Datatype::uint16: return 2;
    case Datatype::int32:
    case Datatype::float32: return 4;
    case Datatype::float64: return 8;
  }
  return 0;
}

Eigen::Matrix4d qform_matrix(const unsigned char* h, bool swap) {
  const double b = load<float>(h + 256, swap);
  const double c = load<float>(h + 260, swap);
  const double d = load<float>(h + 264, swap);
  const double a = std::sqrt(std::max(0.0, 1.0 - (b * b + c * c + d * d)));
  Eigen::Matrix3d r;
  r << a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c),
      2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b),
      2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b;
  double qfac = load<float>(h + 76, swap);
  if (qfac == 0.0) qfac = 1.0;
  const Vec3 pix(load<float>(h + 80, swap), load<float>(h + 84, swap),
                 qfac * load<float>(h + 88, swap));
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = r * pix.asDiagonal();
  m.topRightCorner<3, 1>() << load<float>(h + 268, swap), load<float>(h + 272, swap),
      load<float>(h + 276, swap);
  return m;
}

}  // namespace

Image read(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() < header_size) throw ParseError(path.string() + ": file shorter than a NIfTI-1 header");
  const unsigned char* h = bytes.data();

  bool swap = false;
  if (load<std::int32_t>(h, false) != header_size) {
    if (load<std::int32_t>(h, true) != header_size)
      throw ParseError(path.string() + ": sizeof_hdr is not 348");
    swap = true;
  }
  if (std::memcmp(h + 344, "n+1", 4) != 0) {
    if (std::memcmp(h + 344, "ni1", 4) == 0)
      throw UnsupportedFormat(path.string() + ": two-file NIfTI pairs are not supported");
    throw ParseError(path.string() + ": bad NIfTI-1 magic");
  }

  Image img;
  const int ndim = load<std::int16_t>(h + 40, swap);
  if (ndim < 1 || ndim > 4)
    throw UnsupportedFormat(path.string() + ": " + std::to_string(ndim) + "-dimensional images are not supported");
  for (int n = 0; n < 4; ++n) {
    const int d = n < ndim ? load<std::int16_t>(h + 42 + 2 * n, swap) : 1;
    if (d <= 0) throw ParseError(path.string() + ": non-positive dimension " + std::to_string(d));
    img.dims[n] = d;
  }

  const auto code = load<std::int16_t>(h + 70, swap);
  img.datatype = static_cast<Datatype>(code);
  const int width = bytes_per_value(img.datatype);
  if (width == 0) throw UnsupportedFormat(path.string() + ": NIfTI datatype " + std::to_string(code) + " is not supported");

  const int qform_code = load<std::int16_t>(h + 252, swap);
  const int sform_code = load<std::int16_t>(h + 254, swap);
  if (sform_code > 0) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = load<float>(h + 280 + 16 * r + 4 * c, swap);
    img.affine = Affine(m);
  } else if (qform_code > 0) {
    img.affine = Affine(qform_matrix(h, swap));
  } else {
    throw ConfigError(path.string() + ": neither sform nor qform is set");
  }

  const double vox_offset = load<float>(h + 108, swap);
  if (!(vox_offset >= header_size)) throw ParseError(path.string() + ": invalid vox_offset");
  const auto offset = static_cast<std::size_t>(vox_offset);
  const std::size_t count = std::size_t(img.dims[0]) * img.dims[1] * img.dims[2] * img.dims[3];
  if (bytes.size() < offset + count * width)
    throw ParseError(path.string() + ": data section truncated at byte " + std::to_string(bytes.size()) +
                     " (expected " + std::to_string(offset + count * width) + ")");

  img.data.resize(count);
  const unsigned char* p = bytes.data() + offset;
  for (std::size_t n = 0; n < count; ++n, p += width) {
    switch (img.datatype) {
      case Datatype::uint8: img.data[n] = *p; break;
      case Datatype::int16: img.data[n] = load<std::int16_t>(p, swap); break;
      case Datatype::uint16: img.data[n] = load<std::uint16_t>(p, swap); break;
      case Datatype::int32: img.data[n] = load<std::int32_t>(p, swap); break;
      case Datatype::float32: img.data[n] = load<float>(p, swap); break;
      case Datatype::float64: img.data[n] = load<double>(p, swap); break;
    }
  }
  return img;
}

void write(const Image& img, const std::filesystem::path& path) {
  const int width = bytes_per_value(img.datatype);
  if (width == 0) throw UnsupportedFormat("cannot write NIfTI datatype " + std::to_string(int(img.datatype)));
  const std::size_t count = std::size_t(img.dims[0]) * img.dims[1] * img.dims[2] * img.dims[3];
  if (img.data.size() != count) throw ConfigError("image data size does not match its dimensions");

  std::vector<unsigned char> out(data_offset + count * width, 0);
  unsigned char* h = out.data();
  store<std::int32_t>(h, header_size);
  const int ndim = img.dims[3] > 1 ? 4 : 3;
  store<std::int16_t>(h + 40, static_cast<std::int16_t>(ndim));
  for (int n = 0; n < 4; ++n) {
    if (img.dims[n] > std::numeric_limits<std::int16_t>::max())
      throw ConfigError("dimension exceeds the NIfTI-1 limit of 32767");
    store<std::int16_t>(h + 42 + 2 * n, static_cast<std::int16_t>(img.dims[n]));
  }
  for (int n = ndim; n < 7; ++n) store<std::int16_t>(h + 42 + 2 * n, 1);
  store<std::int16_t>(h + 70, static_cast<std::int16_t>(img.datatype));
  store<std::int16_t>(h + 72, static_cast<std::int16_t>(8 * width));
  const Vec3 pix = img.affine.voxel_size();
  store<float>(h + 76, 1.0f);
  for (int n = 0; n < 3; ++n) store<float>(h + 80 + 4 * n, static_cast<float>(pix[n]));
  store<float>(h + 92, 1.0f);
  store<float>(h + 108, static_cast<float>(data_offset));
  store<float>(h + 112, 1.0f);
  h[123] = 2;  // mm
  store<std::int16_t>(h + 252, 0);
  store<std::int16_t>(h + 254, 1);
  const auto& m = img.affine.matrix();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) store<float>(h + 280 + 16 * r + 4 * c, static_cast<float>(m(r, c)));
  std::memcpy(h + 344, "n+1", 4);

  unsigned char* p = out.data() + data_offset;
  for (std::size_t n = 0; n < count; ++n, p += width) {
    const double v = img.data[n];
    switch (img.datatype) {
      case Datatype::uint8: *p = static_cast<std::uint8_t>(v); break;
      case Datatype::int16: store(p, static_cast<std::int16_t>(v)); break;
      case Datatype::uint16: store(p, static_cast<std::uint16_t>(v)); break;
      case Datatype::int32: store(p, static_cast<std::int32_t>(v)); break;
      case Datatype::float32: store(p, static_cast<float>(v)); break;
      case Datatype::float64: store(p, v); break;
    }
  }

  const bool gz = path.extension() == ".gz";
  gzFile f = gzopen(path.string().c_str(), gz ? "wb6" : "wbT");
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  const int written = gzwrite(f, out.data(), static_cast<unsigned>(out.size()));
  const int closed = gzclose(f);
  if (written != static_cast<int>(out.size()) || closed != Z_OK)
    throw Error("failed writing " + path.string());
}

LabelVolume read_labels(const std::filesystem::path& path) {
  Image img = read(path);
  switch (img.datatype) {
    case Datatype::uint8:
    case Datatype::int16:
    case Datatype::int32:
    case Datatype::uint16: break;
    default:
      throw UnsupportedFormat(path.string() + ": label volumes must use an integer datatype (2, 4, 8 or 512)");
  }
  if (img.dims[3] != 1) throw UnsupportedFormat(path.string() + ": label volume must be 3D");
  std::vector<std::uint32_t> labels(img.data.size());
  for (std::size_t n = 0; n < labels.size(); ++n) {
    if (img.data[n] < 0) throw ParseError(path.string() + ": negative label at voxel " + std::to_string(n));
    labels[n] = static_cast<std::uint32_t>(img.data[n]);
  }
  return LabelVolume(GridShape({img.dims[0], img.dims[1], img.dims[2]}), img.affine, std::move(labels));
}

void write_labels(const LabelVolume& volume, const std::filesystem::path& path) {
  Image img;
  const auto& d = volume.shape().dims();
  img.dims = {d[0], d[1], d[2], 1};
  img.affine = volume.affine();
  img.datatype = Datatype::int32;
  img.data.reserve(volume.labels().size());
  for (auto l : volume.labels()) {
    if (l > static_cast<std::uint32_t>(std::numeric_limits<std::int32_t>::max()))
      throw ConfigError("label " + std::to_string(l) + " does not fit in a NIfTI int32 volume");
    img.data.push_back(l);
  }
  write(img, path);
}

}  // namespace passconn::nifti
