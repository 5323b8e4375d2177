#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "passconn/grid.hpp"

namespace passconn::nifti {

// NIfTI-1 datatype codes handled here.
enum class Datatype : std::int16_t {
  uint8 = 2,
  int16 = 4,
  int32 = 8,
  float32 = 16,
  float64 = 64,
  uint16 = 512,
};

// A single-file NIfTI-1 image with voxel values widened to double.
// Values are stored x-fastest, then y, z and the 4th dimension.
struct Image {
  std::array<int, 4> dims{1, 1, 1, 1};
  Affine affine;
  Datatype datatype = Datatype::int32;
  std::vector<double> data;
};

// Reads `.nii` or `.nii.gz` (detected from content, not the suffix). Uses the
// sform when sform_code > 0, else the qform when qform_code > 0; a file with
// neither is rejected. Either byte order is accepted.
Image read(const std::filesystem::path& path);

// Writes little-endian NIfTI-1 with sform_code 1 (qform_code 0). A `.gz`
// suffix selects gzip compression.
void write(const Image& image, const std::filesystem::path& path);

LabelVolume read_labels(const std::filesystem::path& path);
void write_labels(const LabelVolume& volume, const std::filesystem::path& path);

}  // namespace passconn::nifti
