#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "passconn/grid.hpp"

namespace passconn {

// Ordered world-mm points; at least two, all finite.
class Streamline {
 public:
  // Throws ArgumentError on fewer than two points or non-finite coordinates.
  explicit Streamline(std::vector<Vec3> points);

  const std::vector<Vec3>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Vec3& front() const { return points_.front(); }
  const Vec3& back() const { return points_.back(); }
  double length() const;

  bool operator==(const Streamline& other) const { return points_ == other.points_; }

 private:
  std::vector<Vec3> points_;
};

struct Tractogram {
  std::vector<Streamline> streamlines;
  std::map<std::string, std::string> metadata;

  std::size_t size() const { return streamlines.size(); }
  bool empty() const { return streamlines.empty(); }
};

// Inserts ceil(d / max_spacing) - 1 evenly spaced points into every segment
// longer than max_spacing. Original points are kept verbatim.
Streamline upsample(const Streamline& line, double max_spacing);

// Rows (see SourceRegion) of every source voxel the polyline passes through,
// ascending and without duplicates.
std::vector<std::int64_t> passthrough_rows(const Streamline& line, const SourceRegion& source);

// Reusable scratch space for the hot accumulation loop.
class PassthroughScratch {
 public:
  explicit PassthroughScratch(const SourceRegion& source);
  // Same result as passthrough_rows(); the returned span is valid until the
  // next call.
  std::span<const std::int64_t> rows(const Streamline& line);

 private:
  const SourceRegion* source_;
  std::vector<VoxelIndex> voxels_;
  std::vector<std::int64_t> rows_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 0;
};

enum class EndpointMode { last, both };

EndpointMode parse_endpoint_mode(const std::string& text);
std::string to_string(EndpointMode mode);

// Non-zero in-bounds target labels at the streamline terminus (`last`) or at
// both termini, first point first (`both`).
std::vector<std::uint32_t> endpoint_region(const Streamline& line, const LabelVolume& targets,
                                           EndpointMode mode);

}  // namespace passconn
