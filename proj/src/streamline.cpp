#include "passconn/streamline.hpp"

#include <algorithm>
#include <cmath>

#include "passconn/error.hpp"

namespace passconn {

Streamline::Streamline(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.size() < 2)
    throw ArgumentError("a streamline needs at least 2 points, got " + std::to_string(points_.size()));
  for (const auto& p : points_)
    if (!p.allFinite()) throw ArgumentError("streamline contains a non-finite coordinate");
}

double Streamline::length() const {
  double total = 0.0;
  for (std::size_t n = 1; n < points_.size(); ++n) total += (points_[n] - points_[n - 1]).norm();
  return total;
}

Streamline upsample(const Streamline& line, double max_spacing) {
  if (!(max_spacing > 0.0)) throw ArgumentError("upsampling spacing must be positive");
  const auto& in = line.points();
  std::vector<Vec3> out;
  out.reserve(in.size());
  out.push_back(in.front());
  for (std::size_t n = 1; n < in.size(); ++n) {
    const Vec3& p = in[n - 1];
    const Vec3& q = in[n];
    // The slack keeps already-uniform gaps (d/n computed in floating point)
    // from being split again, which makes the operation idempotent.
    const double ratio = (q - p).norm() / max_spacing;
    const auto pieces = static_cast<long>(std::ceil(ratio - 1e-9));
    for (long m = 1; m < pieces; ++m) out.push_back(p + (q - p) * (double(m) / double(pieces)));
    out.push_back(q);
  }
  return Streamline(std::move(out));
}

PassthroughScratch::PassthroughScratch(const SourceRegion& source)
    : source_(&source), stamp_(source.size(), 0) {}

std::span<const std::int64_t> PassthroughScratch::rows(const Streamline& line) {
  if (++generation_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    generation_ = 1;
  }
  rows_.clear();
  const auto& affine = source_->volume().affine();
  const auto& pts = line.points();
  Vec3 prev = affine.to_voxel(pts[0]);
  for (std::size_t n = 1; n < pts.size(); ++n) {
    const Vec3 cur = affine.to_voxel(pts[n]);
    voxels_.clear();
    traverse_voxel_segment(prev, cur, source_->bounds(), voxels_);
    for (const auto& v : voxels_) {
      const auto row = source_->row_of(v);
      if (row >= 0 && stamp_[row] != generation_) {
        stamp_[row] = generation_;
        rows_.push_back(row);
      }
    }
    prev = cur;
  }
  std::sort(rows_.begin(), rows_.end());
  return rows_;
}

std::vector<std::int64_t> passthrough_rows(const Streamline& line, const SourceRegion& source) {
  PassthroughScratch scratch(source);
  const auto rows = scratch.rows(line);
  return {rows.begin(), rows.end()};
}

EndpointMode parse_endpoint_mode(const std::string& text) {
  if (text == "last") return EndpointMode::last;
  if (text == "both") return EndpointMode::both;
  throw ArgumentError("endpoint mode must be 'last' or 'both', got '" + text + "'");
}

std::string to_string(EndpointMode mode) { return mode == EndpointMode::last ? "last" : "both"; }

std::vector<std::uint32_t> endpoint_region(const Streamline& line, const LabelVolume& targets,
                                           EndpointMode mode) {
  std::vector<std::uint32_t> out;
  if (mode == EndpointMode::both)
    if (auto l = label_at(line.front(), targets)) out.push_back(l);
  if (auto l = label_at(line.back(), targets)) out.push_back(l);
  return out;
}

}  // namespace passconn
