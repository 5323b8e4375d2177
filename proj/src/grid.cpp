#include "passconn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "passconn/error.hpp"

namespace passconn {

Affine::Affine() : forward_(Eigen::Matrix4d::Identity()), inverse_(Eigen::Matrix4d::Identity()) {}

Affine::Affine(const Eigen::Matrix4d& voxel_to_world) : forward_(voxel_to_world) {
  if (!forward_.allFinite())
    throw ConfigError("affine contains non-finite entries");
  const double det = forward_.topLeftCorner<3, 3>().determinant();
  if (!(std::abs(det) > 1e-12))
    throw ConfigError("affine is singular (det = " + std::to_string(det) + ")");
  forward_.row(3) << 0, 0, 0, 1;
  inverse_ = forward_.inverse();
}

Affine Affine::scaling(const Vec3& voxel_size, const Vec3& origin) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = voxel_size.asDiagonal();
  m.topRightCorner<3, 1>() = origin;
  return Affine(m);
}

Vec3 Affine::to_world(const Vec3& voxel) const {
  return forward_.topLeftCorner<3, 3>() * voxel + forward_.topRightCorner<3, 1>();
}

Vec3 Affine::to_voxel(const Vec3& world) const {
  return inverse_.topLeftCorner<3, 3>() * world + inverse_.topRightCorner<3, 1>();
}

Vec3 Affine::voxel_size() const { return forward_.topLeftCorner<3, 3>().colwise().norm(); }

GridShape::GridShape(std::array<int, 3> dims) : dims_(dims) {
  for (int d : dims_)
    if (d <= 0) throw ConfigError("grid dimensions must be positive");
}

VoxelIndex GridShape::unravel(std::size_t index) const {
  const auto nx = static_cast<std::size_t>(dims_[0]);
  const auto ny = static_cast<std::size_t>(dims_[1]);
  return {static_cast<int>(index % nx), static_cast<int>((index / nx) % ny),
          static_cast<int>(index / (nx * ny))};
}

std::optional<VoxelIndex> voxel_at(const Vec3& c, const GridShape& shape) {
  int idx[3];
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor(c[a] + 0.5);
    if (!(f >= 0.0) || f >= shape.dims()[a]) return std::nullopt;
    idx[a] = static_cast<int>(f);
  }
  return VoxelIndex{idx[0], idx[1], idx[2]};
}

std::optional<VoxelIndex> voxel_of(const Vec3& world, const GridShape& shape, const Affine& affine) {
  return voxel_at(affine.to_voxel(world), shape);
}

LabelVolume::LabelVolume(GridShape shape, Affine affine, std::vector<std::uint32_t> labels)
    : shape_(shape), affine_(std::move(affine)), labels_(std::move(labels)) {
  if (labels_.size() != shape_.size())
    throw ConfigError("label array has " + std::to_string(labels_.size()) + " entries, grid has " +
                      std::to_string(shape_.size()));
}

LabelVolume::LabelVolume(GridShape shape, Affine affine)
    : LabelVolume(shape, std::move(affine), std::vector<std::uint32_t>(shape.size(), 0)) {}

std::vector<std::uint32_t> LabelVolume::distinct_labels() const {
  std::set<std::uint32_t> seen;
  for (auto l : labels_)
    if (l != 0) seen.insert(l);
  return {seen.begin(), seen.end()};
}

std::vector<VoxelIndex> LabelVolume::voxels_with_label(std::uint32_t label) const {
  std::vector<VoxelIndex> out;
  for (std::size_t n = 0; n < labels_.size(); ++n)
    if (labels_[n] == label) out.push_back(shape_.unravel(n));
  return out;
}

std::uint32_t label_at(const Vec3& world, const LabelVolume& vol) {
  const auto v = voxel_of(world, vol);
  return v ? vol.at(*v) : 0u;
}

void traverse_voxel_segment(const Vec3& a_vox, const Vec3& b_vox, const VoxelBox& box,
                            std::vector<VoxelIndex>& out) {
  if (box.empty()) return;
  // Shift so that voxel i spans [i, i+1).
  const Vec3 a = a_vox.array() + 0.5;
  const Vec3 d = (b_vox - a_vox);

  auto inside_box = [&](const Vec3& p) {
    for (int ax = 0; ax < 3; ++ax)
      if (!(p[ax] >= box.lo[ax]) || !(p[ax] < box.hi[ax] + 1.0)) return false;
    return true;
  };
  auto floor_idx = [&](const Vec3& p) {
    std::array<int, 3> idx;
    for (int ax = 0; ax < 3; ++ax)
      idx[ax] = static_cast<int>(std::clamp(std::floor(p[ax]), double(box.lo[ax]), double(box.hi[ax])));
    return idx;
  };

  if (d.isZero(0.0)) {
    if (inside_box(a)) {
      const auto idx = floor_idx(a);
      out.push_back({idx[0], idx[1], idx[2]});
    }
    return;
  }

  // Clip the parametric range t in [0, 1] to the box slabs.
  double t0 = 0.0, t1 = 1.0;
  for (int ax = 0; ax < 3; ++ax) {
    const double lo = box.lo[ax], hi = box.hi[ax] + 1.0;
    if (d[ax] == 0.0) {
      if (!(a[ax] >= lo) || !(a[ax] < hi)) return;
      continue;
    }
    double ta = (lo - a[ax]) / d[ax];
    double tb = (hi - a[ax]) / d[ax];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 > t1) return;

  const bool start_inside = inside_box(a);
  if (t0 == t1) {
    if (start_inside) {
      const auto idx = floor_idx(a);
      out.push_back({idx[0], idx[1], idx[2]});
    }
    return;
  }

  std::array<int, 3> idx = floor_idx(start_inside ? a : Vec3(a + t0 * d));
  std::array<int, 3> step{0, 0, 0};
  double t_max[3], t_delta[3];
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (int ax = 0; ax < 3; ++ax) {
    if (d[ax] > 0.0) {
      step[ax] = 1;
      t_max[ax] = (idx[ax] + 1.0 - a[ax]) / d[ax];
      t_delta[ax] = 1.0 / d[ax];
    } else if (d[ax] < 0.0) {
      step[ax] = -1;
      t_max[ax] = (idx[ax] - a[ax]) / d[ax];
      t_delta[ax] = -1.0 / d[ax];
    } else {
      t_max[ax] = inf;
      t_delta[ax] = inf;
    }
  }

  while (true) {
    out.push_back({idx[0], idx[1], idx[2]});
    int ax = 0;
    if (t_max[1] < t_max[ax]) ax = 1;
    if (t_max[2] < t_max[ax]) ax = 2;
    if (t_max[ax] >= t1) break;
    idx[ax] += step[ax];
    if (idx[ax] < box.lo[ax] || idx[ax] > box.hi[ax]) break;
    t_max[ax] += t_delta[ax];
  }
}

std::vector<VoxelIndex> segment_voxels(const Vec3& a, const Vec3& b, const GridShape& shape,
                                       const Affine& affine) {
  std::vector<VoxelIndex> out;
  traverse_voxel_segment(affine.to_voxel(a), affine.to_voxel(b), VoxelBox::of(shape), out);
  return out;
}

SourceRegion::SourceRegion(const LabelVolume& volume, std::uint32_t label)
    : volume_(&volume), label_(label), rows_(volume.shape().size(), -1) {
  if (label == 0) throw ArgumentError("source label must be non-zero");
  voxels_ = volume.voxels_with_label(label);
  if (voxels_.empty())
    throw ArgumentError("source label " + std::to_string(label) + " does not occur in the volume");
  bounds_.lo = {voxels_[0].i, voxels_[0].j, voxels_[0].k};
  bounds_.hi = bounds_.lo;
  for (std::size_t r = 0; r < voxels_.size(); ++r) {
    const auto& v = voxels_[r];
    rows_[volume.shape().linear(v)] = static_cast<std::int64_t>(r);
    const int c[3] = {v.i, v.j, v.k};
    for (int ax = 0; ax < 3; ++ax) {
      bounds_.lo[ax] = std::min(bounds_.lo[ax], c[ax]);
      bounds_.hi[ax] = std::max(bounds_.hi[ax], c[ax]);
    }
  }
}

}  // namespace passconn
