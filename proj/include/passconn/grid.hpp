#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace passconn {

using Vec3 = Eigen::Vector3d;

struct VoxelIndex {
  int i = 0;
  int j = 0;
  int k = 0;

  auto operator<=>(const VoxelIndex&) const = default;
};

// Voxel-to-world transform. Continuous voxel coordinates use the
// voxel-center convention: integer coordinates are voxel centers and voxel
// (i,j,k) covers [i-0.5, i+0.5) along each axis.
class Affine {
 public:
  Affine();  // identity
  // Throws ConfigError if the linear part is singular (|det| <= 1e-12).
  explicit Affine(const Eigen::Matrix4d& voxel_to_world);

  static Affine scaling(const Vec3& voxel_size, const Vec3& origin = Vec3::Zero());

  const Eigen::Matrix4d& matrix() const { return forward_; }
  const Eigen::Matrix4d& inverse() const { return inverse_; }

  Vec3 to_world(const Vec3& voxel) const;
  Vec3 to_voxel(const Vec3& world) const;

  // Column norms of the linear part, i.e. voxel edge lengths in mm.
  Vec3 voxel_size() const;

 private:
  Eigen::Matrix4d forward_;
  Eigen::Matrix4d inverse_;
};

inline Vec3 world_to_voxel(const Vec3& p, const Affine& affine) { return affine.to_voxel(p); }

class GridShape {
 public:
  GridShape() = default;
  explicit GridShape(std::array<int, 3> dims);

  const std::array<int, 3>& dims() const { return dims_; }
  int nx() const { return dims_[0]; }
  int ny() const { return dims_[1]; }
  int nz() const { return dims_[2]; }
  std::size_t size() const {
    return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  }

  bool contains(const VoxelIndex& v) const {
    return v.i >= 0 && v.j >= 0 && v.k >= 0 && v.i < dims_[0] && v.j < dims_[1] && v.k < dims_[2];
  }
  std::size_t linear(const VoxelIndex& v) const {
    return static_cast<std::size_t>(v.i) +
           static_cast<std::size_t>(dims_[0]) * (static_cast<std::size_t>(v.j) +
                                                 static_cast<std::size_t>(dims_[1]) * v.k);
  }
  VoxelIndex unravel(std::size_t index) const;

  bool operator==(const GridShape&) const = default;

 private:
  std::array<int, 3> dims_{1, 1, 1};
};

// Voxel containing a continuous voxel coordinate, or nullopt outside the grid.
std::optional<VoxelIndex> voxel_at(const Vec3& voxel_coord, const GridShape& shape);

// Dense non-negative integer labels on a grid; 0 is background.
class LabelVolume {
 public:
  LabelVolume() = default;
  LabelVolume(GridShape shape, Affine affine, std::vector<std::uint32_t> labels);
  // All-background volume.
  LabelVolume(GridShape shape, Affine affine);

  const GridShape& shape() const { return shape_; }
  const Affine& affine() const { return affine_; }
  Vec3 voxel_size() const { return affine_.voxel_size(); }

  std::span<const std::uint32_t> labels() const { return labels_; }
  std::uint32_t at(const VoxelIndex& v) const { return labels_[shape_.linear(v)]; }
  void set(const VoxelIndex& v, std::uint32_t label) { labels_[shape_.linear(v)] = label; }

  // Distinct non-zero labels, ascending.
  std::vector<std::uint32_t> distinct_labels() const;
  // Voxels carrying `label`, in ascending linear-index order.
  std::vector<VoxelIndex> voxels_with_label(std::uint32_t label) const;

 private:
  GridShape shape_;
  Affine affine_;
  std::vector<std::uint32_t> labels_;
};

std::optional<VoxelIndex> voxel_of(const Vec3& world, const GridShape& shape, const Affine& affine);
inline std::optional<VoxelIndex> voxel_of(const Vec3& world, const LabelVolume& vol) {
  return voxel_of(world, vol.shape(), vol.affine());
}

// Label at a world point; 0 when out of bounds.
std::uint32_t label_at(const Vec3& world, const LabelVolume& vol);

// Inclusive voxel-index box used to restrict traversal to a subregion.
struct VoxelBox {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{-1, -1, -1};

  bool empty() const { return hi[0] < lo[0] || hi[1] < lo[1] || hi[2] < lo[2]; }
  static VoxelBox of(const GridShape& shape) {
    return {{0, 0, 0}, {shape.nx() - 1, shape.ny() - 1, shape.nz() - 1}};
  }
};

// Voxels whose cells the closed segment [a, b] (world mm) intersects, in
// traversal order from a to b. Exact parametric grid marching; consecutive
// entries are face neighbours. A segment that merely grazes a face, edge or
// corner may or may not report the grazed voxel.
std::vector<VoxelIndex> segment_voxels(const Vec3& a, const Vec3& b, const GridShape& shape,
                                       const Affine& affine);

// Same traversal clipped to `box`, appending to `out` through a callback-free
// path for hot loops. `a` and `b` are already in continuous voxel coordinates.
void traverse_voxel_segment(const Vec3& a, const Vec3& b, const VoxelBox& box,
                            std::vector<VoxelIndex>& out);

// Source voxels of one label, ordered by linear index; row r of a
// connectivity matrix corresponds to voxels()[r].
class SourceRegion {
 public:
  SourceRegion(const LabelVolume& volume, std::uint32_t label);

  const LabelVolume& volume() const { return *volume_; }
  std::uint32_t label() const { return label_; }
  std::size_t size() const { return voxels_.size(); }
  const std::vector<VoxelIndex>& voxels() const { return voxels_; }
  const VoxelBox& bounds() const { return bounds_; }

  // Row of a voxel, or -1 when the voxel does not carry the source label.
  std::int64_t row_of(const VoxelIndex& v) const {
    return volume_->shape().contains(v) ? rows_[volume_->shape().linear(v)] : -1;
  }

 private:
  const LabelVolume* volume_;
  std::uint32_t label_;
  std::vector<VoxelIndex> voxels_;
  std::vector<std::int64_t> rows_;
  VoxelBox bounds_;
};

}  // namespace passconn
