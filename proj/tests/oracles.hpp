#pragma once

// Reference implementations used only by tests. None of these call into the
// traversal or inversion code they are used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "passconn/grid.hpp"

namespace oracle {

using passconn::GridShape;
using passconn::Vec3;
using passconn::VoxelIndex;
using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat4 to_array(const Eigen::Matrix4d& m) {
  Mat4 a;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a[r][c] = m(r, c);
  return a;
}

// Gauss-Jordan with partial pivoting.
inline Mat4 invert4(Mat4 m) {
  Mat4 inv{};
  for (int n = 0; n < 4; ++n) inv[n][n] = 1.0;
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    std::swap(m[col], m[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double p = m[col][col];
    for (int c = 0; c < 4; ++c) {
      m[col][c] /= p;
      inv[col][c] /= p;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = m[r][col];
      for (int c = 0; c < 4; ++c) {
        m[r][c] -= f * m[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

inline Vec3 apply(const Mat4& m, const Vec3& p) {
  Vec3 out;
  for (int r = 0; r < 3; ++r) out[r] = m[r][0] * p[0] + m[r][1] * p[1] + m[r][2] * p[2] + m[r][3];
  return out;
}

// Rotation x anisotropic scale x mild shear, plus translation.
inline Eigen::Matrix4d random_affine(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.4, 3.0);
  Eigen::Quaterniond q(unit(rng), unit(rng), unit(rng), unit(rng));
  q.normalize();
  Eigen::Matrix3d shear = Eigen::Matrix3d::Identity();
  shear(0, 1) = 0.2 * unit(rng);
  shear(1, 2) = 0.2 * unit(rng);
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = q.toRotationMatrix() * shear * Vec3(scale(rng), scale(rng), scale(rng)).asDiagonal();
  m.topRightCorner<3, 1>() = Vec3(unit(rng), unit(rng), unit(rng)) * 100.0;
  return m;
}

// Unbounded integer cell of a continuous voxel coordinate (centre convention).
inline std::array<long, 3> cell(const Vec3& vox) {
  return {static_cast<long>(std::floor(vox[0] + 0.5)), static_cast<long>(std::floor(vox[1] + 0.5)),
          static_cast<long>(std::floor(vox[2] + 0.5))};
}

inline bool in_grid(const std::array<long, 3>& c, const GridShape& shape) {
  for (int a = 0; a < 3; ++a)
    if (c[a] < 0 || c[a] >= shape.dims()[a]) return false;
  return true;
}

inline VoxelIndex as_voxel(const std::array<long, 3>& c) {
  return {static_cast<int>(c[0]), static_cast<int>(c[1]), static_cast<int>(c[2])};
}

// Parametric length (t in [0, 1]) of segment a->b, given in continuous voxel
// coordinates, that lies inside voxel v's cell.
inline double overlap(const Vec3& a, const Vec3& b, const VoxelIndex& v) {
  const double lo[3] = {v.i - 0.5, v.j - 0.5, v.k - 0.5};
  double t0 = 0.0, t1 = 1.0;
  for (int ax = 0; ax < 3; ++ax) {
    const double d = b[ax] - a[ax];
    if (d == 0.0) {
      if (a[ax] < lo[ax] || a[ax] >= lo[ax] + 1.0) return 0.0;
      continue;
    }
    double ta = (lo[ax] - a[ax]) / d, tb = (lo[ax] + 1.0 - a[ax]) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return std::max(0.0, t1 - t0);
}

// Dense sampling along [a, b] (world mm) at the given world spacing, mapped
// to voxels with an independently inverted affine. Where two consecutive
// samples land in cells that are not face neighbours, the interval is bisected
// down to a parametric width of 1e-8 so that short corner crossings are seen.
inline std::set<VoxelIndex> sampled_voxels(const Vec3& a, const Vec3& b, const GridShape& shape,
                                           const Eigen::Matrix4d& voxel_to_world, double spacing) {
  const Mat4 inv = invert4(to_array(voxel_to_world));
  const Vec3 va = apply(inv, a), vb = apply(inv, b);
  auto at = [&](double t) { return cell(va + t * (vb - va)); };
  std::set<VoxelIndex> out;
  auto record = [&](const std::array<long, 3>& c) {
    if (in_grid(c, shape)) out.insert(as_voxel(c));
  };
  auto adjacent = [](const std::array<long, 3>& p, const std::array<long, 3>& q) {
    return std::abs(p[0] - q[0]) + std::abs(p[1] - q[1]) + std::abs(p[2] - q[2]) <= 1;
  };
  auto refine = [&](auto&& self, double t0, std::array<long, 3> c0, double t1, std::array<long, 3> c1) -> void {
    if (adjacent(c0, c1) || t1 - t0 < 1e-8) return;
    const double tm = 0.5 * (t0 + t1);
    const auto cm = at(tm);
    record(cm);
    self(self, t0, c0, tm, cm);
    self(self, tm, cm, t1, c1);
  };

  const double length = (b - a).norm();
  const long n = std::max(1L, static_cast<long>(std::ceil(length / spacing)));
  auto prev = at(0.0);
  record(prev);
  for (long s = 1; s <= n; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(n);
    const auto cur = at(t);
    record(cur);
    refine(refine, static_cast<double>(s - 1) / n, prev, t, cur);
    prev = cur;
  }
  return out;
}

// Compares two voxel sets, ignoring voxels crossed over a parametric length
// below `grazing`. Returns the number of non-grazing disagreements.
inline int disagreements(const std::set<VoxelIndex>& x, const std::set<VoxelIndex>& y, const Vec3& a_vox,
                         const Vec3& b_vox, double grazing = 1e-6) {
  std::vector<VoxelIndex> diff;
  std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(diff));
  int bad = 0;
  for (const auto& v : diff)
    if (overlap(a_vox, b_vox, v) >= grazing) ++bad;
  return bad;
}

}  // namespace oracle
