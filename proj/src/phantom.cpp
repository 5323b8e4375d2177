#include "passconn/phantom.hpp"

#include <cmath>

#include "passconn/error.hpp"

namespace passconn::phantom {

std::pair<GridShape, Affine> box_grid(const Vec3& extent, double voxel) {
  if (!(voxel > 0.0)) throw ArgumentError("phantom voxel size must be positive");
  std::array<int, 3> dims;
  for (int a = 0; a < 3; ++a) {
    const double n = extent[a] / voxel;
    dims[a] = static_cast<int>(std::lround(n));
    if (dims[a] < 1 || std::abs(n - dims[a]) > 1e-6)
      throw ArgumentError("phantom extent " + std::to_string(extent[a]) + " mm is not a multiple of the " +
                          std::to_string(voxel) + " mm voxel");
  }
  // Voxel i covers world [i*voxel, (i+1)*voxel).
  return {GridShape(dims), Affine::scaling(Vec3::Constant(voxel), Vec3::Constant(voxel / 2))};
}

Phantom make(const Spec& spec) {
  auto [fshape, faffine] = box_grid(spec.extent, spec.field_voxel);
  std::vector<Vec3> vectors(fshape.size(), Vec3::UnitX());
  LabelVolume targets(fshape, faffine);
  for (std::size_t n = 0; n < fshape.size(); ++n) {
    const auto v = fshape.unravel(n);
    const Vec3 c = faffine.to_world(Vec3(v.i, v.j, v.k));
    std::uint32_t label = 0;
    bool slab = false;
    if (c.x() < spec.slab_thickness) {
      slab = true;
      label = spec.left_label;
    } else if (c.x() >= spec.extent.x() - spec.slab_thickness) {
      slab = true;
      label = (spec.right_upper_label != 0 && c.y() >= spec.split_y) ? spec.right_upper_label : spec.right_label;
    }
    if (slab) {
      vectors[n] = Vec3::Zero();
      targets.set(v, label);
    }
  }

  auto [sshape, saffine] = box_grid(spec.extent, spec.source_voxel);
  LabelVolume source(sshape, saffine);
  for (std::size_t n = 0; n < sshape.size(); ++n) {
    const auto v = sshape.unravel(n);
    const Vec3 c = saffine.to_world(Vec3(v.i, v.j, v.k));
    if ((c.array() >= spec.source_lo.array()).all() && (c.array() < spec.source_hi.array()).all())
      source.set(v, source_label);
  }
  if (source.voxels_with_label(source_label).empty())
    throw ArgumentError("phantom source block contains no voxel centre");

  return {spec, DirectionField(fshape, faffine, std::move(vectors)), std::move(targets), std::move(source)};
}

Spec bar(double source_voxel) {
  Spec s;
  s.source_lo = {8.0, 5.0, 5.0};
  s.source_hi = {16.0, 7.0, 7.0};
  s.source_voxel = source_voxel;
  return s;
}

Spec slab(double source_voxel) {
  Spec s;
  s.source_lo = {8.0, 2.0, 2.0};
  s.source_hi = {16.0, 10.0, 10.0};
  s.source_voxel = source_voxel;
  return s;
}

}  // namespace passconn::phantom
