#pragma once

#include <cstdint>

#include "passconn/grid.hpp"
#include "passconn/tracking.hpp"

namespace passconn::phantom {

// Axis-aligned box phantom occupying world [0, extent) mm. A uniform
// orientation field runs along x between two target slabs at the x ends; the
// field is zero inside the slabs, so tracks stop with their final point in a
// slab. The source block is labelled 1 on its own grid.
struct Spec {
  Vec3 extent{24.0, 12.0, 12.0};
  double field_voxel = 1.0;
  double slab_thickness = 2.0;
  std::uint32_t left_label = 10;
  std::uint32_t right_label = 20;
  // When non-zero, right-slab voxels whose centre has y >= split_y carry this
  // label instead of right_label.
  std::uint32_t right_upper_label = 0;
  double split_y = 6.0;
  Vec3 source_lo{8.0, 2.0, 2.0};
  Vec3 source_hi{16.0, 10.0, 10.0};
  double source_voxel = 1.0;
};

inline constexpr std::uint32_t source_label = 1;

struct Phantom {
  Spec spec;
  DirectionField field;
  LabelVolume targets;  // on the field grid
  LabelVolume source;   // on a source_voxel grid covering the same box
};

// Grid of cubic voxels tiling [0, extent); extent must be a multiple of voxel.
std::pair<GridShape, Affine> box_grid(const Vec3& extent, double voxel);

Phantom make(const Spec& spec);

// Thin 8x2x2 mm source bar centred in the box.
Spec bar(double source_voxel);
// 8x8x8 mm source block centred in the box.
Spec slab(double source_voxel);

}  // namespace passconn::phantom
