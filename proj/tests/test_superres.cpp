#include <doctest.h>

#include "passconn/connectivity.hpp"
#include "passconn/error.hpp"
#include "passconn/phantom.hpp"
#include "passconn/superres.hpp"

using namespace passconn;

TEST_CASE("superres spacing is half the smallest voxel edge") {
  const auto [shape, affine] = phantom::box_grid({4, 4, 4}, 1.0);
  LabelVolume vol(shape, affine);
  CHECK(superres_spacing(vol) == 0.5);
  const LabelVolume aniso(shape, Affine(Eigen::Matrix4d(Eigen::Vector4d(1.0, 0.6, 2.0, 1.0).asDiagonal())));
  CHECK(superres_spacing(aniso) == doctest::Approx(0.3));
}

TEST_CASE("superres matches plain accumulation") {
  auto spec = phantom::bar(2.0);
  spec.field_voxel = 2.0;
  const auto lo = phantom::make(spec);
  TrackParams tp;
  tp.step_size = 2.0;
  tp.angular_noise_deg = 3.0;
  tp.rng_seed = 5;
  const SourceRegion lo_src(lo.source, phantom::source_label);
  const auto tg = track_region(lo_src, lo.field, tp, 300, 1);

  SUBCASE("identity factor") {
    const auto plain = connectivity_from_tractogram(tg, lo_src, lo.targets, EndpointMode::both, 1);
    const auto sr = superres_connectivity(tg, lo_src, lo.targets, EndpointMode::both, 1, true);
    CHECK(sr == plain);
    CHECK(sr.provenance.algorithm == "superres");
  }
  SUBCASE("half-millimetre source grid") {
    spec.source_voxel = 0.5;
    const auto hi = phantom::make(spec);
    const SourceRegion hi_src(hi.source, phantom::source_label);
    CHECK(hi_src.size() == 16 * 4 * 4);
    const auto plain = connectivity_from_tractogram(tg, hi_src, lo.targets, EndpointMode::both, 1);
    const auto sr = superres_connectivity(tg, hi_src, lo.targets, EndpointMode::both, 2, true);
    CHECK(sr == plain);
    CHECK(sr.rows() == hi_src.size());
  }
}
