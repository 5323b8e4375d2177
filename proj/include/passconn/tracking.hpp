#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "passconn/grid.hpp"
#include "passconn/random.hpp"
#include "passconn/streamline.hpp"

namespace passconn {

// Piecewise-constant orientation field; a zero vector marks an untrackable
// voxel. Non-zero vectors are unit length (within 1e-6).
class DirectionField {
 public:
  DirectionField(GridShape shape, Affine affine, std::vector<Vec3> vectors);

  const GridShape& shape() const { return shape_; }
  const Affine& affine() const { return affine_; }
  const std::vector<Vec3>& vectors() const { return vectors_; }

  // Nearest-neighbour lookup; nullopt outside the grid.
  std::optional<Vec3> at(const Vec3& world) const;

  // NIfTI volume with a 4th dimension of size 3.
  static DirectionField load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  GridShape shape_;
  Affine affine_;
  std::vector<Vec3> vectors_;
};

struct TrackParams {
  double step_size = 0.5;          // mm
  int max_steps = 1000;            // per direction
  double angular_noise_deg = 0.0;  // std-dev of per-step angular perturbation
  double min_length_mm = 0.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct RunParams {
  std::int64_t k = 200;          // streamlines per voxel, per-voxel seeding
  std::int64_t k_star = 100000;  // total streamlines, region seeding
  EndpointMode endpoint_mode = EndpointMode::both;
};

// Attempt cap multiplier shared by both seeding schemes.
inline constexpr std::int64_t attempt_cap_factor = 50;

Vec3 sample_seed_in_voxel(const VoxelIndex& voxel, const Affine& affine, Rng& rng);
Vec3 sample_seed_in_region(const SourceRegion& source, Rng& rng);

// Bidirectional propagation from `seed`. Each direction marches until it
// leaves the field, enters a zero voxel (the terminating point is kept) or
// takes max_steps steps. Returns nullopt for an untrackable seed, fewer than
// two points, or a track shorter than min_length_mm.
std::optional<Streamline> trac(const Vec3& seed, const DirectionField& field, const TrackParams& params,
                               Rng& rng);

// Seed attempt `ordinal` of a region-seeded run.
std::optional<Streamline> track_region_attempt(const SourceRegion& source, const DirectionField& field,
                                               const TrackParams& params, std::uint64_t ordinal);

// Attempt `attempt` for source row `row` of a per-voxel run. Ordinals are
// row * attempt_cap_factor * k + attempt, unique across the run.
std::optional<Streamline> track_voxel_attempt(const SourceRegion& source, const DirectionField& field,
                                              const TrackParams& params, std::int64_t k, std::size_t row,
                                              std::int64_t attempt);

struct TrackingReport {
  std::int64_t generated = 0;
  std::int64_t attempts = 0;
  std::vector<std::size_t> capped_rows;  // per-voxel runs that hit the attempt cap
};

// Region seeding driver: hands consecutive batches of generated streamlines,
// in ordinal order, to `consume` until k_star have been produced. Throws
// AttemptCapExceeded after attempt_cap_factor * k_star attempts.
void generate_region(const SourceRegion& source, const DirectionField& field, const TrackParams& params,
                     std::int64_t k_star, int threads,
                     const std::function<void(std::span<const Streamline>)>& consume,
                     TrackingReport* report = nullptr);

// Per-voxel seeding for one row: calls `consume` for each of up to k
// generated streamlines. Returns the number of attempts made; fewer than k
// streamlines means the row hit the attempt cap.
std::int64_t generate_for_row(const SourceRegion& source, const DirectionField& field, const TrackParams& params,
                              std::int64_t k, std::size_t row,
                              const std::function<void(const Streamline&)>& consume);

// Region seeding: exactly k_star streamlines in ordinal order. Throws
// AttemptCapExceeded after attempt_cap_factor * k_star attempts.
Tractogram track_region(const SourceRegion& source, const DirectionField& field, const TrackParams& params,
                        std::int64_t k_star, int threads, TrackingReport* report = nullptr);

// Per-voxel seeding: k streamlines per source voxel, ordered by row.
Tractogram track_per_voxel(const SourceRegion& source, const DirectionField& field, const TrackParams& params,
                           std::int64_t k, int threads, TrackingReport* report = nullptr);

}  // namespace passconn
