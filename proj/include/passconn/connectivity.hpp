#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "passconn/grid.hpp"
#include "passconn/streamline.hpp"
#include "passconn/tracking.hpp"

namespace passconn {

struct Provenance {
  std::string algorithm;
  std::int64_t k = 0;
  std::int64_t k_star = 0;
  std::uint64_t rng_seed = 0;
  EndpointMode endpoint_mode = EndpointMode::both;
  std::array<int, 3> source_dims{0, 0, 0};
  Eigen::Matrix4d source_affine = Eigen::Matrix4d::Identity();
  std::array<int, 3> target_dims{0, 0, 0};
  Eigen::Matrix4d target_affine = Eigen::Matrix4d::Identity();
  std::int64_t streamlines = 0;  // generated or ingested
  std::int64_t attempts = 0;
  std::vector<std::size_t> capped_rows;  // per-voxel rows left partial by the attempt cap
  std::vector<std::string> warnings;
};

// N source voxels x (M + 1) columns of 64-bit counts. Column 0 collects
// streamlines with no endpoint in any target region; column c >= 1 belongs to
// labels()[c - 1], which are ascending.
class ConnectivityMatrix {
 public:
  ConnectivityMatrix() = default;
  ConnectivityMatrix(std::vector<VoxelIndex> row_voxels, std::vector<std::uint32_t> labels);

  std::size_t rows() const { return row_voxels_.size(); }
  std::size_t cols() const { return labels_.size() + 1; }
  std::size_t regions() const { return labels_.size(); }

  const std::vector<VoxelIndex>& row_voxels() const { return row_voxels_; }
  const std::vector<std::uint32_t>& labels() const { return labels_; }
  std::optional<std::size_t> column_of(std::uint32_t label) const;

  std::int64_t at(std::size_t row, std::size_t col) const { return counts_[row * cols() + col]; }
  std::int64_t& at(std::size_t row, std::size_t col) { return counts_[row * cols() + col]; }
  std::span<const std::int64_t> row(std::size_t r) const { return {counts_.data() + r * cols(), cols()}; }
  std::span<const std::int64_t> counts() const { return counts_; }
  std::span<std::int64_t> counts() { return counts_; }

  // Sum over target columns 1..M.
  std::int64_t target_sum(std::size_t row) const;

  // Elementwise sum; index maps must match.
  ConnectivityMatrix& operator+=(const ConnectivityMatrix& other);
  // Same indices and counts; provenance is not compared.
  bool operator==(const ConnectivityMatrix& other) const;

  Provenance provenance;

 private:
  std::vector<VoxelIndex> row_voxels_;
  std::vector<std::uint32_t> labels_;
  std::vector<std::int64_t> counts_;
};

// Empty matrix with rows for `source` and columns for every non-zero target label.
ConnectivityMatrix make_matrix(const SourceRegion& source, const LabelVolume& targets);

// Adds one streamline: every source voxel it passes through gets +1 in the
// column of each distinct endpoint region, or in column 0 when there is none.
class Accumulator {
 public:
  Accumulator(const SourceRegion& source, const LabelVolume& targets, EndpointMode mode);
  void add(const Streamline& line, ConnectivityMatrix& into);

 private:
  const LabelVolume* targets_;
  EndpointMode mode_;
  PassthroughScratch scratch_;
  std::vector<std::uint32_t> labels_;
  std::vector<std::size_t> cols_;
};

// Per-voxel seeding: K generated streamlines per source voxel, each counted
// only in its own seed voxel's row at its endpoint region(s).
ConnectivityMatrix traditional_connectivity(const SourceRegion& source, const LabelVolume& targets,
                                            const DirectionField& field, const TrackParams& tp,
                                            const RunParams& rp, int threads = 0);

// Region seeding: K* generated streamlines seeded uniformly over the source,
// each counted in every source voxel it passes through.
ConnectivityMatrix proposed_connectivity(const SourceRegion& source, const LabelVolume& targets,
                                         const DirectionField& field, const TrackParams& tp,
                                         const RunParams& rp, int threads = 0);

// Pass-through accumulation over precomputed streamlines.
ConnectivityMatrix connectivity_from_tractogram(const Tractogram& tg, const SourceRegion& source,
                                                const LabelVolume& targets, EndpointMode mode,
                                                int threads = 0);

struct NormalizedRows {
  std::size_t rows = 0;
  std::size_t regions = 0;
  std::vector<double> values;   // rows x regions, row-major
  std::vector<bool> zero_rows;  // rows with no target counts

  double at(std::size_t r, std::size_t c) const { return values[r * regions + c]; }
};

// Divides each row's target columns by their sum; column 0 is dropped.
NormalizedRows normalize_rows(const ConnectivityMatrix& c);

// Per-row argmax label over the target columns (ties go to the smallest
// label; all-zero rows give 0).
std::vector<std::uint32_t> argmax_labels(const ConnectivityMatrix& c);

// Label volume on the source grid holding each row voxel's argmax label.
LabelVolume parcellate(const ConnectivityMatrix& c, const LabelVolume& source, std::uint32_t source_label);

}  // namespace passconn
