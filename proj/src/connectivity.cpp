#include "passconn/connectivity.hpp"

#include <algorithm>
#include <memory>

#include "parallel.hpp"
#include "passconn/error.hpp"

namespace passconn {

ConnectivityMatrix::ConnectivityMatrix(std::vector<VoxelIndex> row_voxels, std::vector<std::uint32_t> labels)
    : row_voxels_(std::move(row_voxels)), labels_(std::move(labels)) {
  if (!std::is_sorted(labels_.begin(), labels_.end()) ||
      std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end())
    throw ArgumentError("matrix column labels must be strictly ascending");
  if (std::find(labels_.begin(), labels_.end(), 0u) != labels_.end())
    throw ArgumentError("label 0 cannot be a target column");
  counts_.assign(row_voxels_.size() * cols(), 0);
}

std::optional<std::size_t> ConnectivityMatrix::column_of(std::uint32_t label) const {
  const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin()) + 1;
}

std::int64_t ConnectivityMatrix::target_sum(std::size_t r) const {
  std::int64_t total = 0;
  for (std::size_t c = 1; c < cols(); ++c) total += at(r, c);
  return total;
}

ConnectivityMatrix& ConnectivityMatrix::operator+=(const ConnectivityMatrix& other) {
  if (other.row_voxels_ != row_voxels_ || other.labels_ != labels_)
    throw ArgumentError("cannot add connectivity matrices with different row or column indices");
  for (std::size_t n = 0; n < counts_.size(); ++n) counts_[n] += other.counts_[n];
  return *this;
}

bool ConnectivityMatrix::operator==(const ConnectivityMatrix& other) const {
  return row_voxels_ == other.row_voxels_ && labels_ == other.labels_ && counts_ == other.counts_;
}

ConnectivityMatrix make_matrix(const SourceRegion& source, const LabelVolume& targets) {
  ConnectivityMatrix m(source.voxels(), targets.distinct_labels());
  auto& p = m.provenance;
  p.source_dims = source.volume().shape().dims();
  p.source_affine = source.volume().affine().matrix();
  p.target_dims = targets.shape().dims();
  p.target_affine = targets.affine().matrix();
  return m;
}

Accumulator::Accumulator(const SourceRegion& source, const LabelVolume& targets, EndpointMode mode)
    : targets_(&targets), mode_(mode), scratch_(source) {}

void Accumulator::add(const Streamline& line, ConnectivityMatrix& into) {
  const auto rows = scratch_.rows(line);
  if (rows.empty()) return;
  labels_ = endpoint_region(line, *targets_, mode_);
  cols_.clear();
  for (auto l : labels_)
    if (auto c = into.column_of(l)) cols_.push_back(*c);
  std::sort(cols_.begin(), cols_.end());
  cols_.erase(std::unique(cols_.begin(), cols_.end()), cols_.end());
  if (cols_.empty()) cols_.push_back(0);
  for (auto r : rows)
    for (auto c : cols_) ++into.at(static_cast<std::size_t>(r), c);
}

namespace {

// Per-worker partial matrices merged in worker order.
class PartialSums {
 public:
  PartialSums(const ConnectivityMatrix& prototype, const SourceRegion& source, const LabelVolume& targets,
              EndpointMode mode, int workers) {
    for (int w = 0; w < workers; ++w) {
      partials_.push_back(prototype);
      accumulators_.push_back(std::make_unique<Accumulator>(source, targets, mode));
    }
  }

  void add(std::span<const Streamline> lines) {
    detail::parallel_chunks(lines.size(), static_cast<int>(partials_.size()),
                            [&](int w, std::size_t begin, std::size_t end) {
                              for (std::size_t n = begin; n < end; ++n) accumulators_[w]->add(lines[n], partials_[w]);
                            });
  }

  void merge_into(ConnectivityMatrix& out) const {
    for (const auto& p : partials_) out += p;
  }

 private:
  std::vector<ConnectivityMatrix> partials_;
  std::vector<std::unique_ptr<Accumulator>> accumulators_;
};

}  // namespace

ConnectivityMatrix traditional_connectivity(const SourceRegion& source, const LabelVolume& targets,
                                            const DirectionField& field, const TrackParams& tp,
                                            const RunParams& rp, int threads) {
  tp.validate();
  if (rp.k < 1) throw ArgumentError("K must be at least 1");
  ConnectivityMatrix m = make_matrix(source, targets);
  std::vector<std::int64_t> attempts(source.size(), 0);
  std::vector<std::int64_t> generated(source.size(), 0);

  // Each worker owns whole rows, so no merging is needed.
  detail::parallel_chunks(source.size(), detail::resolve_threads(threads), [&](int, std::size_t begin, std::size_t end) {
    std::vector<std::size_t> cols;
    for (std::size_t row = begin; row < end; ++row) {
      attempts[row] = generate_for_row(source, field, tp, rp.k, row, [&](const Streamline& s) {
        ++generated[row];
        cols.clear();
        for (auto l : endpoint_region(s, targets, rp.endpoint_mode))
          if (auto c = m.column_of(l)) cols.push_back(*c);
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        if (cols.empty()) cols.push_back(0);
        for (auto c : cols) ++m.at(row, c);
      });
    }
  });

  auto& p = m.provenance;
  p.algorithm = "traditional";
  p.k = rp.k;
  p.rng_seed = tp.rng_seed;
  p.endpoint_mode = rp.endpoint_mode;
  for (std::size_t row = 0; row < source.size(); ++row) {
    p.attempts += attempts[row];
    p.streamlines += generated[row];
    if (generated[row] < rp.k) {
      p.capped_rows.push_back(row);
      const auto& v = source.voxels()[row];
      p.warnings.push_back("voxel (" + std::to_string(v.i) + "," + std::to_string(v.j) + "," + std::to_string(v.k) +
                           ") reached the attempt cap with " + std::to_string(generated[row]) + " of " +
                           std::to_string(rp.k) + " streamlines");
    }
  }
  return m;
}

ConnectivityMatrix proposed_connectivity(const SourceRegion& source, const LabelVolume& targets,
                                         const DirectionField& field, const TrackParams& tp,
                                         const RunParams& rp, int threads) {
  ConnectivityMatrix m = make_matrix(source, targets);
  const int workers = detail::resolve_threads(threads);
  PartialSums sums(m, source, targets, rp.endpoint_mode, workers);
  TrackingReport report;
  generate_region(source, field, tp, rp.k_star, workers, [&](std::span<const Streamline> batch) { sums.add(batch); },
                  &report);
  sums.merge_into(m);
  auto& p = m.provenance;
  p.algorithm = "proposed";
  p.k_star = rp.k_star;
  p.rng_seed = tp.rng_seed;
  p.endpoint_mode = rp.endpoint_mode;
  p.streamlines = report.generated;
  p.attempts = report.attempts;
  return m;
}

ConnectivityMatrix connectivity_from_tractogram(const Tractogram& tg, const SourceRegion& source,
                                                const LabelVolume& targets, EndpointMode mode, int threads) {
  if (tg.empty()) throw ArgumentError("tractogram contains no streamlines");
  ConnectivityMatrix m = make_matrix(source, targets);
  PartialSums sums(m, source, targets, mode, detail::resolve_threads(threads));
  sums.add(tg.streamlines);
  sums.merge_into(m);
  m.provenance.algorithm = "from-tractogram";
  m.provenance.endpoint_mode = mode;
  m.provenance.streamlines = static_cast<std::int64_t>(tg.size());
  return m;
}

NormalizedRows normalize_rows(const ConnectivityMatrix& c) {
  NormalizedRows out;
  out.rows = c.rows();
  out.regions = c.regions();
  out.values.assign(out.rows * out.regions, 0.0);
  out.zero_rows.assign(out.rows, false);
  for (std::size_t r = 0; r < c.rows(); ++r) {
    const auto sum = c.target_sum(r);
    if (sum == 0) {
      out.zero_rows[r] = true;
      continue;
    }
    for (std::size_t col = 1; col < c.cols(); ++col)
      out.values[r * out.regions + col - 1] = static_cast<double>(c.at(r, col)) / static_cast<double>(sum);
  }
  return out;
}

std::vector<std::uint32_t> argmax_labels(const ConnectivityMatrix& c) {
  std::vector<std::uint32_t> out(c.rows(), 0);
  for (std::size_t r = 0; r < c.rows(); ++r) {
    std::int64_t best = 0;
    for (std::size_t col = 1; col < c.cols(); ++col) {
      if (c.at(r, col) > best) {
        best = c.at(r, col);
        out[r] = c.labels()[col - 1];
      }
    }
  }
  return out;
}

LabelVolume parcellate(const ConnectivityMatrix& c, const LabelVolume& source, std::uint32_t source_label) {
  LabelVolume out(source.shape(), source.affine());
  const auto labels = argmax_labels(c);
  for (std::size_t r = 0; r < c.rows(); ++r) {
    const auto& v = c.row_voxels()[r];
    if (!source.shape().contains(v) || source.at(v) != source_label)
      throw ArgumentError("matrix row " + std::to_string(r) + " refers to voxel (" + std::to_string(v.i) + "," +
                          std::to_string(v.j) + "," + std::to_string(v.k) + ") outside source label " +
                          std::to_string(source_label));
    out.set(v, labels[r]);
  }
  return out;
}

}  // namespace passconn
