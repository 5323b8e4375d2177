#include "passconn/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "parallel.hpp"
#include "passconn/error.hpp"
#include "passconn/nifti.hpp"

namespace passconn {

DirectionField::DirectionField(GridShape shape, Affine affine, std::vector<Vec3> vectors)
    : shape_(shape), affine_(std::move(affine)), vectors_(std::move(vectors)) {
  if (vectors_.size() != shape_.size())
    throw ConfigError("direction field has " + std::to_string(vectors_.size()) + " vectors for " +
                      std::to_string(shape_.size()) + " voxels");
  for (std::size_t n = 0; n < vectors_.size(); ++n) {
    const double norm = vectors_[n].norm();
    if (norm != 0.0 && std::abs(norm - 1.0) > 1e-6)
      throw ConfigError("direction field vector at voxel " + std::to_string(n) + " is not unit length (norm " +
                        std::to_string(norm) + ")");
  }
}

std::optional<Vec3> DirectionField::at(const Vec3& world) const {
  const auto v = voxel_of(world, shape_, affine_);
  if (!v) return std::nullopt;
  return vectors_[shape_.linear(*v)];
}

DirectionField DirectionField::load(const std::filesystem::path& path) {
  const auto img = nifti::read(path);
  if (img.dims[3] != 3)
    throw UnsupportedFormat(path.string() + ": direction field needs a 4th dimension of size 3, got " +
                            std::to_string(img.dims[3]));
  const GridShape shape({img.dims[0], img.dims[1], img.dims[2]});
  const std::size_t n = shape.size();
  std::vector<Vec3> vectors(n);
  for (std::size_t v = 0; v < n; ++v) {
    Vec3 d(img.data[v], img.data[v + n], img.data[v + 2 * n]);
    // Float storage loses a little precision; renormalise.
    const double norm = d.norm();
    if (norm > 0.0) d /= norm;
    vectors[v] = d;
  }
  return DirectionField(shape, img.affine, std::move(vectors));
}

void DirectionField::save(const std::filesystem::path& path) const {
  nifti::Image img;
  img.dims = {shape_.nx(), shape_.ny(), shape_.nz(), 3};
  img.affine = affine_;
  img.datatype = nifti::Datatype::float32;
  const std::size_t n = shape_.size();
  img.data.resize(3 * n);
  for (std::size_t v = 0; v < n; ++v)
    for (int c = 0; c < 3; ++c) img.data[v + c * n] = vectors_[v][c];
  nifti::write(img, path);
}

void TrackParams::validate() const {
  if (!(step_size > 0.0)) throw ArgumentError("step size must be positive");
  if (max_steps < 1) throw ArgumentError("max_steps must be at least 1");
  if (!(angular_noise_deg >= 0.0)) throw ArgumentError("angular noise must be non-negative");
  if (!(min_length_mm >= 0.0)) throw ArgumentError("minimum length must be non-negative");
}

Vec3 sample_seed_in_voxel(const VoxelIndex& voxel, const Affine& affine, Rng& rng) {
  const double x = voxel.i - 0.5 + rng.uniform();
  const double y = voxel.j - 0.5 + rng.uniform();
  const double z = voxel.k - 0.5 + rng.uniform();
  return affine.to_world(Vec3(x, y, z));
}

Vec3 sample_seed_in_region(const SourceRegion& source, Rng& rng) {
  const auto& voxels = source.voxels();
  return sample_seed_in_voxel(voxels[rng.below(voxels.size())], source.volume().affine(), rng);
}

namespace {

bool trackable(const std::optional<Vec3>& v) { return v && !v->isZero(0.0); }

Vec3 perturb(const Vec3& dir, double sigma_rad, Rng& rng) {
  // Orthonormal basis perpendicular to dir.
  int least = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(dir[a]) < std::abs(dir[least])) least = a;
  const Vec3 e1 = dir.cross(Vec3::Unit(least)).normalized();
  const Vec3 e2 = dir.cross(e1);
  const double g1 = rng.normal();
  const double g2 = rng.normal();
  return (dir + sigma_rad * (g1 * e1 + g2 * e2)).normalized();
}

void propagate(const Vec3& seed, const Vec3& initial, const DirectionField& field, const TrackParams& params,
               Rng& rng, std::vector<Vec3>& out) {
  const double sigma = params.angular_noise_deg * std::numbers::pi / 180.0;
  Vec3 pos = seed;
  Vec3 prev = initial;
  for (int s = 0; s < params.max_steps; ++s) {
    const auto v = field.at(pos);
    if (!trackable(v)) break;
    Vec3 dir = *v;
    if (dir.dot(prev) < 0.0) dir = -dir;
    if (sigma > 0.0) dir = perturb(dir, sigma, rng);
    pos += params.step_size * dir;
    out.push_back(pos);
    prev = dir;
  }
}

}  // namespace

std::optional<Streamline> trac(const Vec3& seed, const DirectionField& field, const TrackParams& params,
                               Rng& rng) {
  const auto initial = field.at(seed);
  if (!trackable(initial)) return std::nullopt;

  std::vector<Vec3> forward{seed};
  propagate(seed, *initial, field, params, rng, forward);
  std::vector<Vec3> backward;
  propagate(seed, -*initial, field, params, rng, backward);

  std::vector<Vec3> points(forward.rbegin(), forward.rend());
  points.insert(points.end(), backward.begin(), backward.end());
  if (points.size() < 2) return std::nullopt;
  if (static_cast<double>(points.size() - 1) * params.step_size < params.min_length_mm) return std::nullopt;
  return Streamline(std::move(points));
}

std::optional<Streamline> track_region_attempt(const SourceRegion& source, const DirectionField& field,
                                               const TrackParams& params, std::uint64_t ordinal) {
  Rng rng = Rng::for_ordinal(params.rng_seed, ordinal);
  const Vec3 seed = sample_seed_in_region(source, rng);
  return trac(seed, field, params, rng);
}

std::optional<Streamline> track_voxel_attempt(const SourceRegion& source, const DirectionField& field,
                                              const TrackParams& params, std::int64_t k, std::size_t row,
                                              std::int64_t attempt) {
  const auto ordinal = static_cast<std::uint64_t>(row) * static_cast<std::uint64_t>(attempt_cap_factor * k) +
                       static_cast<std::uint64_t>(attempt);
  Rng rng = Rng::for_ordinal(params.rng_seed, ordinal);
  const Vec3 seed = sample_seed_in_voxel(source.voxels()[row], source.volume().affine(), rng);
  return trac(seed, field, params, rng);
}

void generate_region(const SourceRegion& source, const DirectionField& field, const TrackParams& params,
                     std::int64_t k_star, int threads,
                     const std::function<void(std::span<const Streamline>)>& consume, TrackingReport* report) {
  params.validate();
  if (k_star < 1) throw ArgumentError("K* must be at least 1");
  const int workers = detail::resolve_threads(threads);
  const std::int64_t cap = attempt_cap_factor * k_star;

  std::int64_t generated = 0;
  std::int64_t next = 0;
  std::int64_t attempts = 0;
  std::vector<std::optional<Streamline>> slots;
  std::vector<Streamline> batch;
  while (generated < k_star && next < cap) {
    // Batch size only affects scheduling; streamlines are taken in ordinal order.
    const std::int64_t want = k_star - generated;
    const std::int64_t size = std::min<std::int64_t>(cap - next, std::clamp<std::int64_t>(want + want / 8 + 16, 64, 8192));
    slots.assign(static_cast<std::size_t>(size), std::nullopt);
    detail::parallel_chunks(slots.size(), workers, [&](int, std::size_t begin, std::size_t end) {
      for (std::size_t n = begin; n < end; ++n)
        slots[n] = track_region_attempt(source, field, params, static_cast<std::uint64_t>(next) + n);
    });
    batch.clear();
    for (std::size_t n = 0; n < slots.size() && generated < k_star; ++n) {
      attempts = next + static_cast<std::int64_t>(n) + 1;
      if (slots[n]) {
        batch.push_back(std::move(*slots[n]));
        ++generated;
      }
    }
    next += size;
    if (!batch.empty()) consume(batch);
  }
  if (report) {
    report->generated = generated;
    report->attempts = attempts;
  }
  if (generated < k_star)
    throw AttemptCapExceeded("attempt cap of " + std::to_string(cap) + " reached after generating " +
                                 std::to_string(generated) + " of " + std::to_string(k_star) + " streamlines",
                             generated);
}

std::int64_t generate_for_row(const SourceRegion& source, const DirectionField& field, const TrackParams& params,
                              std::int64_t k, std::size_t row,
                              const std::function<void(const Streamline&)>& consume) {
  const std::int64_t cap = attempt_cap_factor * k;
  std::int64_t generated = 0;
  std::int64_t attempt = 0;
  while (generated < k && attempt < cap) {
    if (auto s = track_voxel_attempt(source, field, params, k, row, attempt)) {
      consume(*s);
      ++generated;
    }
    ++attempt;
  }
  return attempt;
}

Tractogram track_region(const SourceRegion& source, const DirectionField& field, const TrackParams& params,
                        std::int64_t k_star, int threads, TrackingReport* report) {
  Tractogram tg;
  tg.streamlines.reserve(static_cast<std::size_t>(k_star));
  generate_region(source, field, params, k_star, threads,
                  [&](std::span<const Streamline> batch) {
                    tg.streamlines.insert(tg.streamlines.end(), batch.begin(), batch.end());
                  },
                  report);
  tg.metadata["step_size_mm"] = std::to_string(params.step_size);
  return tg;
}

Tractogram track_per_voxel(const SourceRegion& source, const DirectionField& field, const TrackParams& params,
                           std::int64_t k, int threads, TrackingReport* report) {
  params.validate();
  if (k < 1) throw ArgumentError("K must be at least 1");
  std::vector<std::vector<Streamline>> per_row(source.size());
  std::vector<std::int64_t> attempts(source.size(), 0);
  detail::parallel_chunks(source.size(), detail::resolve_threads(threads), [&](int, std::size_t begin, std::size_t end) {
    for (std::size_t row = begin; row < end; ++row)
      attempts[row] = generate_for_row(source, field, params, k, row,
                                       [&](const Streamline& s) { per_row[row].push_back(s); });
  });
  Tractogram tg;
  TrackingReport local;
  for (std::size_t row = 0; row < per_row.size(); ++row) {
    local.attempts += attempts[row];
    local.generated += static_cast<std::int64_t>(per_row[row].size());
    if (static_cast<std::int64_t>(per_row[row].size()) < k) local.capped_rows.push_back(row);
    for (auto& s : per_row[row]) tg.streamlines.push_back(std::move(s));
  }
  tg.metadata["step_size_mm"] = std::to_string(params.step_size);
  if (report) *report = std::move(local);
  return tg;
}

}  // namespace passconn
