#include "passconn/superres.hpp"

#include "passconn/error.hpp"

namespace passconn {

double superres_spacing(const LabelVolume& hi_source) { return hi_source.voxel_size().minCoeff() / 2.0; }

ConnectivityMatrix superres_connectivity(const Tractogram& tg, const SourceRegion& hi_source,
                                         const LabelVolume& targets, EndpointMode mode, int threads,
                                         bool self_check) {
  const double spacing = superres_spacing(hi_source.volume());
  Tractogram upsampled;
  upsampled.metadata = tg.metadata;
  upsampled.streamlines.reserve(tg.size());
  for (const auto& s : tg.streamlines) upsampled.streamlines.push_back(upsample(s, spacing));

  ConnectivityMatrix m = connectivity_from_tractogram(upsampled, hi_source, targets, mode, threads);
  if (self_check) {
    const auto plain = connectivity_from_tractogram(tg, hi_source, targets, mode, threads);
    if (!(plain == m))
      throw Error("super-resolution self-check failed: upsampled and original streamlines disagree");
  }
  m.provenance.algorithm = "superres";
  return m;
}

}  // namespace passconn
