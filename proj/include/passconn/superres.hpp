#pragma once

#include "passconn/connectivity.hpp"

namespace passconn {

// Point spacing used when accumulating on `hi_source`: half its smallest voxel edge.
double superres_spacing(const LabelVolume& hi_source);

// Upsamples every streamline to superres_spacing(hi_source) and accumulates
// pass-through connectivity on the high-resolution source grid. With
// `self_check`, the result is compared against accumulation of the original
// streamlines (exact traversal makes them equal) and a mismatch throws.
ConnectivityMatrix superres_connectivity(const Tractogram& tg, const SourceRegion& hi_source,
                                         const LabelVolume& targets, EndpointMode mode, int threads = 0,
#ifdef NDEBUG
                                         bool self_check = false
#else
                                         bool self_check = true
#endif
);

}  // namespace passconn
