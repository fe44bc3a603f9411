#pragma once

#include <span>
#include <vector>

#include "slicewb/core.hpp"

namespace slicewb {

struct SliceDemand {
  SliceId slice_id;
  int orchestrated_svrb = 0;
  double sw = 0.0;
  int demanded_vrb = 0;  // vRBs needed to drain the slice's buffered traffic
};

struct VrbAllocation {
  SliceId slice_id;
  int final_vrb = 0;
  int from_pool = 0;
};

/// A slice is overflowed when its demand strictly exceeds its svRBs.
inline bool overflowed(const SliceDemand& d) { return d.demanded_vrb > d.orchestrated_svrb; }

/// Unused vRBs available for sharing: capacity never orchestrated plus the
/// spare svRBs of every non-overflowed slice. Throws CapacityExceeded when
/// the orchestrated svRBs do not fit in `capacity`.
int build_pool(std::span<const SliceDemand> demands, int capacity);

/// Final per-slice vRBs under soft isolation.
///
/// Non-overflowed slices receive exactly their demand. Overflowed slices keep
/// their svRBs and receive floor(pool * sw_i / sum of overflowed sw) from the
/// pool; flooring remainders stay unallocated. When every overflowed slice has
/// zero weight nothing is distributed. Output order follows `demands`.
std::vector<VrbAllocation> share_pool(std::span<const SliceDemand> demands, int capacity);

/// Hard isolation: each slice uses min(demand, svRB) and never more.
std::vector<VrbAllocation> hard_allocate(std::span<const SliceDemand> demands, int capacity);

}  // namespace slicewb
