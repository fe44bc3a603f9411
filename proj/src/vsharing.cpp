#include "slicewb/vsharing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slicewb/error.hpp"

namespace slicewb {
namespace {

// Shares such as 9 * 0.1 / 0.3 land a hair below the integer in binary
// floating point; the tolerance keeps them on the integer.
constexpr double kFloorTolerance = 1e-9;

void check_capacity(std::span<const SliceDemand> demands, int capacity) {
  long total = 0;
  for (const auto& d : demands) {
    if (d.orchestrated_svrb < 0 || d.demanded_vrb < 0) {
      throw Error(ErrorKind::Validation, "negative svRB or demand for slice " + d.slice_id);
    }
    total += d.orchestrated_svrb;
  }
  if (total > capacity) {
    throw Error(ErrorKind::CapacityExceeded,
                "orchestrated svRBs " + std::to_string(total) + " exceed capacity " +
                    std::to_string(capacity));
  }
}

}  // namespace

int build_pool(std::span<const SliceDemand> demands, int capacity) {
  check_capacity(demands, capacity);
  int pool = capacity;
  for (const auto& d : demands) {
    pool -= d.orchestrated_svrb;
    if (!overflowed(d)) pool += d.orchestrated_svrb - d.demanded_vrb;
  }
  return pool;
}

std::vector<VrbAllocation> share_pool(std::span<const SliceDemand> demands, int capacity) {
  const int pool = build_pool(demands, capacity);

  double weight_sum = 0.0;
  for (const auto& d : demands) {
    if (overflowed(d)) weight_sum += d.sw;
  }

  std::vector<VrbAllocation> out;
  out.reserve(demands.size());
  for (const auto& d : demands) {
    VrbAllocation a{d.slice_id, d.demanded_vrb, 0};
    if (overflowed(d)) {
      if (weight_sum > 0.0 && d.sw > 0.0) {
        a.from_pool = static_cast<int>(std::floor(pool * d.sw / weight_sum + kFloorTolerance));
      }
      a.final_vrb = d.orchestrated_svrb + a.from_pool;
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<VrbAllocation> hard_allocate(std::span<const SliceDemand> demands, int capacity) {
  check_capacity(demands, capacity);
  std::vector<VrbAllocation> out;
  out.reserve(demands.size());
  for (const auto& d : demands) {
    out.push_back({d.slice_id, std::min(d.demanded_vrb, d.orchestrated_svrb), 0});
  }
  return out;
}

}  // namespace slicewb
