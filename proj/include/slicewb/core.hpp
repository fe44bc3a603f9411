#pragma once

#include <span>
#include <string>

namespace slicewb {

using SliceId = std::string;

/// Application traffic emitted towards one slice's users.
struct TrafficProfile {
  double frame_rate = 30.0;  // frames per second
  double frame_size = 0.5;   // megabits per frame
  double burstiness = 0.0;   // relative std-dev of per-slot demand jitter
};

/// One slice: identity, SLA thresholds and the (hidden) application profile.
struct SliceSpec {
  SliceId slice_id;
  double q_throughput = 12.0;  // Mbps
  double q_fps = 10.0;
  TrafficProfile profile;
  bool active = true;
};

/// Orchestration decision for one slice: soft-isolated vRB count and
/// sharing weight.
struct Action {
  int svrb = 0;
  double sw = 0.0;

  friend bool operator==(const Action&, const Action&) = default;
};

struct PerfVector {
  double throughput = 0.0;  // Mbps
  double fps = 0.0;
};

struct CostParams {
  double u_h = 1.0;  // per svRB
  double u_s = 1.0;  // per unit sharing weight
};

bool within_bounds(const Action& action, int capacity);

double slice_cost(const Action& action, const CostParams& params);
double total_cost(std::span<const Action> actions, const CostParams& params);

/// Arithmetic mean of the per-metric ratios against the SLA thresholds.
/// Not capped: a slice far above its SLA reports a ratio well above 1.
double normalized_performance(const PerfVector& perf, const SliceSpec& spec);

/// True when every metric meets its threshold.
bool meets_sla(const PerfVector& perf, double q_throughput, double q_fps);

}  // namespace slicewb
