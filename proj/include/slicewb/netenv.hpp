#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "slicewb/core.hpp"
#include "slicewb/rng.hpp"
#include "slicewb/vsharing.hpp"

namespace slicewb {

enum class IsolationMode { Soft, Hard };

struct EnvConfig {
  int capacity_h = 12;         // H, total vRBs
  double per_vrb_rate = 2.1;   // Mbps delivered per final vRB
  double noise_std = 0.03;     // relative std-dev of multiplicative throughput noise
  IsolationMode isolation = IsolationMode::Soft;
  std::uint64_t rng_seed = 0;
};

enum class EventKind { SliceLeave, SliceJoin, SlaChange };

struct DynamicsEvent {
  int slot = 0;
  EventKind kind = EventKind::SliceLeave;
  SliceId slice_id;
  double q_throughput = 0.0;  // sla_change only
  double q_fps = 0.0;
};

/// vRBs the slice's buffered traffic needs in one slot:
/// ceil(frame_rate * frame_size / per_vrb_rate), jittered by burstiness.
/// Draws from `rng` only when burstiness > 0.
int demand_vrbs(const TrafficProfile& profile, const EnvConfig& config, Rng& rng);

struct StepOutcome {
  std::map<SliceId, PerfVector> perf;
  std::vector<SliceDemand> demands;
  std::vector<VrbAllocation> allocations;
};

/// Ground-truth performance of every slice that has an action. Demands are
/// drawn, shared through the vSharing layer (soft) or clipped to svRBs (hard),
/// then throughput = final_vrb * per_vrb_rate * (1 + eps) and
/// fps = min(frame_rate, throughput / frame_size).
StepOutcome step(const std::map<SliceId, Action>& actions, std::span<const SliceSpec> specs,
                 const EnvConfig& config, Rng& rng);

/// Applies all events scheduled exactly at `slot`. Throws Scenario on an
/// unknown slice id.
std::vector<SliceSpec> apply_events(int slot, std::span<const DynamicsEvent> events,
                                    std::vector<SliceSpec> specs);

/// Stateful wrapper owning the environment's random stream.
class Environment {
 public:
  explicit Environment(EnvConfig config);
  Environment(EnvConfig config, Rng rng);

  StepOutcome step(const std::map<SliceId, Action>& actions, std::span<const SliceSpec> specs);

  const EnvConfig& config() const { return config_; }
  long steps() const { return steps_; }

 private:
  EnvConfig config_;
  Rng rng_;
  long steps_ = 0;
};

}  // namespace slicewb
