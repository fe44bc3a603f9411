#include "slicewb/netenv.hpp"

#include <algorithm>
#include <cmath>

#include "slicewb/error.hpp"

namespace slicewb {

int demand_vrbs(const TrafficProfile& profile, const EnvConfig& config, Rng& rng) {
  double need = profile.frame_rate * profile.frame_size / config.per_vrb_rate;
  if (profile.burstiness > 0.0) {
    std::normal_distribution<double> jitter(0.0, profile.burstiness);
    need *= 1.0 + jitter(rng);
  }
  // 30 * 0.7 / 2.1 is 10.000000000000002 in doubles.
  return std::max(0, static_cast<int>(std::ceil(need - 1e-9)));
}

StepOutcome step(const std::map<SliceId, Action>& actions, std::span<const SliceSpec> specs,
                 const EnvConfig& config, Rng& rng) {
  StepOutcome out;
  std::vector<const SliceSpec*> order;
  for (const auto& spec : specs) {
    auto it = actions.find(spec.slice_id);
    if (it == actions.end()) continue;
    if (!within_bounds(it->second, config.capacity_h)) {
      throw Error(ErrorKind::Validation, "action out of bounds for slice " + spec.slice_id);
    }
    order.push_back(&spec);
    out.demands.push_back({spec.slice_id, it->second.svrb, it->second.sw,
                           demand_vrbs(spec.profile, config, rng)});
  }
  if (order.size() != actions.size()) {
    throw Error(ErrorKind::Scenario, "action given for a slice without a spec");
  }

  out.allocations = config.isolation == IsolationMode::Soft
                        ? share_pool(out.demands, config.capacity_h)
                        : hard_allocate(out.demands, config.capacity_h);

  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& profile = order[i]->profile;
    double eps = config.noise_std > 0.0 ? config.noise_std * noise(rng) : 0.0;
    double tput = std::max(0.0, out.allocations[i].final_vrb * config.per_vrb_rate * (1.0 + eps));
    double fps = std::min(profile.frame_rate, tput / profile.frame_size);
    out.perf[order[i]->slice_id] = {tput, fps};
  }
  return out;
}

std::vector<SliceSpec> apply_events(int slot, std::span<const DynamicsEvent> events,
                                    std::vector<SliceSpec> specs) {
  for (const auto& ev : events) {
    if (ev.slot != slot) continue;
    auto it = std::find_if(specs.begin(), specs.end(),
                           [&](const SliceSpec& s) { return s.slice_id == ev.slice_id; });
    if (it == specs.end()) {
      throw Error(ErrorKind::Scenario, "event references unknown slice " + ev.slice_id);
    }
    switch (ev.kind) {
      case EventKind::SliceLeave: it->active = false; break;
      case EventKind::SliceJoin: it->active = true; break;
      case EventKind::SlaChange:
        it->q_throughput = ev.q_throughput;
        it->q_fps = ev.q_fps;
        break;
    }
  }
  return specs;
}

Environment::Environment(EnvConfig config)
    : config_(config), rng_(make_stream(config.rng_seed, "env")) {}

Environment::Environment(EnvConfig config, Rng rng) : config_(config), rng_(std::move(rng)) {}

StepOutcome Environment::step(const std::map<SliceId, Action>& actions,
                              std::span<const SliceSpec> specs) {
  ++steps_;
  return slicewb::step(actions, specs, config_, rng_);
}

}  // namespace slicewb
