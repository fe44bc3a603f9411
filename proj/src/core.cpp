#include "slicewb/core.hpp"

#include "slicewb/error.hpp"

namespace slicewb {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CapacityExceeded: return "capacity_exceeded";
    case ErrorKind::Factorization: return "factorization_failure";
    case ErrorKind::Scenario: return "scenario";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::InfeasibleCapacity: return "infeasible_capacity";
    case ErrorKind::NoFeasibleAction: return "no_feasible_action";
    case ErrorKind::GridCapExceeded: return "grid_cap_exceeded";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

bool within_bounds(const Action& action, int capacity) {
  return action.svrb >= 0 && action.svrb <= capacity && action.sw >= 0.0 && action.sw <= 1.0;
}

double slice_cost(const Action& action, const CostParams& params) {
  return params.u_h * action.svrb + params.u_s * action.sw;
}

double total_cost(std::span<const Action> actions, const CostParams& params) {
  double total = 0.0;
  for (const auto& a : actions) total += slice_cost(a, params);
  return total;
}

double normalized_performance(const PerfVector& perf, const SliceSpec& spec) {
  return 0.5 * (perf.throughput / spec.q_throughput + perf.fps / spec.q_fps);
}

bool meets_sla(const PerfVector& perf, double q_throughput, double q_fps) {
  return perf.throughput >= q_throughput && perf.fps >= q_fps;
}

}  // namespace slicewb
