#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "slicewb/core.hpp"
#include "slicewb/slice_agent.hpp"

namespace slicewb {

/// ADMM consensus state, one entry per active slice in `ids` order.
struct CoordinatorState {
  std::vector<SliceId> ids;
  std::vector<double> z;
  std::vector<double> y;
  std::vector<double> last_w;  // most recent proposed sharing weights
  double rho = 2.0;
  int max_iters = 15;
  double primal_tol = 0.5;
  double dual_init = -5.0;
};

/// Minimizes sum (x_i - z_i + y_i)^2 subject to 0 <= sum z <= capacity: the
/// Euclidean projection of c = x + y onto the slab, which shifts every
/// coordinate equally onto the violated face.
std::vector<double> update_auxiliary(std::span<const double> x, std::span<const double> y,
                                     int capacity);

/// y' = y + (x - z), elementwise.
std::vector<double> dual_update(std::span<const double> y, std::span<const double> x,
                                std::span<const double> z);

/// Drops departed slices and appends joined ones with z = 1 and y equal to the
/// mean of the remaining duals (dual_init when none remain).
CoordinatorState resize(CoordinatorState state, std::span<const SliceId> joined,
                        std::span<const SliceId> left);

/// Removes one svRB at a time from the largest allocation (lowest index on
/// ties) until sum <= capacity, never going below `min_svrb`. Throws
/// InfeasibleCapacity when the minimums alone exceed capacity.
void enforce_capacity(std::vector<int>& svrb, int capacity, int min_svrb);

enum class ProbePolicy {
  Live,       // every ADMM iteration queries the environment
  Surrogate,  // iterations use the surrogates; one environment query per slot
};

struct OrchestrationParams {
  int capacity = 12;
  int min_svrb = 1;
  ProbePolicy probe = ProbePolicy::Live;
  CostParams cost_params;
  double barrier_coef = 0.05;
  double violation_penalty = 120.0;
  CandidateGrid grid;
};

struct IterationTrace {
  std::vector<int> x;
  std::vector<double> w;
  std::vector<double> z;
  std::vector<double> y;
  double total_cost = 0.0;
  double primal_residual = 0.0;
};

struct SlotResult {
  std::map<SliceId, Action> actions;
  std::map<SliceId, PerfVector> perf;  // outcome of the emitted actions
  int iterations = 0;
  double primal_residual = 0.0;
  std::vector<IterationTrace> trace;
};

using Probe = std::function<std::map<SliceId, PerfVector>(const std::map<SliceId, Action>&)>;

/// Runs ADMM iterations for one orchestration slot: broadcast (z, y, rho, s)
/// to every active agent, collect proposals, probe, update z and y, until the
/// primal residual max |x - z| <= primal_tol or max_iters. `active` must list
/// exactly the slices in `state.ids`, in the same order, and every one needs
/// an agent.
SlotResult orchestrate_slot(std::map<SliceId, SliceAgent>& agents, std::span<const SliceSpec> active,
                            const Probe& probe, CoordinatorState& state,
                            const OrchestrationParams& params, int slot);

}  // namespace slicewb
