#include "slicewb/coordinator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slicewb/error.hpp"

namespace slicewb {

std::vector<double> update_auxiliary(std::span<const double> x, std::span<const double> y,
                                     int capacity) {
  if (x.size() != y.size()) throw Error(ErrorKind::Validation, "x and y must be aligned");
  std::vector<double> z(x.size());
  if (z.empty()) return z;
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] + y[i];
  const double total = std::accumulate(z.begin(), z.end(), 0.0);
  double shift = 0.0;
  if (total > capacity) shift = (total - capacity) / static_cast<double>(z.size());
  if (total < 0.0) shift = total / static_cast<double>(z.size());
  for (auto& v : z) v -= shift;
  return z;
}

std::vector<double> dual_update(std::span<const double> y, std::span<const double> x,
                                std::span<const double> z) {
  if (y.size() != x.size() || y.size() != z.size()) {
    throw Error(ErrorKind::Validation, "dual update needs aligned vectors");
  }
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + (x[i] - z[i]);
  return out;
}

CoordinatorState resize(CoordinatorState state, std::span<const SliceId> joined,
                        std::span<const SliceId> left) {
  for (const auto& id : left) {
    auto it = std::find(state.ids.begin(), state.ids.end(), id);
    if (it == state.ids.end()) continue;
    const auto i = static_cast<std::size_t>(it - state.ids.begin());
    state.ids.erase(it);
    state.z.erase(state.z.begin() + static_cast<std::ptrdiff_t>(i));
    state.y.erase(state.y.begin() + static_cast<std::ptrdiff_t>(i));
    state.last_w.erase(state.last_w.begin() + static_cast<std::ptrdiff_t>(i));
  }
  const double mean_dual =
      state.y.empty() ? state.dual_init
                      : std::accumulate(state.y.begin(), state.y.end(), 0.0) / static_cast<double>(state.y.size());
  for (const auto& id : joined) {
    if (std::find(state.ids.begin(), state.ids.end(), id) != state.ids.end()) continue;
    state.ids.push_back(id);
    state.z.push_back(1.0);
    state.y.push_back(mean_dual);
    state.last_w.push_back(0.0);
  }
  return state;
}

void enforce_capacity(std::vector<int>& svrb, int capacity, int min_svrb) {
  const long floor_total = static_cast<long>(svrb.size()) * min_svrb;
  if (floor_total > capacity) {
    throw Error(ErrorKind::InfeasibleCapacity,
                "minimum svRBs " + std::to_string(floor_total) + " exceed capacity " +
                    std::to_string(capacity));
  }
  long total = std::accumulate(svrb.begin(), svrb.end(), 0L);
  while (total > capacity) {
    auto it = std::max_element(svrb.begin(), svrb.end());
    if (*it <= min_svrb) break;
    --*it;
    --total;
  }
}

SlotResult orchestrate_slot(std::map<SliceId, SliceAgent>& agents, std::span<const SliceSpec> active,
                            const Probe& probe, CoordinatorState& state,
                            const OrchestrationParams& params, int slot) {
  const std::size_t n = active.size();
  if (n == 0) throw Error(ErrorKind::Validation, "orchestrate_slot needs at least one active slice");
  if (state.ids.size() != n) throw Error(ErrorKind::Validation, "coordinator state out of sync");
  for (std::size_t i = 0; i < n; ++i) {
    if (state.ids[i] != active[i].slice_id || !agents.contains(active[i].slice_id)) {
      throw Error(ErrorKind::Validation, "coordinator state out of sync at " + active[i].slice_id);
    }
  }
  if (static_cast<long>(n) * params.min_svrb > params.capacity) {
    throw Error(ErrorKind::InfeasibleCapacity, "per-slice minimum svRBs exceed capacity");
  }

  auto context = [&](std::size_t i, double s) {
    AgentContext ctx;
    ctx.z = state.z[i];
    ctx.y = state.y[i];
    ctx.rho = state.rho;
    ctx.s = s;
    ctx.q_throughput = active[i].q_throughput;
    ctx.q_fps = active[i].q_fps;
    ctx.cost_params = params.cost_params;
    ctx.barrier_coef = params.barrier_coef;
    ctx.violation_penalty = params.violation_penalty;
    return ctx;
  };
  auto others = [](const std::vector<double>& w, std::size_t i) {
    return std::accumulate(w.begin(), w.end(), 0.0) - w[i];
  };

  SlotResult result;
  std::vector<Action> proposals(n);
  std::vector<AgentContext> contexts(n);
  std::map<SliceId, Action> applied;

  for (int iter = 0; iter < state.max_iters; ++iter) {
    // Jacobi sweep: every agent sees the previous iteration's weights.
    for (std::size_t i = 0; i < n; ++i) {
      contexts[i] = context(i, others(state.last_w, i));
      proposals[i] = agents.at(state.ids[i]).suggest(contexts[i], params.grid);
    }

    std::vector<int> x(n);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = proposals[i].svrb;
      w[i] = proposals[i].sw;
    }
    std::vector<int> clamped = x;
    enforce_capacity(clamped, params.capacity, params.min_svrb);
    applied.clear();
    for (std::size_t i = 0; i < n; ++i) applied[state.ids[i]] = {clamped[i], w[i]};

    if (params.probe == ProbePolicy::Live) {
      result.perf = probe(applied);
      for (std::size_t i = 0; i < n; ++i) {
        AgentContext seen = contexts[i];
        seen.s = others(w, i);
        agents.at(state.ids[i]).observe(applied[state.ids[i]], result.perf.at(state.ids[i]), seen, slot);
      }
    }
    state.last_w = w;

    const std::vector<double> xd(x.begin(), x.end());
    state.z = update_auxiliary(xd, state.y, params.capacity);
    state.y = dual_update(state.y, xd, state.z);

    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(xd[i] - state.z[i]));

    IterationTrace tr{clamped, w, state.z, state.y, 0.0, residual};
    for (const auto& [id, a] : applied) tr.total_cost += slice_cost(a, params.cost_params);
    result.trace.push_back(std::move(tr));
    result.iterations = iter + 1;
    result.primal_residual = residual;
    if (residual <= state.primal_tol) break;
  }

  if (params.probe == ProbePolicy::Surrogate) {
    result.perf = probe(applied);
    for (std::size_t i = 0; i < n; ++i) {
      AgentContext seen = contexts[i];
      seen.s = others(state.last_w, i);
      agents.at(state.ids[i]).observe(applied[state.ids[i]], result.perf.at(state.ids[i]), seen, slot);
    }
  }
  result.actions = std::move(applied);
  return result;
}

}  // namespace slicewb
