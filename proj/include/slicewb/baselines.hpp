#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "slicewb/bo_core.hpp"
#include "slicewb/core.hpp"
#include "slicewb/netenv.hpp"
#include "slicewb/replay_buffer.hpp"
#include "slicewb/slice_agent.hpp"

namespace slicewb {

/// Number of n-slice svRB vectors with every entry >= min_svrb and sum <= capacity.
std::uint64_t joint_grid_size(std::size_t slices, int capacity, int min_svrb);

/// All such vectors in lexicographic order.
std::vector<std::vector<int>> joint_grid(std::size_t slices, int capacity, int min_svrb);

/// Penalty settings shared by the hard-isolation baselines.
struct PenaltySettings {
  CostParams cost_params;
  double barrier_coef = 0.05;
  double violation_penalty = 120.0;
};

/// Global BO over the joint svRB vector under hard isolation. The surrogate
/// models the worst relative SLA margin min_i(margin_i / q_i); the objective
/// is total cost plus every slice's penalty evaluated at that worst margin,
/// a pessimistic bound on the summed penalties. Candidates are restricted
/// to the capacity-feasible joint grid.
class GboOptimizer {
 public:
  GboOptimizer(std::vector<SliceId> ids, int capacity, int min_svrb, BoSettings settings,
               std::uint64_t seed, std::string_view stream = "gbo");

  /// `specs` aligned with ids().
  std::vector<int> suggest(std::span<const SliceSpec> specs, const PenaltySettings& penalty);
  void observe(const std::vector<int>& svrb, const std::vector<PerfVector>& perf,
               std::span<const SliceSpec> specs);

  const std::vector<SliceId>& ids() const { return ids_; }
  const std::vector<std::vector<int>>& grid() const { return grid_; }
  const BoCore& core() const { return core_; }

 private:
  struct Sample {
    std::vector<int> svrb;
    std::vector<PerfVector> perf;
  };
  double target(const Sample& s, std::span<const SliceSpec> specs) const;
  double penalty_of(double worst, std::span<const SliceSpec> specs, const PenaltySettings& penalty) const;
  double total_cost(const std::vector<int>& svrb, const PenaltySettings& penalty) const;

  std::vector<SliceId> ids_;
  int capacity_;
  int min_svrb_;
  std::vector<std::vector<int>> grid_;
  Eigen::MatrixXd candidates_;
  BoCore core_;
  ReplayBuffer<Sample> buffer_;
  long observations_ = 0;
};

/// Proportional floor scaling floor(x_i * capacity / sum x) with a minimum of
/// `min_svrb`, applied only when the proposals exceed capacity; the result
/// is then clamped so it always fits.
std::vector<int> atlas_scale(std::vector<int> proposals, int capacity, int min_svrb = 1);

/// Independent per-slice BO agents without coordination. Agents learn from
/// the outcome of their own request; the scaled action is what the
/// environment applies.
class AtlasBaseline {
 public:
  AtlasBaseline(int capacity, int min_svrb, BoSettings settings, std::uint64_t seed);

  std::map<SliceId, Action> propose(std::span<const SliceSpec> active, const PenaltySettings& penalty);
  void observe(const std::map<SliceId, Action>& applied, const std::map<SliceId, PerfVector>& perf,
               std::span<const SliceSpec> active, const PenaltySettings& penalty, int slot);

  const std::map<SliceId, SliceAgent>& agents() const { return agents_; }

 private:
  AgentContext context(const SliceSpec& spec, const PenaltySettings& penalty) const;
  SliceAgent& agent(const SliceId& id);

  int capacity_;
  int min_svrb_;
  BoSettings settings_;
  std::uint64_t seed_;
  CandidateGrid grid_;
  std::map<SliceId, SliceAgent> agents_;
  std::map<SliceId, Action> proposals_;  // last unscaled requests
};

/// Noise-free hard-isolation performance of every joint svRB vector.
struct OracleDataset {
  std::vector<SliceId> ids;
  std::vector<std::vector<int>> actions;
  std::vector<std::vector<PerfVector>> perf;
};

/// Sweeps the noise-free, jitter-free hard-isolation environment over the
/// joint grid. Throws GridCapExceeded when the grid is larger than `cap`.
OracleDataset sweep_dataset(std::span<const SliceSpec> specs, const EnvConfig& config, int min_svrb,
                            std::uint64_t cap);

/// Cheapest joint action meeting every slice's SLA; first in dataset order
/// on ties. Throws NoFeasibleAction.
std::vector<int> exsearch(const OracleDataset& dataset, std::span<const SliceSpec> specs,
                          const CostParams& cost_params);

void write_dataset_csv(std::ostream& out, const OracleDataset& dataset);
OracleDataset read_dataset_csv(std::istream& in);

}  // namespace slicewb
