#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "slicewb/bo_core.hpp"
#include "slicewb/core.hpp"
#include "slicewb/replay_buffer.hpp"

namespace slicewb {

/// What the coordinator tells one agent before it proposes.
struct AgentContext {
  double z = 1.0;    // auxiliary (consensus) value
  double y = 0.0;    // scaled dual
  double rho = 2.0;  // ADMM penalty, > 0
  double s = 0.0;    // aggregated sharing weight of the other active slices
  double q_throughput = 12.0;
  double q_fps = 10.0;
  CostParams cost_params;
  double barrier_coef = 0.05;
  double violation_penalty = 120.0;
  bool proximal = true;  // false for agents that run without a coordinator
};

struct CandidateGrid {
  std::vector<int> x_values;
  std::vector<double> w_values;

  /// x in [min_svrb, capacity], w in {0, step, ..., 1}.
  static CandidateGrid make(int capacity, int min_svrb = 1, double w_step = 0.1);
  /// x in [min_svrb, capacity] with the sharing weight pinned to 0.
  static CandidateGrid svrb_only(int capacity, int min_svrb = 1);

  std::size_t size() const { return x_values.size() * w_values.size(); }
  /// Lexicographic in (x, w).
  Action at(std::size_t index) const;
};

/// Worst SLA margin in Mbps: the FPS shortfall is rescaled by q_tput / q_fps.
double sla_margin(const PerfVector& perf, double q_throughput, double q_fps);

/// -barrier_coef * log(margin) when the SLA holds with slack, otherwise the
/// finite penalty violation_penalty + |margin|.
double margin_penalty(double margin, const AgentContext& ctx);
double sla_penalty(const PerfVector& perf, const AgentContext& ctx);

double proximal_term(int svrb, const AgentContext& ctx);

/// cost + (rho/2)(x - z + y)^2 + SLA penalty.
double scalarize(const Action& action, const PerfVector& perf, const AgentContext& ctx);

struct Experience {
  Action action;
  double s = 0.0;
  PerfVector observed;
  int slot = 0;
};

enum class FeatureSet {
  ActionAndContext,  // (x, w, w / (w + s)): the last is the slice's pool fraction
  SvrbOnly,          // (x); hard-isolation agents
};

/// Constrained BO agent for one slice. The surrogate models the SLA margin;
/// cost, proximal term and penalty are composed with it in closed form when
/// proposing. Margins are recomputed from the stored observations at each
/// refit so SLA changes take effect immediately. A new observation replaces
/// any stored one at the same model input.
class SliceAgent {
 public:
  struct Incumbent {
    Action action;
    double value = 0.0;
  };

  SliceAgent(SliceId id, BoSettings settings, FeatureSet features, std::uint64_t seed);

  Action suggest(const AgentContext& ctx, const CandidateGrid& grid);
  void observe(const Action& action, const PerfVector& perf, const AgentContext& ctx, int slot);

  const SliceId& id() const { return id_; }
  const std::optional<Incumbent>& incumbent() const { return incumbent_; }
  const ReplayBuffer<Experience>& buffer() const { return buffer_; }
  const BoCore& core() const { return core_; }
  long observations() const { return observations_; }
  bool cold() const { return observations_ < core_.settings().n_init; }

  Eigen::VectorXd features(const Action& action, double s) const;

 private:
  double target(const Experience& e, const AgentContext& ctx) const;
  void refit(const AgentContext& ctx);

  SliceId id_;
  FeatureSet feature_set_;
  BoCore core_;
  ReplayBuffer<Experience> buffer_;
  std::optional<Incumbent> incumbent_;
  long observations_ = 0;
  double x_span_ = 1.0;
};

}  // namespace slicewb
