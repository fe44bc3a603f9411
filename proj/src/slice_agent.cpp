#include "slicewb/slice_agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slicewb/error.hpp"

namespace slicewb {

CandidateGrid CandidateGrid::make(int capacity, int min_svrb, double w_step) {
  if (capacity < min_svrb || min_svrb < 0) {
    throw Error(ErrorKind::InfeasibleCapacity, "svRB grid is empty");
  }
  if (!(w_step > 0.0 && w_step <= 1.0)) throw Error(ErrorKind::Validation, "w_step must be in (0, 1]");
  CandidateGrid g;
  for (int x = min_svrb; x <= capacity; ++x) g.x_values.push_back(x);
  const int steps = static_cast<int>(std::floor(1.0 / w_step + 1e-9));
  for (int k = 0; k <= steps; ++k) g.w_values.push_back(std::min(1.0, k * w_step));
  return g;
}

CandidateGrid CandidateGrid::svrb_only(int capacity, int min_svrb) {
  CandidateGrid g = make(capacity, min_svrb, 1.0);
  g.w_values = {0.0};
  return g;
}

Action CandidateGrid::at(std::size_t index) const {
  return {x_values[index / w_values.size()], w_values[index % w_values.size()]};
}

double sla_margin(const PerfVector& perf, double q_throughput, double q_fps) {
  return std::min(perf.throughput - q_throughput, perf.fps * (q_throughput / q_fps) - q_throughput);
}

double margin_penalty(double margin, const AgentContext& ctx) {
  if (margin > 0.0) return -ctx.barrier_coef * std::log(margin);
  return ctx.violation_penalty + std::abs(margin);
}

double sla_penalty(const PerfVector& perf, const AgentContext& ctx) {
  return margin_penalty(sla_margin(perf, ctx.q_throughput, ctx.q_fps), ctx);
}

double proximal_term(int svrb, const AgentContext& ctx) {
  if (!ctx.proximal) return 0.0;
  const double r = svrb - ctx.z + ctx.y;
  return 0.5 * ctx.rho * r * r;
}

double scalarize(const Action& action, const PerfVector& perf, const AgentContext& ctx) {
  return slice_cost(action, ctx.cost_params) + proximal_term(action.svrb, ctx) + sla_penalty(perf, ctx);
}

SliceAgent::SliceAgent(SliceId id, BoSettings settings, FeatureSet features, std::uint64_t seed)
    : id_(std::move(id)),
      feature_set_(features),
      core_(settings, seed, "agent/" + id_),
      buffer_(settings.buffer_capacity, settings.priority_decay) {}

Eigen::VectorXd SliceAgent::features(const Action& action, double s) const {
  if (feature_set_ == FeatureSet::SvrbOnly) return Eigen::VectorXd::Constant(1, action.svrb);
  const double fraction = action.sw > 0.0 ? action.sw / (action.sw + s) : 0.0;
  return Eigen::Vector3d(action.svrb, action.sw, fraction);
}

double SliceAgent::target(const Experience& e, const AgentContext& ctx) const {
  return sla_margin(e.observed, ctx.q_throughput, ctx.q_fps);
}

Action SliceAgent::suggest(const AgentContext& ctx, const CandidateGrid& grid) {
  if (grid.size() == 0) throw Error(ErrorKind::Validation, "empty candidate grid");
  x_span_ = grid.x_values.back() - grid.x_values.front();

  if (cold() || !core_.fitted()) {
    // Halton (2, 3) over the grid's index space.
    const auto k = static_cast<std::uint64_t>(observations_ + 1);
    const auto nx = grid.x_values.size(), nw = grid.w_values.size();
    const auto ix = std::min(nx - 1, static_cast<std::size_t>(radical_inverse(k, 2) * nx));
    const auto iw = std::min(nw - 1, static_cast<std::size_t>(radical_inverse(k, 3) * nw));
    return {grid.x_values[ix], grid.w_values[iw]};
  }

  Eigen::MatrixXd candidates(static_cast<Eigen::Index>(grid.size()),
                             feature_set_ == FeatureSet::SvrbOnly ? 1 : 3);
  std::vector<double> offsets(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Action a = grid.at(i);
    candidates.row(static_cast<Eigen::Index>(i)) = features(a, ctx.s);
    offsets[i] = slice_cost(a, ctx.cost_params) + proximal_term(a.svrb, ctx);
  }

  // Observed values were taken under other contexts (s, z, y), so the
  // incumbent is the best posterior-mean objective in the current one.
  const auto link = [ctx](double margin) { return margin_penalty(margin, ctx); };
  const double best = core_.min_mean_objective(candidates, offsets, link);
  const auto proposal = core_.propose(candidates, offsets, best, link);
  return grid.at(proposal.chosen);
}

void SliceAgent::observe(const Action& action, const PerfVector& perf, const AgentContext& ctx,
                         int slot) {
  const Eigen::VectorXd input = features(action, ctx.s);
  buffer_.erase_if([&](const Experience& e) { return features(e.action, e.s) == input; });
  buffer_.push({action, ctx.s, perf, slot});
  ++observations_;

  const double value = scalarize(action, perf, ctx);
  if (!incumbent_ || value < incumbent_->value) incumbent_ = Incumbent{action, value};

  if (!cold()) refit(ctx);
}

void SliceAgent::refit(const AgentContext& ctx) {
  const auto sample = buffer_.sample(core_.settings().subsample, core_.model_rng());
  const Eigen::Index dims = feature_set_ == FeatureSet::SvrbOnly ? 1 : 3;
  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(sample.size()), dims);
  Eigen::VectorXd targets(static_cast<Eigen::Index>(sample.size()));
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& e = sample[i]->value;
    inputs.row(static_cast<Eigen::Index>(i)) = features(e.action, e.s);
    targets(static_cast<Eigen::Index>(i)) = target(e, ctx);
  }
  Eigen::VectorXd spans(dims);
  spans(0) = std::max(1.0, x_span_);
  if (dims == 3) {
    spans(1) = 1.0;
    spans(2) = 1.0;
  }
  core_.refit(inputs, targets, spans);
}

}  // namespace slicewb
