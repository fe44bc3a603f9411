#include "slicewb/baselines.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "slicewb/coordinator.hpp"
#include "slicewb/error.hpp"

namespace slicewb {

std::uint64_t joint_grid_size(std::size_t slices, int capacity, int min_svrb) {
  // Stars and bars: extra units e_i >= 0 with sum e <= capacity - n * min.
  const long slack = capacity - static_cast<long>(slices) * min_svrb;
  if (slack < 0) return 0;
  // C(slack + n, n)
  long double c = 1.0L;
  for (std::size_t k = 1; k <= slices; ++k) c = c * static_cast<long double>(slack + static_cast<long>(k)) / k;
  if (c > static_cast<long double>(std::numeric_limits<std::uint64_t>::max())) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(c + 0.5L);
}

std::vector<std::vector<int>> joint_grid(std::size_t slices, int capacity, int min_svrb) {
  std::vector<std::vector<int>> out;
  if (slices == 0) return out;
  std::vector<int> cur(slices, min_svrb);
  auto rec = [&](auto&& self, std::size_t i, int used) -> void {
    if (i == slices) {
      out.push_back(cur);
      return;
    }
    const int rest = static_cast<int>(slices - i - 1) * min_svrb;
    for (int x = min_svrb; used + x + rest <= capacity; ++x) {
      cur[i] = x;
      self(self, i + 1, used + x);
    }
  };
  rec(rec, 0, 0);
  return out;
}

namespace {

AgentContext penalty_context(const SliceSpec& spec, const PenaltySettings& penalty) {
  AgentContext ctx;
  ctx.q_throughput = spec.q_throughput;
  ctx.q_fps = spec.q_fps;
  ctx.cost_params = penalty.cost_params;
  ctx.barrier_coef = penalty.barrier_coef;
  ctx.violation_penalty = penalty.violation_penalty;
  ctx.proximal = false;
  return ctx;
}

}  // namespace

GboOptimizer::GboOptimizer(std::vector<SliceId> ids, int capacity, int min_svrb, BoSettings settings,
                           std::uint64_t seed, std::string_view stream)
    : ids_(std::move(ids)),
      capacity_(capacity),
      min_svrb_(min_svrb),
      grid_(joint_grid(ids_.size(), capacity, min_svrb)),
      core_(settings, seed, stream),
      buffer_(settings.buffer_capacity, settings.priority_decay) {
  if (grid_.empty()) throw Error(ErrorKind::InfeasibleCapacity, "joint svRB grid is empty");
  candidates_.resize(static_cast<Eigen::Index>(grid_.size()), static_cast<Eigen::Index>(ids_.size()));
  for (std::size_t r = 0; r < grid_.size(); ++r) {
    for (std::size_t c = 0; c < ids_.size(); ++c) {
      candidates_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = grid_[r][c];
    }
  }
}

double GboOptimizer::target(const Sample& s, std::span<const SliceSpec> specs) const {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.perf.size(); ++i) {
    worst = std::min(worst, sla_margin(s.perf[i], specs[i].q_throughput, specs[i].q_fps) / specs[i].q_throughput);
  }
  return worst;
}

double GboOptimizer::penalty_of(double worst, std::span<const SliceSpec> specs,
                                const PenaltySettings& penalty) const {
  double total = 0.0;
  for (const auto& spec : specs) {
    total += margin_penalty(worst * spec.q_throughput, penalty_context(spec, penalty));
  }
  return total;
}

double GboOptimizer::total_cost(const std::vector<int>& svrb, const PenaltySettings& penalty) const {
  double total = 0.0;
  for (const int x : svrb) total += slice_cost({x, 0.0}, penalty.cost_params);
  return total;
}

std::vector<int> GboOptimizer::suggest(std::span<const SliceSpec> specs, const PenaltySettings& penalty) {
  if (observations_ < core_.settings().n_init || !core_.fitted()) {
    const auto k = static_cast<std::uint64_t>(observations_ + 1);
    const auto i = std::min(grid_.size() - 1, static_cast<std::size_t>(radical_inverse(k, 2) * grid_.size()));
    return grid_[i];
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : buffer_.entries()) {
    best = std::min(best, total_cost(e.value.svrb, penalty) + penalty_of(target(e.value, specs), specs, penalty));
  }
  std::vector<double> offsets(grid_.size());
  for (std::size_t r = 0; r < grid_.size(); ++r) offsets[r] = total_cost(grid_[r], penalty);
  const auto link = [this, specs, &penalty](double worst) { return penalty_of(worst, specs, penalty); };
  return grid_[core_.propose(candidates_, offsets, best, link).chosen];
}

void GboOptimizer::observe(const std::vector<int>& svrb, const std::vector<PerfVector>& perf,
                           std::span<const SliceSpec> specs) {
  buffer_.erase_if([&](const Sample& e) { return e.svrb == svrb; });
  buffer_.push({svrb, perf});
  ++observations_;
  if (observations_ < core_.settings().n_init) return;

  const auto sample = buffer_.sample(core_.settings().subsample, core_.model_rng());
  const auto dims = static_cast<Eigen::Index>(ids_.size());
  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(sample.size()), dims);
  Eigen::VectorXd targets(static_cast<Eigen::Index>(sample.size()));
  for (std::size_t r = 0; r < sample.size(); ++r) {
    for (Eigen::Index c = 0; c < dims; ++c) {
      inputs(static_cast<Eigen::Index>(r), c) = sample[r]->value.svrb[static_cast<std::size_t>(c)];
    }
    targets(static_cast<Eigen::Index>(r)) = target(sample[r]->value, specs);
  }
  const Eigen::VectorXd spans =
      Eigen::VectorXd::Constant(dims, std::max(1, capacity_ - min_svrb_));
  core_.refit(inputs, targets, spans);
}

std::vector<int> atlas_scale(std::vector<int> proposals, int capacity, int min_svrb) {
  const long total = std::accumulate(proposals.begin(), proposals.end(), 0L);
  if (total > capacity) {
    for (auto& x : proposals) {
      x = std::max(min_svrb, static_cast<int>((static_cast<long>(x) * capacity) / total));
    }
  }
  enforce_capacity(proposals, capacity, min_svrb);
  return proposals;
}

AtlasBaseline::AtlasBaseline(int capacity, int min_svrb, BoSettings settings, std::uint64_t seed)
    : capacity_(capacity),
      min_svrb_(min_svrb),
      settings_(settings),
      seed_(seed),
      grid_(CandidateGrid::svrb_only(capacity, min_svrb)) {}

AgentContext AtlasBaseline::context(const SliceSpec& spec, const PenaltySettings& penalty) const {
  return penalty_context(spec, penalty);
}

SliceAgent& AtlasBaseline::agent(const SliceId& id) {
  auto it = agents_.find(id);
  if (it == agents_.end()) {
    it = agents_.emplace(id, SliceAgent(id, settings_, FeatureSet::SvrbOnly, seed_)).first;
  }
  return it->second;
}

std::map<SliceId, Action> AtlasBaseline::propose(std::span<const SliceSpec> active,
                                                 const PenaltySettings& penalty) {
  std::vector<int> x;
  for (const auto& spec : active) x.push_back(agent(spec.slice_id).suggest(context(spec, penalty), grid_).svrb);
  proposals_.clear();
  for (std::size_t i = 0; i < active.size(); ++i) proposals_[active[i].slice_id] = {x[i], 0.0};
  x = atlas_scale(std::move(x), capacity_, min_svrb_);
  std::map<SliceId, Action> out;
  for (std::size_t i = 0; i < active.size(); ++i) out[active[i].slice_id] = {x[i], 0.0};
  return out;
}

void AtlasBaseline::observe(const std::map<SliceId, Action>& applied,
                            const std::map<SliceId, PerfVector>& perf, std::span<const SliceSpec> active,
                            const PenaltySettings& penalty, int slot) {
  // Each agent is unaware of the scaling step: it learns the outcome of its own request.
  for (const auto& spec : active) {
    auto it = proposals_.find(spec.slice_id);
    const Action& requested = it != proposals_.end() ? it->second : applied.at(spec.slice_id);
    agent(spec.slice_id).observe(requested, perf.at(spec.slice_id), context(spec, penalty), slot);
  }
}

OracleDataset sweep_dataset(std::span<const SliceSpec> specs, const EnvConfig& config, int min_svrb,
                            std::uint64_t cap) {
  const auto size = joint_grid_size(specs.size(), config.capacity_h, min_svrb);
  if (size > cap) {
    throw Error(ErrorKind::GridCapExceeded,
                "oracle grid has " + std::to_string(size) + " entries; raise the cap to at least " +
                    std::to_string(size));
  }
  EnvConfig clean = config;
  clean.noise_std = 0.0;
  clean.isolation = IsolationMode::Hard;
  std::vector<SliceSpec> quiet(specs.begin(), specs.end());
  for (auto& s : quiet) s.profile.burstiness = 0.0;

  OracleDataset ds;
  for (const auto& s : quiet) ds.ids.push_back(s.slice_id);
  ds.actions = joint_grid(quiet.size(), config.capacity_h, min_svrb);
  Rng unused(0);
  for (const auto& joint : ds.actions) {
    std::map<SliceId, Action> actions;
    for (std::size_t i = 0; i < quiet.size(); ++i) actions[quiet[i].slice_id] = {joint[i], 0.0};
    const auto outcome = step(actions, quiet, clean, unused);
    std::vector<PerfVector> row;
    for (const auto& s : quiet) row.push_back(outcome.perf.at(s.slice_id));
    ds.perf.push_back(std::move(row));
  }
  return ds;
}

std::vector<int> exsearch(const OracleDataset& dataset, std::span<const SliceSpec> specs,
                          const CostParams& cost_params) {
  if (specs.size() != dataset.ids.size()) throw Error(ErrorKind::Validation, "dataset/spec mismatch");
  std::size_t best = dataset.actions.size();
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < dataset.actions.size(); ++r) {
    bool feasible = true;
    double cost = 0.0;
    for (std::size_t i = 0; i < specs.size() && feasible; ++i) {
      feasible = meets_sla(dataset.perf[r][i], specs[i].q_throughput, specs[i].q_fps);
      cost += slice_cost({dataset.actions[r][i], 0.0}, cost_params);
    }
    if (feasible && cost < best_cost) {
      best_cost = cost;
      best = r;
    }
  }
  if (best == dataset.actions.size()) {
    throw Error(ErrorKind::NoFeasibleAction, "no joint action satisfies every SLA");
  }
  return dataset.actions[best];
}

void write_dataset_csv(std::ostream& out, const OracleDataset& dataset) {
  for (const auto& id : dataset.ids) out << "x_" << id << ',';
  for (std::size_t i = 0; i < dataset.ids.size(); ++i) {
    out << "tput_" << dataset.ids[i] << ",fps_" << dataset.ids[i]
        << (i + 1 == dataset.ids.size() ? "\n" : ",");
  }
  char buf[64];
  for (std::size_t r = 0; r < dataset.actions.size(); ++r) {
    for (int x : dataset.actions[r]) out << x << ',';
    for (std::size_t i = 0; i < dataset.perf[r].size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", dataset.perf[r][i].throughput, dataset.perf[r][i].fps);
      out << buf << (i + 1 == dataset.perf[r].size() ? "\n" : ",");
    }
  }
}

OracleDataset read_dataset_csv(std::istream& in) {
  OracleDataset ds;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, "empty oracle dataset");
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) {
      if (cell.rfind("x_", 0) == 0) ds.ids.push_back(cell.substr(2));
    }
  }
  const std::size_t n = ds.ids.size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() != 3 * n) throw Error(ErrorKind::Io, "malformed oracle row: " + line);
    std::vector<int> action(n);
    std::vector<PerfVector> perf(n);
    for (std::size_t i = 0; i < n; ++i) {
      action[i] = static_cast<int>(values[i]);
      perf[i] = {values[n + 2 * i], values[n + 2 * i + 1]};
    }
    ds.actions.push_back(std::move(action));
    ds.perf.push_back(std::move(perf));
  }
  return ds;
}

}  // namespace slicewb
