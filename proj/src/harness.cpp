#include "slicewb/harness.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <ostream>

#include "json.hpp"
#include "slicewb/baselines.hpp"
#include "slicewb/error.hpp"
#include "slicewb/netenv.hpp"

namespace slicewb {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string set_key(std::span<const SliceSpec> active) {
  std::string key;
  for (const auto& s : active) {
    if (!key.empty()) key += ',';
    key += s.slice_id;
  }
  return key;
}

class CheckedEnvironment {
 public:
  CheckedEnvironment(EnvConfig config, RunResult& result) : env_(config), result_(result) {}

  std::map<SliceId, PerfVector> step(const std::map<SliceId, Action>& actions,
                                     std::span<const SliceSpec> active) {
    const int h = env_.config().capacity_h;
    long sum = 0;
    bool bad = false;
    for (const auto& [id, a] : actions) {
      sum += a.svrb;
      if (!within_bounds(a, h)) bad = true;
    }
    if (bad || sum > h) ++result_.action_violations;
    auto outcome = env_.step(actions, active);
    long used = 0;
    for (const auto& alloc : outcome.allocations) used += alloc.final_vrb;
    if (used > h) ++result_.allocation_violations;
    ++result_.env_steps;
    return std::move(outcome.perf);
  }

 private:
  Environment env_;
  RunResult& result_;
};

PenaltySettings penalty_of(const Scenario& sc) {
  return {sc.cost, sc.params.barrier_coef, sc.violation_penalty()};
}

// Per-algorithm driver: produce the emitted actions and their outcome for one slot.
class Driver {
 public:
  virtual ~Driver() = default;
  virtual void slot(std::span<const SliceSpec> active, CheckedEnvironment& env, int t, SlotRecord& rec) = 0;
};

class AdaSlicingDriver : public Driver {
 public:
  explicit AdaSlicingDriver(const Scenario& sc) : sc_(sc) {
    state_.rho = sc.params.rho;
    state_.max_iters = sc.params.max_iters;
    state_.primal_tol = sc.params.primal_tol;
    state_.dual_init = sc.params.dual_init;
    params_.capacity = sc.env.capacity_h;
    params_.min_svrb = sc.params.min_svrb;
    params_.probe = sc.params.probe;
    params_.cost_params = sc.cost;
    params_.barrier_coef = sc.params.barrier_coef;
    params_.violation_penalty = sc.violation_penalty();
    params_.grid = CandidateGrid::make(sc.env.capacity_h, sc.params.min_svrb, sc.params.w_step);
  }

  void slot(std::span<const SliceSpec> active, CheckedEnvironment& env, int t, SlotRecord& rec) override {
    std::vector<SliceId> joined, left;
    for (const auto& s : active) {
      if (std::find(state_.ids.begin(), state_.ids.end(), s.slice_id) == state_.ids.end()) {
        joined.push_back(s.slice_id);
      }
      if (!agents_.contains(s.slice_id)) {
        agents_.emplace(s.slice_id,
                        SliceAgent(s.slice_id, sc_.params.bo, FeatureSet::ActionAndContext, sc_.seed));
      }
    }
    for (const auto& id : state_.ids) {
      const bool present = std::any_of(active.begin(), active.end(),
                                       [&](const SliceSpec& s) { return s.slice_id == id; });
      if (!present) left.push_back(id);
    }
    if (!joined.empty() || !left.empty()) state_ = resize(std::move(state_), joined, left);

    std::vector<SliceSpec> ordered;
    for (const auto& id : state_.ids) {
      ordered.push_back(*std::find_if(active.begin(), active.end(),
                                      [&](const SliceSpec& s) { return s.slice_id == id; }));
    }
    auto probe = [&](const std::map<SliceId, Action>& actions) { return env.step(actions, ordered); };
    auto result = orchestrate_slot(agents_, ordered, probe, state_, params_, t);
    rec.actions = std::move(result.actions);
    rec.perf = std::move(result.perf);
    rec.admm_iters = result.iterations;
    rec.primal_residual = result.primal_residual;
    rec.admm_trace = std::move(result.trace);
    rec.admm_ids = state_.ids;
  }

 private:
  const Scenario& sc_;
  CoordinatorState state_;
  OrchestrationParams params_;
  std::map<SliceId, SliceAgent> agents_;
};

class GboDriver : public Driver {
 public:
  explicit GboDriver(const Scenario& sc) : sc_(sc) {}

  void slot(std::span<const SliceSpec> active, CheckedEnvironment& env, int, SlotRecord& rec) override {
    const auto key = set_key(active);
    auto it = optimizers_.find(key);
    if (it == optimizers_.end()) {
      std::vector<SliceId> ids;
      for (const auto& s : active) ids.push_back(s.slice_id);
      it = optimizers_
               .emplace(key, GboOptimizer(ids, sc_.env.capacity_h, sc_.params.min_svrb, sc_.params.bo,
                                          sc_.seed, "gbo/" + key))
               .first;
    }
    const auto penalty = penalty_of(sc_);
    auto svrb = it->second.suggest(active, penalty);
    for (std::size_t i = 0; i < active.size(); ++i) rec.actions[active[i].slice_id] = {svrb[i], 0.0};
    rec.perf = env.step(rec.actions, active);
    std::vector<PerfVector> perf;
    for (const auto& s : active) perf.push_back(rec.perf.at(s.slice_id));
    it->second.observe(svrb, perf, active);
  }

 private:
  const Scenario& sc_;
  std::map<std::string, GboOptimizer> optimizers_;
};

class AtlasDriver : public Driver {
 public:
  explicit AtlasDriver(const Scenario& sc)
      : sc_(sc), atlas_(sc.env.capacity_h, sc.params.min_svrb, sc.params.bo, sc.seed) {}

  void slot(std::span<const SliceSpec> active, CheckedEnvironment& env, int t, SlotRecord& rec) override {
    const auto penalty = penalty_of(sc_);
    rec.actions = atlas_.propose(active, penalty);
    rec.perf = env.step(rec.actions, active);
    atlas_.observe(rec.actions, rec.perf, active, penalty, t);
  }

 private:
  const Scenario& sc_;
  AtlasBaseline atlas_;
};

class ExSearchDriver : public Driver {
 public:
  explicit ExSearchDriver(const Scenario& sc) : sc_(sc) {}

  void slot(std::span<const SliceSpec> active, CheckedEnvironment& env, int, SlotRecord& rec) override {
    // Keyed on thresholds too: an SLA change selects a different optimum.
    std::string key;
    for (const auto& s : active) key += s.slice_id + ":" + fmt(s.q_throughput) + ":" + fmt(s.q_fps) + ";";
    auto it = choices_.find(key);
    if (it == choices_.end()) {
      const auto dataset = sweep_dataset(active, sc_.env, sc_.params.min_svrb, sc_.params.oracle_cap);
      it = choices_.emplace(key, exsearch(dataset, active, sc_.cost)).first;
    }
    for (std::size_t i = 0; i < active.size(); ++i) rec.actions[active[i].slice_id] = {it->second[i], 0.0};
    rec.perf = env.step(rec.actions, active);
  }

 private:
  const Scenario& sc_;
  std::map<std::string, std::vector<int>> choices_;
};

std::unique_ptr<Driver> make_driver(const Scenario& sc) {
  switch (sc.algorithm) {
    case Algorithm::AdaSlicing: return std::make_unique<AdaSlicingDriver>(sc);
    case Algorithm::Gbo: return std::make_unique<GboDriver>(sc);
    case Algorithm::Atlas: return std::make_unique<AtlasDriver>(sc);
    case Algorithm::ExSearch: return std::make_unique<ExSearchDriver>(sc);
  }
  throw Error(ErrorKind::Validation, "unknown algorithm", "algorithm");
}

}  // namespace

RunResult run(const Scenario& scenario) {
  validate(scenario);
  RunResult result;
  result.scenario = scenario.name;
  result.algorithm = scenario.algorithm;
  result.seed = scenario.seed;
  for (const auto& s : scenario.slices) result.slice_ids.push_back(s.slice_id);

  EnvConfig config = scenario.env;
  config.isolation = scenario.algorithm == Algorithm::AdaSlicing ? IsolationMode::Soft : IsolationMode::Hard;
  config.rng_seed = scenario.seed;
  CheckedEnvironment env(config, result);
  auto driver = make_driver(scenario);

  std::vector<SliceSpec> specs = scenario.slices;
  for (int t = 0; t < scenario.slots; ++t) {
    specs = apply_events(t, scenario.events, std::move(specs));
    std::vector<SliceSpec> active;
    for (const auto& s : specs) {
      if (s.active) active.push_back(s);
    }
    SlotRecord rec;
    rec.slot = t;
    if (!active.empty()) {
      driver->slot(active, env, t, rec);
      for (const auto& s : active) {
        const auto& a = rec.actions.at(s.slice_id);
        const auto& p = rec.perf.at(s.slice_id);
        rec.cost[s.slice_id] = slice_cost(a, scenario.cost);
        rec.norm_perf[s.slice_id] = normalized_performance(p, s);
        rec.total_cost += rec.cost[s.slice_id];
        rec.mean_norm_perf += rec.norm_perf[s.slice_id];
      }
      rec.mean_norm_perf /= static_cast<double>(active.size());
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

int convergence_slot(const std::vector<double>& costs, double band) {
  for (std::size_t t = 0; t + 2 < costs.size(); ++t) {
    const double ref = costs[t];
    const double tol = band * std::abs(ref);
    if (std::abs(costs[t + 1] - ref) <= tol && std::abs(costs[t + 2] - ref) <= tol) {
      return static_cast<int>(t);
    }
  }
  return -1;
}

Summary summarize(const RunResult& result) {
  Summary s;
  s.scenario = result.scenario;
  s.algorithm = to_string(result.algorithm);
  s.slices = result.records.empty() ? 0 : result.records.back().actions.size();
  std::vector<double> costs;
  for (const auto& r : result.records) costs.push_back(r.total_cost);
  const std::size_t window = std::min<std::size_t>(5, result.records.size());
  for (std::size_t i = result.records.size() - window; i < result.records.size(); ++i) {
    s.converged_cost += result.records[i].total_cost;
    s.converged_norm_perf += result.records[i].mean_norm_perf;
  }
  if (window > 0) {
    s.converged_cost /= static_cast<double>(window);
    s.converged_norm_perf /= static_cast<double>(window);
  }
  s.convergence_slot = convergence_slot(costs);
  return s;
}

std::vector<Summary> run_matrix(const std::vector<std::filesystem::path>& scenarios,
                                std::optional<Algorithm> algo_override, std::optional<std::uint64_t> seed_override,
                                std::optional<int> slots_override) {
  std::vector<Summary> rows;
  for (const auto& path : scenarios) {
    const std::vector<Algorithm> algos =
        algo_override ? std::vector<Algorithm>{*algo_override}
                      : std::vector<Algorithm>(std::begin(kAllAlgorithms), std::end(kAllAlgorithms));
    std::optional<Scenario> sc;
    std::string load_error;
    try {
      sc = load_scenario(path);
      if (seed_override) sc->seed = *seed_override;
      if (slots_override) sc->slots = *slots_override;
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    for (auto algo : algos) {
      if (!sc) {
        Summary row;
        row.scenario = path.stem().string();
        row.algorithm = to_string(algo);
        row.error = load_error;
        rows.push_back(std::move(row));
        continue;
      }
      Scenario cell = *sc;
      cell.algorithm = algo;
      try {
        rows.push_back(summarize(run(cell)));
      } catch (const std::exception& e) {
        Summary row;
        row.scenario = cell.name;
        row.algorithm = to_string(algo);
        row.slices = static_cast<std::size_t>(
            std::count_if(cell.slices.begin(), cell.slices.end(), [](const SliceSpec& s) { return s.active; }));
        row.error = e.what();
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_trace_csv(std::ostream& out, const RunResult& result) {
  out << "slot,total_cost,mean_norm_perf,admm_iters,primal_residual";
  for (const auto& id : result.slice_ids) {
    out << ",x_" << id << ",w_" << id << ",tput_" << id << ",fps_" << id << ",cost_" << id << ",norm_" << id;
  }
  out << '\n';
  for (const auto& r : result.records) {
    out << r.slot << ',' << fmt(r.total_cost) << ',' << fmt(r.mean_norm_perf) << ',' << r.admm_iters << ','
        << fmt(r.primal_residual);
    for (const auto& id : result.slice_ids) {
      auto a = r.actions.find(id);
      if (a == r.actions.end()) {
        out << ",,,,,,";
        continue;
      }
      const auto& p = r.perf.at(id);
      out << ',' << a->second.svrb << ',' << fmt(a->second.sw) << ',' << fmt(p.throughput) << ',' << fmt(p.fps)
          << ',' << fmt(r.cost.at(id)) << ',' << fmt(r.norm_perf.at(id));
    }
    out << '\n';
  }
}

void write_admm_csv(std::ostream& out, const RunResult& result) {
  out << "slot,iter,slice,x,w,z,y,total_cost,primal_residual\n";
  for (const auto& r : result.records) {
    for (std::size_t k = 0; k < r.admm_trace.size(); ++k) {
      const auto& tr = r.admm_trace[k];
      for (std::size_t i = 0; i < r.admm_ids.size(); ++i) {
        out << r.slot << ',' << k << ',' << r.admm_ids[i] << ',' << tr.x[i] << ',' << fmt(tr.w[i]) << ','
            << fmt(tr.z[i]) << ',' << fmt(tr.y[i]) << ',' << fmt(tr.total_cost) << ',' << fmt(tr.primal_residual)
            << '\n';
      }
    }
  }
}

void write_summary_csv(std::ostream& out, const std::vector<Summary>& rows) {
  out << "scenario,algorithm,slices,converged_cost,converged_norm_perf,convergence_slot,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << r.scenario << ',' << r.algorithm << ',' << r.slices << ',';
    if (r.error.empty()) {
      out << fmt(r.converged_cost) << ',' << fmt(r.converged_norm_perf) << ',' << r.convergence_slot;
    } else {
      out << ",,";
    }
    out << ',' << err << '\n';
  }
}

std::string scenario_hash(const Scenario& scenario) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(to_json(scenario).dump()));
  return buf;
}

void write_run(const std::filesystem::path& dir, const Scenario& scenario, const RunResult& result) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("trace.csv");
    write_trace_csv(f, result);
  }
  {
    auto f = open("admm_trace.csv");
    write_admm_csv(f, result);
  }
  const auto summary = summarize(result);
  nlohmann::json manifest{{"scenario", scenario.name},
                          {"scenario_hash", scenario_hash(scenario)},
                          {"algorithm", to_string(scenario.algorithm)},
                          {"seed", scenario.seed},
                          {"slots", scenario.slots},
                          {"version", kVersion},
                          {"env_steps", result.env_steps},
                          {"action_violations", result.action_violations},
                          {"allocation_violations", result.allocation_violations},
                          {"converged_cost", summary.converged_cost},
                          {"converged_norm_perf", summary.converged_norm_perf},
                          {"convergence_slot", summary.convergence_slot},
                          {"files", {"trace.csv", "admm_trace.csv"}},
                          {"scenario_config", to_json(scenario)}};
  auto f = open("manifest.json");
  f << manifest.dump(2) << '\n';
}

void dump_oracle(const Scenario& scenario, const std::filesystem::path& out) {
  validate(scenario);
  std::vector<SliceSpec> active;
  for (const auto& s : scenario.slices) {
    if (s.active) active.push_back(s);
  }
  const auto dataset = sweep_dataset(active, scenario.env, scenario.params.min_svrb, scenario.params.oracle_cap);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + out.string());
  write_dataset_csv(f, dataset);
}

}  // namespace slicewb
