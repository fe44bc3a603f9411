#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slicewb/coordinator.hpp"
#include "slicewb/core.hpp"
#include "slicewb/scenario.hpp"

namespace slicewb {

inline constexpr const char* kVersion = "0.1.0";

struct SlotRecord {
  int slot = 0;
  std::map<SliceId, Action> actions;  // active slices only
  std::map<SliceId, PerfVector> perf;
  std::map<SliceId, double> cost;
  std::map<SliceId, double> norm_perf;
  double total_cost = 0.0;  // sum of `cost`
  double mean_norm_perf = 0.0;
  int admm_iters = 0;
  double primal_residual = 0.0;
  std::vector<IterationTrace> admm_trace;
  std::vector<SliceId> admm_ids;  // column order of admm_trace
};

struct RunResult {
  std::string scenario;
  Algorithm algorithm = Algorithm::AdaSlicing;
  std::uint64_t seed = 0;
  std::vector<SliceId> slice_ids;  // every slice declared by the scenario
  std::vector<SlotRecord> records;
  long env_steps = 0;
  long action_violations = 0;      // emitted actions outside bounds or over capacity
  long allocation_violations = 0;  // vSharing outputs over capacity
};

/// Executes the scenario's algorithm slot by slot against one environment.
/// Every environment step is checked for capacity and bound violations.
RunResult run(const Scenario& scenario);

struct Summary {
  std::string scenario;
  std::string algorithm;
  std::size_t slices = 0;
  double converged_cost = 0.0;       // mean total cost over the last five slots
  double converged_norm_perf = 0.0;  // mean normalized performance, same window
  int convergence_slot = -1;         // -1 when the trace never settles
  std::string error;                 // non-empty for a failed cell
};

/// First slot t whose cost and the next two slots' costs all lie within
/// `band` of cost[t]; -1 when no such slot exists.
int convergence_slot(const std::vector<double>& costs, double band = 0.05);
Summary summarize(const RunResult& result);

/// Runs every scenario; a failing cell becomes a row carrying its error.
std::vector<Summary> run_matrix(const std::vector<std::filesystem::path>& scenarios,
                                std::optional<Algorithm> algo_override = std::nullopt,
                                std::optional<std::uint64_t> seed_override = std::nullopt,
                                std::optional<int> slots_override = std::nullopt);

/// Columns: slot,total_cost,mean_norm_perf,admm_iters,primal_residual, then
/// per slice x_<id>,w_<id>,tput_<id>,fps_<id>,cost_<id>,norm_<id> (empty
/// when the slice is inactive).
void write_trace_csv(std::ostream& out, const RunResult& result);
/// Long format: slot,iter,slice,x,w,z,y,total_cost,primal_residual.
void write_admm_csv(std::ostream& out, const RunResult& result);
void write_summary_csv(std::ostream& out, const std::vector<Summary>& rows);
std::string scenario_hash(const Scenario& scenario);
/// Writes trace.csv, admm_trace.csv and manifest.json into `dir`.
void write_run(const std::filesystem::path& dir, const Scenario& scenario, const RunResult& result);

/// Sweeps the scenario's noise-free hard-isolation grid over its initially
/// active slices and writes the dataset table.
void dump_oracle(const Scenario& scenario, const std::filesystem::path& out);

}  // namespace slicewb
