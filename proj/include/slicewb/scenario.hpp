#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "slicewb/bo_core.hpp"
#include "slicewb/coordinator.hpp"
#include "slicewb/core.hpp"
#include "slicewb/netenv.hpp"

namespace slicewb {

enum class Algorithm { AdaSlicing, Gbo, Atlas, ExSearch };

const char* to_string(Algorithm algo);
Algorithm parse_algorithm(const std::string& name);
inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::AdaSlicing, Algorithm::Gbo, Algorithm::Atlas,
                                               Algorithm::ExSearch};

struct AlgoParams {
  double rho = 2.0;
  double primal_tol = 0.5;
  int max_iters = 15;
  double dual_init = -5.0;
  ProbePolicy probe = ProbePolicy::Live;
  BoSettings bo;
  double barrier_coef = 0.05;
  std::optional<double> violation_penalty;  // defaults to 10 * u_h * H
  double w_step = 0.1;
  int min_svrb = 1;
  std::uint64_t oracle_cap = 1'000'000;
};

struct Scenario {
  std::string name = "default";
  std::vector<SliceSpec> slices;
  EnvConfig env;
  CostParams cost;
  std::vector<DynamicsEvent> events;
  Algorithm algorithm = Algorithm::AdaSlicing;
  int slots = 30;
  std::uint64_t seed = 1;
  AlgoParams params;

  double violation_penalty() const {
    return params.violation_penalty.value_or(10.0 * cost.u_h * env.capacity_h);
  }
};

/// Three noise-free video slices at 12 Mbps / 10 FPS on 12 vRBs with unit costs.
Scenario default_scenario();

/// Parses and validates; throws Error(Validation) naming the offending field.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const Scenario& scenario);

/// Re-checks invariants of an in-memory scenario (after CLI overrides).
void validate(const Scenario& scenario);

}  // namespace slicewb
