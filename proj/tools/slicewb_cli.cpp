#include <glob.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slicewb/error.hpp"
#include "slicewb/harness.hpp"
#include "slicewb/scenario.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> slots;
  std::optional<std::string> algo;
};

slicewb::Scenario load(const std::string& path, const Overrides& o) {
  auto sc = slicewb::load_scenario(path);
  if (o.seed) sc.seed = *o.seed;
  if (o.slots) sc.slots = *o.slots;
  if (o.algo) sc.algorithm = slicewb::parse_algorithm(*o.algo);
  slicewb::validate(sc);
  return sc;
}

std::vector<std::filesystem::path> expand(const std::string& pattern) {
  glob_t g{};
  std::vector<std::filesystem::path> out;
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  ::globfree(&g);
  if (out.empty()) throw slicewb::Error(slicewb::ErrorKind::Io, "no scenario matches " + pattern);
  return out;
}

void print_error(const char* kind, const std::string& message, const std::string& field = {}) {
  nlohmann::json err{{"error", kind}, {"message", message}};
  if (!field.empty()) err["field"] = field;
  std::cout << err.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slice orchestration simulator: AdaSlicing and baselines"};
  app.require_subcommand(1);
  Overrides o;
  std::string algo;

  auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Override the scenario seed");
    sub->add_option("--slots", o.slots, "Override the number of orchestration slots");
    sub->add_option("--algo", o.algo, "Override the algorithm (adaslicing, gbo, atlas, exsearch)");
  };

  std::string file, out;
  auto* run = app.add_subcommand("run", "Run one scenario and write trace.csv, admm_trace.csv, manifest.json");
  run->add_option("scenario", file, "Scenario JSON file")->required();
  run->add_option("--out", out, "Output directory")->required();
  add_overrides(run);

  std::string pattern;
  auto* matrix = app.add_subcommand("matrix", "Run every matched scenario under every algorithm");
  matrix->add_option("glob", pattern, "Scenario file glob")->required();
  matrix->add_option("--out", out, "Output directory")->required();
  add_overrides(matrix);

  auto* oracle = app.add_subcommand("oracle", "Sweep the noise-free hard-isolation grid to a CSV table");
  oracle->add_option("scenario", file, "Scenario JSON file")->required();
  oracle->add_option("--out", out, "Output CSV file")->required();
  add_overrides(oracle);

  auto* check = app.add_subcommand("validate", "Parse and validate a scenario file");
  check->add_option("scenario", file, "Scenario JSON file")->required();
  add_overrides(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*run) {
      const auto sc = load(file, o);
      const auto result = slicewb::run(sc);
      slicewb::write_run(out, sc, result);
      const auto s = slicewb::summarize(result);
      std::cout << nlohmann::json{{"status", "ok"},
                                  {"out", out},
                                  {"converged_cost", s.converged_cost},
                                  {"converged_norm_perf", s.converged_norm_perf},
                                  {"convergence_slot", s.convergence_slot}}
                       .dump()
                << std::endl;
    } else if (*matrix) {
      std::optional<slicewb::Algorithm> a;
      if (o.algo) a = slicewb::parse_algorithm(*o.algo);
      const auto rows = slicewb::run_matrix(expand(pattern), a, o.seed, o.slots);
      std::filesystem::create_directories(out);
      std::ofstream f(std::filesystem::path(out) / "summary.csv", std::ios::binary);
      slicewb::write_summary_csv(f, rows);
      slicewb::write_summary_csv(std::cout, rows);
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
      std::cout << nlohmann::json{{"status", failed ? "partial" : "ok"}, {"rows", rows.size()}, {"failed", failed}}
                       .dump()
                << std::endl;
      return failed ? 1 : 0;
    } else if (*oracle) {
      const auto sc = load(file, o);
      slicewb::dump_oracle(sc, out);
      std::cout << nlohmann::json{{"status", "ok"}, {"out", out}}.dump() << std::endl;
    } else if (*check) {
      const auto sc = load(file, o);
      std::cout << nlohmann::json{{"status", "ok"}, {"scenario", sc.name}, {"hash", slicewb::scenario_hash(sc)}}
                       .dump()
                << std::endl;
    }
  } catch (const slicewb::Error& e) {
    print_error(slicewb::to_string(e.kind()), e.what(), e.field());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
