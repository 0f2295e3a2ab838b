#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "specscen/configurations.hpp"
#include "specscen/evaluation.hpp"
#include "specscen/path_gen.hpp"
#include "specscen/relational_graph.hpp"
#include "specscen/road_world.hpp"
#include "specscen/scene_gen.hpp"
#include "specscen/simulation.hpp"
#include "specscen/spec.hpp"

namespace specscen::cli {

namespace fs = std::filesystem;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<fs::path> specs;
  std::optional<fs::path> world_file;  // replaces the grid when set
  world::GridParams grid;
  std::map<std::string, int> budgets;
  int scenes_per_rg = 2;
  int paths_per_scene = 2;
  std::string agent = "follower";
  sim::SpeedLawParams speed_law;
  double duration = 30.0;
  double rate = 20.0;
  std::uint64_t seed = 1;
  fs::path out = "out";
  int k = 8;
  double spacing = 2.0;
  std::size_t permutations = 200;
  int jobs = 1;
  int multiplier = 1;
  path::EndpointParams endpoints;
  scene::SamplerParams sampler;

  void validate() const;  // throws ConfigError
  nlohmann::json to_json() const;
  /// Relative paths resolve against `base`.
  static RunConfig from_json(const nlohmann::json& j, const fs::path& base = {});
};

RunConfig load_run_config(const fs::path& path);

struct RgRecord {
  std::string id;
  rg::RelationalGraph graph;
  std::vector<std::size_t> sources;  // configuration ids
  bool feasible = false;
  std::optional<scene::Scene> witness;
};

struct SpecPlan {
  spec::Spec spec;
  spec::ConfigurationSpace cs;
  std::vector<RgRecord> rgs;
  std::vector<std::string> diagnostics;

  std::set<std::size_t> feasible_configurations() const;
  std::size_t feasible_rgs() const;
};

world::RoadWorld make_world(const RunConfig& cfg);

/// RG generation plus the sampler feasibility oracle; writes nothing.
SpecPlan plan_spec(const spec::Spec& spec, const RunConfig& cfg, const world::RoadWorld& world);

fs::path spec_dir(const RunConfig& cfg, const std::string& spec_name);
fs::path baseline_dir(const RunConfig& cfg, const std::string& spec_name);

struct Outcome {
  int failures = 0;
  std::vector<std::string> messages;
  std::vector<eval::CoverageReport> reports;

  void merge(Outcome o);
  int exit_code() const { return failures ? 1 : 0; }
};

sim::Route route_for(const world::WaypointGraph& wg, const std::vector<int>& waypoints);

Outcome cmd_generate(const RunConfig& cfg);
Outcome cmd_simulate(const RunConfig& cfg);
/// Traces go to <script dir>/../traces/<stem>.ndjson.
Outcome cmd_simulate_scripts(const std::vector<fs::path>& scripts, const std::string& agent, int jobs);
/// Empty `traces` reads every trace under each spec's traces/ directory.
Outcome cmd_evaluate(const RunConfig& cfg, const std::vector<fs::path>& traces = {});
Outcome cmd_run_all(const RunConfig& cfg);
Outcome cmd_baseline_random(const RunConfig& cfg);

}  // namespace specscen::cli
