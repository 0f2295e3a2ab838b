#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "specscen/geometry.hpp"
#include "specscen/road_world.hpp"
#include "specscen/scene_gen.hpp"
#include "specscen/scene_graph.hpp"

namespace specscen::sim {

using world::EntityState;
using world::Vec2;

struct SpeedLawParams {
  double v0 = 6.0;
  double alpha = 0.4;  // 1/s, NPC ahead of the ego (d >= 0)
  double beta = 0.4;   // 1/s, NPC behind (d < 0)
  double v_min = 0.5;
  double v_max = 12.0;
  // false: slow down when ahead, speed up when behind.
  // true: v0 + (alpha*[d>=0] - beta*[d<0]) * d, the opposite sign convention.
  bool printed_sign = false;

  void validate() const;
};

double npc_speed(double d, const SpeedLawParams& p);

/// Signed projection of (npc - ego) onto the ego heading; positive = ahead.
double longitudinal_deviation(const EntityState& npc, const EntityState& ego);

/// Polyline route with the lane of every vertex.
struct Route {
  std::vector<Vec2> points;
  std::vector<int> lanes;

  bool trivial() const;
};

/// Tracks progress along a route and produces pure-pursuit lookahead points.
class RouteTracker {
 public:
  explicit RouteTracker(Route route);
  void update(Vec2 position);
  double station() const { return station_; }
  double length() const { return polyline_ ? polyline_->length() : 0.0; }
  bool finished() const;
  Vec2 lookahead(double distance) const;
  const Route& route() const { return route_; }
  std::size_t segment() const { return segment_; }

 private:
  Route route_;
  std::optional<world::Polyline> polyline_;
  std::vector<double> cum_;
  double station_ = 0.0;
  std::size_t segment_ = 0;
};

/// What the ego agent returns each frame: a target speed and a point to steer toward.
struct Control {
  double target_speed = 0.0;
  Vec2 aim;
};

struct Observation {
  const EntityState& self;
  std::span<const EntityState> others;
  double time = 0.0;
  double dt = 0.05;
};

class Agent {
 public:
  virtual ~Agent() = default;
  /// Called once with the assigned route; the route is the only input the
  /// harness controls.
  virtual void reset(const Route& route) = 0;
  virtual Control step(const Observation& obs) = 0;
  virtual bool finished() const = 0;
};

struct AgentContext {
  const world::RoadWorld* world = nullptr;
  std::vector<double> tape;  // speeds for the scripted agent, one per frame
};

using AgentFactory = std::function<std::unique_ptr<Agent>(const AgentContext&)>;

/// follower, compliant-stopper, scripted.
const std::map<std::string, AgentFactory>& builtin_agents();
std::unique_ptr<Agent> make_agent(const std::string& name, const AgentContext& ctx);

inline constexpr double kMaxHeadingRate = 0.6;  // rad/s

/// Pure-pursuit lookahead distance at speed v.
double npc_lookahead(double v);
/// Largest speed at which steering toward `aim` stays within the heading-rate
/// bound (never below 1 m/s).
double npc_turn_cap(const EntityState& self, Vec2 aim);

struct ScriptTrajectory {
  std::string entity;
  std::vector<int> waypoints;
  Route route;
};

struct ScenarioScript {
  std::string spec;
  std::string rg_id;
  std::vector<std::size_t> configurations;
  std::map<std::string, std::uint64_t> seed_chain;
  std::filesystem::path world_file;  // relative to the script's directory
  scene::Scene scene;
  std::vector<ScriptTrajectory> trajectories;
  SpeedLawParams speed_law;
  double duration = 30.0;
  double rate = 20.0;
  std::uint64_t seed = 0;
  std::vector<double> ego_tape;

  const ScriptTrajectory* trajectory(const std::string& entity) const;
  void validate() const;
  nlohmann::json to_json() const;
  static ScenarioScript from_json(const nlohmann::json& j);
};

struct Frame {
  double time = 0.0;
  std::vector<EntityState> states;
  world::SceneGraph graph;
};

struct TraceMeta {
  std::string spec;
  std::string script;  // file stem
  std::string script_hash;
  std::string rg_id;
  std::vector<std::size_t> configurations;
  std::map<std::string, std::uint64_t> seed_chain;
  std::string agent;
  double rate = 20.0;
  bool collision = false;
  bool aborted = false;
  bool early_terminated = false;
  std::string error;
};

struct Trace {
  TraceMeta meta;
  std::vector<Frame> frames;

  bool incomplete() const { return meta.aborted; }
};

/// Fixed-step run; strictly single-threaded and deterministic.
Trace run_simulation(const ScenarioScript& script, const world::RoadWorld& world, Agent& ego_agent);

struct BatchJob {
  const ScenarioScript* script = nullptr;
  const world::RoadWorld* world = nullptr;
};

/// Runs independent scripts. `threads` <= 1 uses the serial loop.
std::vector<Trace> run_batch(std::span<const BatchJob> jobs, const std::string& agent, int threads);
std::vector<Trace> run_batch_serial(std::span<const BatchJob> jobs, const std::string& agent);

std::string write_trace(const Trace& t);  // NDJSON
Trace read_trace(const std::string& ndjson);
void save_trace(const Trace& t, const std::filesystem::path& path);
Trace load_trace(const std::filesystem::path& path);

ScenarioScript load_script(const std::filesystem::path& path);
void save_script(const ScenarioScript& s, const std::filesystem::path& path);
/// Hex FNV-1a of the script's serialized form.
std::string script_hash(const ScenarioScript& s);

}  // namespace specscen::sim
