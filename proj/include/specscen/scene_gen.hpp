#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "specscen/relational_graph.hpp"
#include "specscen/road_world.hpp"
#include "specscen/scene_graph.hpp"

namespace specscen::scene {

struct EntityDecl {
  std::string id;
  std::string type;
  world::EntityAttributes attributes;
  std::optional<bool> stopped;  // forced by a stopped@I edge
};

struct SceneConstraint {
  std::string relation;
  std::string src;
  std::string dst;
  bool positive = true;
};

struct BindingHint {
  std::string node;  // RG static node id
  std::string kind;  // Lane or Intersection
  bool require_stop = false;
};

struct SceneConstraintProgram {
  std::vector<EntityDecl> entities;  // ego first
  std::vector<std::string> static_nodes;
  std::vector<SceneConstraint> constraints;
  std::vector<BindingHint> hints;

  const EntityDecl* entity(const std::string& id) const;
  const BindingHint* hint(const std::string& node) const;
};

SceneConstraintProgram map_rg_to_constraints(const rg::RelationalGraph& g);

struct Scene {
  std::vector<world::EntityState> states;
  std::map<std::string, std::string> binding;  // RG static node -> scene-graph vertex id
  std::uint64_t seed = 0;

  const world::EntityState& state(const std::string& id) const;
  nlohmann::json to_json() const;
  static Scene from_json(const nlohmann::json& j);
};

struct Unsatisfiable : std::runtime_error {
  explicit Unsatisfiable(int tries)
      : std::runtime_error("no satisfying scene within " + std::to_string(tries) + " tries"), tries(tries) {}
  int tries;
};

struct SamplerParams {
  int max_tries = 500;
  double npc_speed = 6.0;  // initial NPC speed; the ego starts at rest
};

Scene sample_initial_scene(const SceneConstraintProgram& sigma, const world::RoadWorld& world, std::uint64_t seed,
                           const SamplerParams& params = {});

/// Positive constraints missing from, or negative constraints present in,
/// the scene graph of `scene`. Empty means the scene is sound.
std::vector<SceneConstraint> violations(const SceneConstraintProgram& sigma, const world::RoadWorld& world,
                                        const Scene& scene);

}  // namespace specscen::scene
