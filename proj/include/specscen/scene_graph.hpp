#pragma once

#include <compare>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "specscen/geometry.hpp"
#include "specscen/road_world.hpp"

namespace specscen::world {

struct EntityAttributes {
  bool emergency_lights = false;
  bool sirens = false;
};

struct EntityState {
  std::string id;
  std::string type;  // ego, Car, Bike, EmergencyVehicle
  Pose pose;
  double speed = 0.0;
  EntityAttributes attributes;

  bool stopped() const;
};

struct SgVertex {
  std::string id;
  std::string type;
};

struct SgEdge {
  int src = -1;
  int relation = -1;  // index into relation_registry()
  int dst = -1;
  auto operator<=>(const SgEdge&) const = default;
};

/// Entities come first (in state order), then every lane and intersection.
/// The static part is shared between all graphs computed on the same world.
class SceneGraph {
 public:
  SceneGraph() = default;
  SceneGraph(std::vector<SgVertex> entities, std::shared_ptr<const std::vector<SgVertex>> statics,
             std::vector<SgEdge> edges);

  std::size_t vertex_count() const { return entities_.size() + (statics_ ? statics_->size() : 0); }
  std::size_t entity_count() const { return entities_.size(); }
  const SgVertex& vertex(std::size_t i) const;
  int find(std::string_view id) const;

  /// Sorted by (src, relation, dst), no duplicates.
  const std::vector<SgEdge>& edges() const { return edges_; }
  std::span<const SgEdge> out_edges(int src) const;
  bool has_edge(std::string_view src, std::string_view relation, std::string_view dst) const;

 private:
  std::vector<SgVertex> entities_;
  std::shared_ptr<const std::vector<SgVertex>> statics_;
  std::vector<SgEdge> edges_;
  std::vector<std::size_t> offsets_;  // per vertex, into edges_
};

std::string lane_vertex_id(int lane);
std::string intersection_vertex_id(int intersection);

/// Caches the static vertices of a world; cheap to call per frame.
class SceneGraphBuilder {
 public:
  explicit SceneGraphBuilder(const RoadWorld& world);
  SceneGraph operator()(std::span<const EntityState> states) const;
  /// Road lanes whose corridor the entity's footprint overlaps.
  std::vector<int> lanes_of(const EntityState& s) const;
  const RoadWorld& world() const { return *world_; }

 private:
  const RoadWorld* world_;
  std::shared_ptr<const std::vector<SgVertex>> statics_;
};

SceneGraph compute_scene_graph(const RoadWorld& world, std::span<const EntityState> states);

}  // namespace specscen::world
