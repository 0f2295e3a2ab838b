#pragma once

#include <vector>

#include "specscen/geometry.hpp"
#include "specscen/road_world.hpp"

namespace specscen::world {

enum class EdgeKind { Follow, LaneChangeLeft, LaneChangeRight };

const char* to_string(EdgeKind k);

struct Waypoint {
  int id = -1;
  Vec2 position;
  int lane = -1;
  double heading = 0.0;
  double station = 0.0;  // arc length along the lane
};

struct WaypointEdge {
  int src = -1;
  int dst = -1;
  EdgeKind kind = EdgeKind::Follow;
  double length = 0.0;
};

/// Dense directed graph of lane-sampled positions. Built once, then read-only.
class WaypointGraph {
 public:
  WaypointGraph() = default;
  WaypointGraph(std::vector<Waypoint> nodes, std::vector<WaypointEdge> edges);

  const std::vector<Waypoint>& nodes() const { return nodes_; }
  const std::vector<WaypointEdge>& edges() const { return edges_; }
  const Waypoint& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return nodes_.size(); }
  /// Indices into edges(), ordered by destination id.
  const std::vector<int>& out_edges(int id) const { return out_.at(static_cast<std::size_t>(id)); }
  /// Waypoint ids of a lane in travel order.
  const std::vector<int>& lane_nodes(int lane) const { return lane_nodes_.at(static_cast<std::size_t>(lane)); }
  const WaypointEdge* find_edge(int src, int dst) const;

  /// Closest waypoint; when `heading` is given, waypoints facing away by more
  /// than 90 degrees are only used if nothing else exists. Ties: lower id.
  int nearest(Vec2 p) const;
  int nearest(Vec2 p, double heading) const;

 private:
  std::vector<Waypoint> nodes_;
  std::vector<WaypointEdge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> lane_nodes_;
};

WaypointGraph build_waypoint_graph(const RoadWorld& world, double spacing);

}  // namespace specscen::world
