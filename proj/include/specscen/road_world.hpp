#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "specscen/geometry.hpp"

namespace specscen::world {

enum class Control { None, StopSign, Signal };

std::string to_string(Control c);
Control control_from_string(const std::string& s);

struct Lane {
  int id = -1;
  Polyline centerline;  // travel direction = point order
  double width = 3.5;
  int left = -1;  // adjacent same-direction lanes
  int right = -1;
  int opposing = -1;
  std::vector<int> successors;
  std::vector<int> predecessors;
  int intersection = -1;  // connector lanes live inside an intersection
  int road = -1;
  bool has_stop = false;
  bool overtaking_allowed = false;  // passing through the opposing lane is legal

  bool is_connector() const { return intersection >= 0; }
};

struct Intersection {
  int id = -1;
  std::vector<Vec2> polygon;
  std::vector<int> incoming;
  Control control = Control::None;
};

struct LaneHit {
  int lane = -1;
  Projection projection;
};

class RoadWorld {
 public:
  RoadWorld() = default;
  RoadWorld(std::vector<Lane> lanes, std::vector<Intersection> intersections);

  const std::vector<Lane>& lanes() const { return lanes_; }
  const std::vector<Intersection>& intersections() const { return intersections_; }
  const Lane& lane(int id) const { return lanes_.at(static_cast<std::size_t>(id)); }
  const Intersection& intersection(int id) const { return intersections_.at(static_cast<std::size_t>(id)); }

  /// Road (non-connector) lanes whose corridor, widened by `half_extent`,
  /// contains `p`. Ascending lane id.
  std::vector<LaneHit> road_lanes_at(Vec2 p, double half_extent = 0.0) const;

  /// Two-way roads and directed road segments (one per travel direction).
  int road_count() const { return road_count_; }
  int directed_segment_count() const;

  /// Throws std::invalid_argument on dangling ids, asymmetric adjacency or
  /// self-intersecting polygons.
  void validate() const;

  nlohmann::json to_json() const;
  static RoadWorld from_json(const nlohmann::json& j);

 private:
  std::vector<Lane> lanes_;
  std::vector<Intersection> intersections_;
  int road_count_ = 0;
};

struct GridParams {
  int blocks_x = 2;
  int blocks_y = 2;
  double lane_length = 100.0;
  int lanes_per_road = 2;  // per travel direction
  Control control = Control::StopSign;
  double lane_width = 3.5;
};

RoadWorld build_grid_world(const GridParams& params);

RoadWorld load_world(const std::filesystem::path& path);
void save_world(const RoadWorld& world, const std::filesystem::path& path);

}  // namespace specscen::world
