#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "specscen/relational_graph.hpp"
#include "specscen/road_world.hpp"
#include "specscen/scene_gen.hpp"
#include "specscen/waypoint_graph.hpp"

namespace specscen::path {

struct Trajectory {
  std::string entity;
  std::vector<int> waypoints;
  double length = 0.0;
  std::vector<world::Vec2> polyline;
};

struct NoPath : std::runtime_error {
  NoPath() : std::runtime_error("no path between the given waypoints") {}
};

/// Orders by total length, then by waypoint-id sequence (lengths within 1e-9
/// count as equal).
bool shorter(const Trajectory& a, const Trajectory& b);

/// Yen's algorithm; every spur path is the lexicographically smallest among
/// its equally short alternatives.
std::vector<Trajectory> k_shortest_paths(const world::WaypointGraph& wg, int start, int goal, int k);

/// Mean point distance after resampling both polylines to 50 points.
double path_distance(const Trajectory& p, const Trajectory& q);
inline constexpr std::size_t kDistanceSamples = 50;

std::vector<Trajectory> select_diverse(const std::vector<Trajectory>& candidates, std::size_t count);

Trajectory make_trajectory(const world::WaypointGraph& wg, std::vector<int> waypoints, std::string entity = {});
/// Consecutive waypoints joined by edges and no waypoint repeated.
bool is_valid_path(const world::WaypointGraph& wg, const std::vector<int>& waypoints);

struct EndpointBinding {
  std::string entity;
  int start = -1;
  int goal = -1;
  double radius = 0.0;
};

struct EndpointParams {
  double r0 = 30.0;
  double r_step = 10.0;
  double r_max = 120.0;
  int draws_per_radius = 16;  // ego goals tried (without replacement) before widening its radius
};

struct NoFeasibleEndpoint : std::runtime_error {
  NoFeasibleEndpoint(const std::string& entity, double r_max)
      : std::runtime_error("no feasible endpoint for '" + entity + "' within radius " + std::to_string(r_max)) {}
};

/// Ego first, then NPCs in scene order. Non-I edges between two entities, or
/// from an entity to a bound static node, are checked on the goal poses.
std::vector<EndpointBinding> bind_endpoints(const rg::RelationalGraph& g, const scene::Scene& scene,
                                            const world::WaypointGraph& wg, const world::RoadWorld& world,
                                            const EndpointParams& params, std::uint64_t seed);

}  // namespace specscen::path
