#include <doctest.h>

#include <filesystem>

#include "specscen/relations.hpp"
#include "specscen/road_world.hpp"
#include "specscen/scene_graph.hpp"
#include "specscen/waypoint_graph.hpp"

using namespace specscen::world;

namespace {

Lane straight(int id, double y, double length = 100.0) {
  Lane l;
  l.id = id;
  l.road = 0;
  l.centerline = Polyline({{0.0, y}, {length, y}});
  return l;
}

// Two same-direction lanes, lane 1 on the left of lane 0.
RoadWorld two_lanes() {
  Lane a = straight(0, 0.0);
  Lane b = straight(1, 3.5);
  a.left = 1;
  b.right = 0;
  return RoadWorld({a, b}, {});
}

EntityState vehicle(std::string id, std::string type, Vec2 p, double heading = 0.0) {
  EntityState s;
  s.id = std::move(id);
  s.type = std::move(type);
  s.pose = {p, heading};
  s.speed = 5.0;
  return s;
}

std::size_t count_kind(const WaypointGraph& g, EdgeKind k) {
  std::size_t n = 0;
  for (const auto& e : g.edges()) n += e.kind == k;
  return n;
}

}  // namespace

TEST_CASE("grid world shape") {
  GridParams p;
  p.blocks_x = 1;
  p.blocks_y = 1;
  p.control = Control::StopSign;
  const RoadWorld w = build_grid_world(p);
  CHECK(w.intersections().size() == 4);
  CHECK(w.directed_segment_count() == 8);
  CHECK_NOTHROW(w.validate());
  bool any_stop = false;
  for (const auto& l : w.lanes()) {
    if (l.is_connector()) continue;
    CHECK(l.centerline.length() == doctest::Approx(100.0));
    any_stop = any_stop || l.has_stop;
  }
  CHECK(any_stop);
  for (const auto& i : w.intersections()) CHECK(i.control == Control::StopSign);

  p.blocks_x = 0;
  CHECK_THROWS(build_grid_world(p));
}

TEST_CASE("grid world lanes and connectivity") {
  const RoadWorld w = build_grid_world({});
  for (const auto& l : w.lanes()) {
    if (l.left >= 0) CHECK(w.lane(l.left).right == l.id);
    for (int s : l.successors) {
      const auto& succ = w.lane(s);
      CHECK(distance(l.centerline.points().back(), succ.centerline.points().front()) < 1e-6);
    }
  }
}

TEST_CASE("world json round trip") {
  const RoadWorld w = build_grid_world({});
  const RoadWorld back = RoadWorld::from_json(w.to_json());
  CHECK(back.to_json() == w.to_json());
  const auto tmp = std::filesystem::temp_directory_path() / "specscen_world_rt.json";
  save_world(w, tmp);
  CHECK(load_world(tmp).to_json() == w.to_json());
  std::filesystem::remove(tmp);
}

TEST_CASE("waypoints on a straight lane") {
  const RoadWorld w({straight(0, 0.0)}, {});
  const WaypointGraph g = build_waypoint_graph(w, 5.0);
  CHECK(g.size() == 21);
  CHECK(g.edges().size() == 20);
  CHECK(count_kind(g, EdgeKind::Follow) == 20);
  for (const auto& e : g.edges()) CHECK(e.length == doctest::Approx(5.0));
  const auto& ids = g.lane_nodes(0);
  REQUIRE(ids.size() == 21);
  CHECK(g.node(ids.front()).station == doctest::Approx(0.0));
  CHECK(g.node(ids.back()).station == doctest::Approx(100.0));
}

TEST_CASE("lane-change edges") {
  const WaypointGraph g = build_waypoint_graph(two_lanes(), 5.0);
  const std::size_t left = count_kind(g, EdgeKind::LaneChangeLeft);
  const std::size_t right = count_kind(g, EdgeKind::LaneChangeRight);
  CHECK(left > 0);
  CHECK(right > 0);
  for (const auto& e : g.edges()) {
    if (e.kind == EdgeKind::Follow) continue;
    const auto& a = g.node(e.src);
    const auto& b = g.node(e.dst);
    CHECK(a.lane != b.lane);
    CHECK(b.station > a.station);
    if (e.kind == EdgeKind::LaneChangeLeft) CHECK(b.position.y > a.position.y);
    else CHECK(b.position.y < a.position.y);
  }

  const WaypointGraph lone = build_waypoint_graph(RoadWorld({straight(0, 0.0)}, {}), 5.0);
  CHECK(count_kind(lone, EdgeKind::LaneChangeLeft) + count_kind(lone, EdgeKind::LaneChangeRight) == 0);
}

TEST_CASE("nearest waypoint respects heading") {
  Lane back = straight(1, 3.5);
  back.centerline = Polyline({{100.0, 3.5}, {0.0, 3.5}});
  back.road = 0;
  const RoadWorld w({straight(0, 0.0), back}, {});
  const WaypointGraph g = build_waypoint_graph(w, 5.0);
  const Vec2 p{50.0, 2.0};
  CHECK(g.node(g.nearest(p)).lane == 1);
  CHECK(g.node(g.nearest(p, 0.0)).lane == 0);
}

TEST_CASE("scene graph relations on a road") {
  const RoadWorld w = two_lanes();
  const std::vector<EntityState> states{vehicle("ego", "ego", {20.0, 0.0}), vehicle("Car1", "Car", {32.0, 0.0}),
                                        vehicle("Car2", "Car", {26.0, 3.5}), vehicle("Car3", "Car", {14.0, 0.0})};
  const SceneGraph sg = compute_scene_graph(w, states);
  CHECK(sg.entity_count() == 4);
  CHECK(sg.has_edge("ego", "near", "Car1"));
  CHECK(sg.has_edge("ego", "sameLane", "Car1"));
  CHECK(sg.has_edge("ego", "aheadOf", "Car1"));
  CHECK_FALSE(sg.has_edge("ego", "tooClose", "Car1"));
  CHECK_FALSE(sg.has_edge("ego", "behind", "Car1"));
  CHECK(sg.has_edge("Car1", "behind", "ego"));

  // tooClose only counts a vehicle ahead in the same lane.
  CHECK_FALSE(sg.has_edge("ego", "tooClose", "Car2"));
  CHECK_FALSE(sg.has_edge("ego", "sameLane", "Car2"));
  CHECK(sg.has_edge("ego", "toLeftOf", "Car2"));
  CHECK(sg.has_edge("Car3", "tooClose", "ego"));
  CHECK_FALSE(sg.has_edge("ego", "tooClose", "Car3"));
  CHECK(sg.has_edge("ego", "inLane", lane_vertex_id(0)));

  // Sorted, unique edges.
  for (std::size_t i = 1; i < sg.edges().size(); ++i) CHECK(sg.edges()[i - 1] < sg.edges()[i]);
}

TEST_CASE("scene graph marks intersections") {
  GridParams p;
  p.blocks_x = 1;
  p.blocks_y = 1;
  const RoadWorld w = build_grid_world(p);
  const auto& poly = w.intersection(0).polygon;
  Vec2 c;
  for (const auto& v : poly) c = c + v * (1.0 / static_cast<double>(poly.size()));
  const std::vector<EntityState> states{vehicle("ego", "ego", c)};
  const SceneGraph sg = compute_scene_graph(w, states);
  CHECK(sg.has_edge("ego", "atIntersection", intersection_vertex_id(0)));
}

TEST_CASE("stopped attribute") {
  const RoadWorld w = two_lanes();
  auto car = vehicle("Car1", "Car", {50.0, 0.0});
  car.speed = 0.0;
  const std::vector<EntityState> states{vehicle("ego", "ego", {10.0, 0.0}), car};
  const SceneGraph sg = compute_scene_graph(w, states);
  CHECK(sg.has_edge("Car1", "stopped", "Car1"));
  CHECK_FALSE(sg.has_edge("ego", "stopped", "ego"));
}
