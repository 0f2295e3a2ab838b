#include <doctest.h>

#include "../support/oracles.hpp"
#include "specscen/path_gen.hpp"

using namespace specscen;
using world::EdgeKind;
using world::Vec2;
using world::Waypoint;
using world::WaypointEdge;
using world::WaypointGraph;

namespace {

// 0 -> 1 -> 3 (10 m) and 0 -> 2 -> 3 (12 m).
WaypointGraph diamond() {
  std::vector<Waypoint> n{{0, {0, 0}, 0, 0, 0}, {1, {5, 1}, 0, 0, 0}, {2, {6, -2}, 0, 0, 0}, {3, {10, 0}, 0, 0, 0}};
  std::vector<WaypointEdge> e{{0, 1, EdgeKind::Follow, 5}, {1, 3, EdgeKind::Follow, 5},
                              {0, 2, EdgeKind::Follow, 6}, {2, 3, EdgeKind::Follow, 6}};
  return WaypointGraph(n, e);
}

path::Trajectory line(double y, double x1 = 100.0) {
  path::Trajectory t;
  t.polyline = {{0.0, y}, {x1, y}};
  t.length = x1;
  return t;
}

world::RoadWorld two_lanes() {
  world::Lane a;
  a.id = 0;
  a.road = 0;
  a.centerline = world::Polyline({{0.0, 0.0}, {100.0, 0.0}});
  world::Lane b = a;
  b.id = 1;
  b.centerline = world::Polyline({{0.0, 3.5}, {100.0, 3.5}});
  a.left = 1;
  b.right = 0;
  return world::RoadWorld({a, b}, {});
}

}  // namespace

TEST_CASE("k shortest paths on a diamond") {
  const auto g = diamond();
  auto ps = path::k_shortest_paths(g, 0, 3, 5);
  REQUIRE(ps.size() == 2);
  CHECK(ps[0].waypoints == std::vector<int>{0, 1, 3});
  CHECK(ps[0].length == doctest::Approx(10.0));
  CHECK(ps[1].waypoints == std::vector<int>{0, 2, 3});
  CHECK(ps[1].length == doctest::Approx(12.0));
  CHECK(path::is_valid_path(g, ps[1].waypoints));
  CHECK_FALSE(path::is_valid_path(g, {0, 3}));

  ps = path::k_shortest_paths(g, 0, 3, 1);
  REQUIRE(ps.size() == 1);
  CHECK(ps[0].waypoints == std::vector<int>{0, 1, 3});

  CHECK_THROWS_AS(path::k_shortest_paths(g, 3, 0, 2), path::NoPath);
}

TEST_CASE("k shortest paths match exhaustive enumeration on a road") {
  const auto w = two_lanes();
  const auto g = world::build_waypoint_graph(w, 10.0);
  const int start = g.lane_nodes(0)[1];
  const int goal = g.lane_nodes(1).back();
  const auto all = oracle::all_simple_paths(g, start, goal);
  REQUIRE(all.size() >= 3);
  const auto ps = path::k_shortest_paths(g, start, goal, 3);
  REQUIRE(ps.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(ps[i].length == doctest::Approx(all[i].length));
}

TEST_CASE("path distance") {
  const auto a = line(0.0);
  const auto b = line(3.5);
  CHECK(path::path_distance(a, a) == doctest::Approx(0.0));
  CHECK(path::path_distance(a, b) == doctest::Approx(3.5));
  CHECK(path::path_distance(b, a) == doctest::Approx(path::path_distance(a, b)));
  // Different lengths: resampled point by point.
  const auto c = line(0.0, 50.0);
  CHECK(path::path_distance(a, c) == doctest::Approx(25.0));
}

TEST_CASE("diverse selection") {
  const std::vector<path::Trajectory> cands{line(0.0), line(1.0), line(10.0), line(4.0)};
  auto sel = path::select_diverse(cands, 2);
  REQUIRE(sel.size() == 2);
  CHECK(sel[0].polyline == cands[0].polyline);
  CHECK(sel[1].polyline == cands[2].polyline);

  sel = path::select_diverse(cands, 3);
  REQUIRE(sel.size() == 3);
  // Mean distance to {y=0, y=10}: y=4 -> 5, y=1 -> 5. Tie: equal lengths, then id order.
  const auto picked = oracle::brute_force_diverse(cands, 3);
  CHECK(sel[2].polyline == cands[picked[2]].polyline);

  CHECK(path::select_diverse(cands, 10).size() == 4);
  CHECK_THROWS(path::select_diverse({}, 2));
}

TEST_CASE("endpoint radius widens until the goal relation holds") {
  const auto w = two_lanes();
  const auto wg = world::build_waypoint_graph(w, 5.0);
  rg::RelationalGraph g;
  const int car = g.add_node("Car");
  // At the goal the car is behind the ego.
  g.add_edge({0, car, "behind", rg::Tag::F, true});

  scene::Scene sc;
  world::EntityState ego{"ego", "ego", {{10.0, 0.0}, 0.0}, 0.0, {}};
  world::EntityState npc{g.nodes()[static_cast<std::size_t>(car)].id, "Car", {{40.0, 0.0}, 0.0}, 6.0, {}};
  sc.states = {ego, npc};

  path::EndpointParams p;
  p.r0 = 30.0;
  p.r_step = 10.0;
  p.r_max = 80.0;
  const auto b = path::bind_endpoints(g, sc, wg, w, p, 1);
  REQUIRE(b.size() == 2);
  CHECK(b[0].entity == "ego");
  CHECK(b[0].radius == doctest::Approx(40.0));
  CHECK(wg.node(b[0].goal).position.x > wg.node(b[1].goal).position.x + 0.5);

  p.r_max = 30.0;
  CHECK_THROWS_AS(path::bind_endpoints(g, sc, wg, w, p, 1), path::NoFeasibleEndpoint);

  // Without goal relations the goal lies at follow distance [r0, r].
  rg::RelationalGraph solo;
  scene::Scene alone;
  alone.states = {ego};
  p.r_max = 80.0;
  const auto s = path::bind_endpoints(solo, alone, wg, w, p, 2);
  REQUIRE(s.size() == 1);
  CHECK(s[0].radius == doctest::Approx(30.0));
  CHECK(wg.node(s[0].goal).position.x == doctest::Approx(40.0));
}
