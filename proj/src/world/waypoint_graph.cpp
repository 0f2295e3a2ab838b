#include "specscen/waypoint_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace specscen::world {

const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Follow: return "follow";
    case EdgeKind::LaneChangeLeft: return "lane-change-left";
    case EdgeKind::LaneChangeRight: return "lane-change-right";
  }
  return "follow";
}

WaypointGraph::WaypointGraph(std::vector<Waypoint> nodes, std::vector<WaypointEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), out_(nodes_.size()) {
  int max_lane = -1;
  for (const auto& n : nodes_) max_lane = std::max(max_lane, n.lane);
  lane_nodes_.resize(static_cast<std::size_t>(max_lane + 1));
  for (const auto& n : nodes_) lane_nodes_[static_cast<std::size_t>(n.lane)].push_back(n.id);
  for (std::size_t e = 0; e < edges_.size(); ++e) out_[static_cast<std::size_t>(edges_[e].src)].push_back(static_cast<int>(e));
  for (auto& o : out_)
    std::sort(o.begin(), o.end(), [&](int a, int b) { return edges_[static_cast<std::size_t>(a)].dst < edges_[static_cast<std::size_t>(b)].dst; });
}

const WaypointEdge* WaypointGraph::find_edge(int src, int dst) const {
  for (int e : out_edges(src))
    if (edges_[static_cast<std::size_t>(e)].dst == dst) return &edges_[static_cast<std::size_t>(e)];
  return nullptr;
}

int WaypointGraph::nearest(Vec2 p) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& n : nodes_) {
    const double d = distance(p, n.position);
    if (d < best_d) {
      best_d = d;
      best = n.id;
    }
  }
  return best;
}

int WaypointGraph::nearest(Vec2 p, double heading) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& n : nodes_) {
    if (std::cos(n.heading - heading) <= 0) continue;
    const double d = distance(p, n.position);
    if (d < best_d) {
      best_d = d;
      best = n.id;
    }
  }
  return best >= 0 ? best : nearest(p);
}

WaypointGraph build_waypoint_graph(const RoadWorld& world, double spacing) {
  if (!(spacing > 0)) throw std::invalid_argument("waypoint spacing must be positive");
  std::vector<Waypoint> nodes;
  std::vector<WaypointEdge> edges;
  std::vector<std::vector<int>> per_lane(world.lanes().size());

  for (const auto& lane : world.lanes()) {
    const double L = lane.centerline.length();
    const int count = std::max(2, static_cast<int>(std::ceil(L / spacing - 1e-9)) + 1);
    for (int i = 0; i < count; ++i) {
      const double s = L * i / (count - 1);
      Waypoint w{static_cast<int>(nodes.size()), lane.centerline.point_at(s), lane.id, lane.centerline.heading_at(s), s};
      per_lane[static_cast<std::size_t>(lane.id)].push_back(w.id);
      nodes.push_back(w);
    }
    const auto& ids = per_lane[static_cast<std::size_t>(lane.id)];
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      const auto& a = nodes[static_cast<std::size_t>(ids[i])];
      const auto& b = nodes[static_cast<std::size_t>(ids[i + 1])];
      edges.push_back({a.id, b.id, EdgeKind::Follow, distance(a.position, b.position)});
    }
  }

  // Across lane boundaries the successor's first waypoint coincides with the
  // predecessor's last, so link to its second one instead.
  for (const auto& lane : world.lanes()) {
    const int last = per_lane[static_cast<std::size_t>(lane.id)].back();
    for (int s : lane.successors) {
      const int next = per_lane[static_cast<std::size_t>(s)][1];
      const double len = distance(nodes[static_cast<std::size_t>(last)].position, nodes[static_cast<std::size_t>(next)].position);
      if (len > 0) edges.push_back({last, next, EdgeKind::Follow, len});
    }
  }

  for (const auto& lane : world.lanes()) {
    const auto& ids = per_lane[static_cast<std::size_t>(lane.id)];
    const double step = lane.centerline.length() / static_cast<double>(ids.size() - 1);
    for (auto [target, kind] : {std::pair{lane.left, EdgeKind::LaneChangeLeft}, std::pair{lane.right, EdgeKind::LaneChangeRight}}) {
      if (target < 0) continue;
      const auto& tids = per_lane[static_cast<std::size_t>(target)];
      const auto& tline = world.lane(target).centerline;
      const double tstep = tline.length() / static_cast<double>(tids.size() - 1);
      for (std::size_t i = 1; i + 1 < ids.size(); ++i) {
        const Waypoint& w = nodes[static_cast<std::size_t>(ids[i])];
        // One step ahead, measured along the neighbouring lane.
        const double want = tline.project(w.position + unit(w.heading) * step).station;
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int t : tids) {
          const double d = std::abs(nodes[static_cast<std::size_t>(t)].station - want);
          if (d < best_d) {
            best_d = d;
            best = t;
          }
        }
        if (best >= 0 && best_d <= 0.5 * tstep + 1e-6)
          edges.push_back({w.id, best, kind, distance(w.position, nodes[static_cast<std::size_t>(best)].position)});
      }
    }
  }
  return WaypointGraph(std::move(nodes), std::move(edges));
}

}  // namespace specscen::world
