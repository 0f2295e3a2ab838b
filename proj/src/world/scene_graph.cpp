#include "specscen/scene_graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specscen/relations.hpp"

namespace specscen::world {

bool EntityState::stopped() const { return speed < thresholds().stop_speed; }

SceneGraph::SceneGraph(std::vector<SgVertex> entities, std::shared_ptr<const std::vector<SgVertex>> statics,
                       std::vector<SgEdge> edges)
    : entities_(std::move(entities)), statics_(std::move(statics)), edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  offsets_.assign(vertex_count() + 1, 0);
  for (const auto& e : edges_) {
    if (e.src < 0 || static_cast<std::size_t>(e.src) >= vertex_count()) throw std::out_of_range("scene graph edge source");
    ++offsets_[static_cast<std::size_t>(e.src) + 1];
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
}

const SgVertex& SceneGraph::vertex(std::size_t i) const {
  if (i < entities_.size()) return entities_[i];
  return statics_->at(i - entities_.size());
}

int SceneGraph::find(std::string_view id) const {
  for (std::size_t i = 0; i < vertex_count(); ++i)
    if (vertex(i).id == id) return static_cast<int>(i);
  return -1;
}

std::span<const SgEdge> SceneGraph::out_edges(int src) const {
  if (src < 0 || static_cast<std::size_t>(src) >= vertex_count()) return {};
  const auto s = static_cast<std::size_t>(src);
  return std::span<const SgEdge>(edges_).subspan(offsets_[s], offsets_[s + 1] - offsets_[s]);
}

bool SceneGraph::has_edge(std::string_view src, std::string_view relation, std::string_view dst) const {
  const int s = find(src);
  const int d = find(dst);
  const int r = relation_index(relation);
  if (s < 0 || d < 0 || r < 0) return false;
  auto out = out_edges(s);
  return std::binary_search(out.begin(), out.end(), SgEdge{s, r, d});
}

std::string lane_vertex_id(int lane) { return "lane" + std::to_string(lane); }
std::string intersection_vertex_id(int intersection) { return "intersection" + std::to_string(intersection); }

SceneGraphBuilder::SceneGraphBuilder(const RoadWorld& world) : world_(&world) {
  auto statics = std::make_shared<std::vector<SgVertex>>();
  for (const auto& l : world.lanes()) statics->push_back({lane_vertex_id(l.id), std::string(kLaneType)});
  for (const auto& x : world.intersections())
    statics->push_back({intersection_vertex_id(x.id), std::string(kIntersectionType)});
  statics_ = std::move(statics);
}

std::vector<int> SceneGraphBuilder::lanes_of(const EntityState& s) const {
  const Footprint fp = footprint_for(s.type);
  std::vector<int> out;
  for (const auto& l : world_->lanes()) {
    if (l.is_connector()) continue;
    const Projection pr = l.centerline.project(s.pose.position);
    if (!pr.within) continue;
    const double rel = s.pose.heading - l.centerline.heading_at(pr.station);
    const double half = 0.5 * (fp.length * std::abs(std::sin(rel)) + fp.width * std::abs(std::cos(rel)));
    if (std::abs(pr.lateral) < l.width / 2 + half) out.push_back(l.id);
  }
  return out;
}

namespace {

struct Rel {
  int too_close, near, ahead, behind, left, right, same_lane, opposite_lane;
  int at_intersection, fully_in_intersection, in_lane, only_in, opposing_clear;
  int has_stop, stopped, lights, is_ev, sirens;
};

const Rel& rel() {
  static const Rel r{
      relation_index("tooClose"),       relation_index("near"),
      relation_index("aheadOf"),        relation_index("behind"),
      relation_index("toLeftOf"),       relation_index("toRightOf"),
      relation_index("sameLane"),       relation_index("oppositeLane"),
      relation_index("atIntersection"), relation_index("fullyInIntersection"),
      relation_index("inLane"),         relation_index("onlyIn"),
      relation_index("opposingClear"),  relation_index("hasStop"),
      relation_index("stopped"),        relation_index("hasEmergencyLights"),
      relation_index("isEmergencyVehicle"), relation_index("sirens"),
  };
  return r;
}

bool intersects(const std::vector<int>& a, const std::vector<int>& b) {
  return std::any_of(a.begin(), a.end(), [&](int x) { return std::find(b.begin(), b.end(), x) != b.end(); });
}

}  // namespace

SceneGraph SceneGraphBuilder::operator()(std::span<const EntityState> states) const {
  const auto& T = thresholds();
  const Rel& R = rel();
  const int n = static_cast<int>(states.size());
  const int lane_base = n;
  const int intersection_base = n + static_cast<int>(world_->lanes().size());

  std::vector<SgVertex> entities;
  std::vector<std::vector<int>> lanes(states.size());
  for (int i = 0; i < n; ++i) {
    entities.push_back({states[i].id, states[i].type});
    lanes[i] = lanes_of(states[i]);
  }

  std::vector<SgEdge> edges;
  int ego = -1;
  for (int i = 0; i < n; ++i)
    if (states[i].type == kEgoType) ego = i;

  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      // Both directions of a pair share one frame, which keeps aheadOf/behind
      // and toLeftOf/toRightOf exact mirrors of each other.
      const int frame_owner = (a == ego || b == ego) ? ego : std::min(a, b);
      const Vec2 u = unit(states[frame_owner].pose.heading);
      const Vec2 disp = states[b].pose.position - states[a].pose.position;
      const double lon = dot(disp, u);
      const double lat = cross(u, disp);
      const double dist = norm(disp);
      const bool same_lane = intersects(lanes[a], lanes[b]);
      if (lon > T.longitudinal_min) edges.push_back({a, R.ahead, b});
      if (lon < -T.longitudinal_min) edges.push_back({a, R.behind, b});
      if (lat > T.lateral_min) edges.push_back({a, R.left, b});
      if (lat < -T.lateral_min) edges.push_back({a, R.right, b});
      if (dist > T.near_min && dist <= T.near_max) edges.push_back({a, R.near, b});
      if (lon > T.longitudinal_min && same_lane && dist <= T.too_close_max) edges.push_back({a, R.too_close, b});
      if (same_lane) edges.push_back({a, R.same_lane, b});
      bool opposite = false;
      for (int la : lanes[a]) {
        const int opp = world_->lane(la).opposing;
        if (opp >= 0 && std::find(lanes[b].begin(), lanes[b].end(), opp) != lanes[b].end()) opposite = true;
      }
      if (opposite) edges.push_back({a, R.opposite_lane, b});
    }
  }

  for (int a = 0; a < n; ++a) {
    const EntityState& s = states[a];
    const Footprint fp = footprint_for(s.type);
    const auto corners = footprint_corners(s.pose, fp);

    for (int l : lanes[a]) edges.push_back({a, R.in_lane, lane_base + l});
    if (lanes[a].size() == 1) {
      const Lane& l = world_->lane(lanes[a][0]);
      const bool inside = std::all_of(corners.begin(), corners.end(), [&](Vec2 c) {
        const Projection pr = l.centerline.project(c);
        return std::abs(pr.lateral) <= l.width / 2;
      });
      if (inside) edges.push_back({a, R.only_in, lane_base + l.id});
    }
    for (int l : lanes[a]) {
      const int opp = world_->lane(l).opposing;
      if (opp < 0) continue;
      const Vec2 u = unit(s.pose.heading);
      bool clear = true;
      for (int b = 0; b < n && clear; ++b) {
        if (b == a || std::find(lanes[b].begin(), lanes[b].end(), opp) == lanes[b].end()) continue;
        const double lon = dot(states[b].pose.position - s.pose.position, u);
        if (lon > 0 && lon <= T.opposing_clear_range) clear = false;
      }
      if (clear) edges.push_back({a, R.opposing_clear, lane_base + l});
    }

    for (const auto& x : world_->intersections()) {
      const bool center_in = point_in_polygon(s.pose.position, x.polygon) ||
                             distance_to_polygon_boundary(s.pose.position, x.polygon) <= T.intersection_inflation;
      if (center_in) edges.push_back({a, R.at_intersection, intersection_base + x.id});
      const bool fully = std::all_of(corners.begin(), corners.end(), [&](Vec2 c) { return point_in_polygon(c, x.polygon); });
      if (fully) edges.push_back({a, R.fully_in_intersection, intersection_base + x.id});
    }

    const bool has_stop = std::any_of(lanes[a].begin(), lanes[a].end(), [&](int l) { return world_->lane(l).has_stop; });
    if (has_stop) edges.push_back({a, R.has_stop, a});
    if (s.stopped()) edges.push_back({a, R.stopped, a});
    if (s.attributes.emergency_lights) edges.push_back({a, R.lights, a});
    if (s.type == "EmergencyVehicle") edges.push_back({a, R.is_ev, a});
    if (s.attributes.sirens) edges.push_back({a, R.sirens, a});
  }
  return SceneGraph(std::move(entities), statics_, std::move(edges));
}

SceneGraph compute_scene_graph(const RoadWorld& world, std::span<const EntityState> states) {
  return SceneGraphBuilder(world)(states);
}

}  // namespace specscen::world
