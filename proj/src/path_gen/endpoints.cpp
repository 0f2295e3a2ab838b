#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "specscen/path_gen.hpp"
#include "specscen/relations.hpp"
#include "specscen/seeds.hpp"

namespace specscen::path {

using world::EdgeKind;
using world::EntityState;
using world::Vec2;
using world::WaypointGraph;

namespace {

// Path length from `start` to every waypoint; `follow_only` ignores lane changes.
std::vector<double> reach(const WaypointGraph& wg, int start, bool follow_only) {
  std::vector<double> dist(wg.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(start)] = 0.0;
  pq.emplace(0.0, start);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    for (int ei : wg.out_edges(v)) {
      const auto& e = wg.edges()[static_cast<std::size_t>(ei)];
      if (follow_only && e.kind != EdgeKind::Follow) continue;
      if (d + e.length < dist[static_cast<std::size_t>(e.dst)]) {
        dist[static_cast<std::size_t>(e.dst)] = d + e.length;
        pq.emplace(d + e.length, e.dst);
      }
    }
  }
  return dist;
}

bool is_positional(const std::string& rel) {
  const auto info = world::find_relation(rel);
  return info && info->kind != world::RelationKind::Attribute;
}

struct Binder {
  const rg::RelationalGraph& g;
  const scene::Scene& scene;
  const WaypointGraph& wg;
  const world::RoadWorld& world;
  const EndpointParams& params;
  world::SceneGraphBuilder builder;
  Rng rng;
  std::map<std::pair<int, bool>, std::vector<double>> reach_cache;

  const std::vector<double>& cached_reach(int start, bool follow_only) {
    auto key = std::make_pair(start, follow_only);
    auto it = reach_cache.find(key);
    if (it == reach_cache.end()) it = reach_cache.emplace(key, reach(wg, start, follow_only)).first;
    return it->second;
  }

  // Edges that constrain goals: not I-tagged, U_l excluded (it only has to
  // hold on the way), positional, with both ends known.
  std::vector<const rg::RgEdge*> goal_edges(const std::string& entity) const {
    std::vector<const rg::RgEdge*> out;
    for (const auto& e : g.edges()) {
      if (e.tag == rg::Tag::I || e.tag == rg::Tag::Ul || !is_positional(e.relation)) continue;
      const auto& s = g.nodes()[static_cast<std::size_t>(e.src)].id;
      const auto& d = g.nodes()[static_cast<std::size_t>(e.dst)].id;
      if (s == entity || d == entity) out.push_back(&e);
    }
    return out;
  }

  EntityState at_waypoint(const EntityState& base, int w) const {
    EntityState s = base;
    s.pose.position = wg.node(w).position;
    s.pose.heading = wg.node(w).heading;
    return s;
  }

  // True when every goal edge between `entity` (placed at candidate `w`) and
  // already bound entities or static nodes holds on the goal poses.
  bool satisfies(const std::string& entity, int w, const std::vector<EndpointBinding>& bound) const {
    const auto edges = goal_edges(entity);
    if (edges.empty()) return true;
    std::vector<EntityState> states;
    for (const auto& b : bound) states.push_back(at_waypoint(scene.state(b.entity), b.goal));
    states.push_back(at_waypoint(scene.state(entity), w));
    const auto sg = builder(states);
    auto resolve = [&](int node) -> std::string {
      const auto& id = g.nodes()[static_cast<std::size_t>(node)].id;
      auto it = scene.binding.find(id);
      return it == scene.binding.end() ? id : it->second;
    };
    for (const auto* e : edges) {
      const std::string src = resolve(e->src);
      const std::string dst = resolve(e->dst);
      if (sg.find(src) < 0 || sg.find(dst) < 0) continue;  // partner not bound yet
      if (sg.has_edge(src, e->relation, dst) != e->positive) return false;
    }
    return true;
  }

  std::vector<int> candidates(const EntityState& s, int start, double r, const std::vector<double>& any,
                              const std::vector<double>& follow, bool constrained) const {
    std::vector<int> out;
    const Vec2 u = world::unit(s.pose.heading);
    const Vec2 sp = wg.node(start).position;
    const Vec2 ref = sp + u * (0.5 * params.r0);
    for (const auto& w : wg.nodes()) {
      if (w.id == start) continue;
      const auto i = static_cast<std::size_t>(w.id);
      if (!constrained) {
        if (follow[i] >= params.r0 && follow[i] <= r) out.push_back(w.id);
        continue;
      }
      if (!std::isfinite(any[i])) continue;
      if (world::distance(w.position, ref) > r) continue;
      if (world::distance(w.position, sp) < 0.5 * params.r0) continue;
      if (world::dot(w.position - sp, u) <= 0) continue;
      out.push_back(w.id);
    }
    return out;
  }

  std::vector<int> admissible(const EntityState& s, int start, double r, const std::vector<EndpointBinding>& bound) {
    const auto& any = cached_reach(start, false);
    const auto& follow = cached_reach(start, true);
    const bool constrained = !goal_edges(s.id).empty();
    std::vector<int> ok;
    for (int w : candidates(s, start, r, any, follow, constrained))
      if (satisfies(s.id, w, bound)) ok.push_back(w);
    return ok;
  }

  std::optional<EndpointBinding> bind_one(const EntityState& s, double r_begin, double r_end,
                                          const std::vector<EndpointBinding>& bound) {
    const int start = wg.nearest(s.pose.position, s.pose.heading);
    for (double r = r_begin; r <= r_end + 1e-9; r += params.r_step) {
      auto ok = admissible(s, start, r, bound);
      if (!ok.empty()) return EndpointBinding{s.id, start, ok[rng.index(ok.size())], r};
    }
    return std::nullopt;
  }
};

}  // namespace

std::vector<EndpointBinding> bind_endpoints(const rg::RelationalGraph& g, const scene::Scene& scene,
                                            const WaypointGraph& wg, const world::RoadWorld& world,
                                            const EndpointParams& params, std::uint64_t seed) {
  if (!(params.r0 > 0) || !(params.r_step > 0) || params.r_max < params.r0)
    throw std::invalid_argument("endpoint radii must satisfy 0 < r0 <= r_max and r_step > 0");
  if (scene.states.empty()) throw std::invalid_argument("scene has no entities");
  Binder b{g, scene, wg, world, params, world::SceneGraphBuilder(world), Rng(seed), {}};

  const EntityState& ego = scene.states.front();
  const int ego_start = wg.nearest(ego.pose.position, ego.pose.heading);
  for (double r = params.r0; r <= params.r_max + 1e-9; r += params.r_step) {
    // Ego goals are drawn without replacement; each draw is kept only if
    // every NPC can then be bound relative to it.
    auto goals = b.admissible(ego, ego_start, r, {});
    b.rng.shuffle(goals);
    const std::size_t draws = std::min<std::size_t>(goals.size(), static_cast<std::size_t>(std::max(1, params.draws_per_radius)));
    for (std::size_t d = 0; d < draws; ++d) {
      std::vector<EndpointBinding> bound{EndpointBinding{ego.id, ego_start, goals[d], r}};
      bool complete = true;
      for (std::size_t i = 1; i < scene.states.size() && complete; ++i) {
        auto nb = b.bind_one(scene.states[i], params.r0, params.r_max, bound);
        if (!nb) complete = false;
        else bound.push_back(*nb);
      }
      if (complete) return bound;
    }
  }
  // Name the entity that could not be bound for the diagnostic.
  std::string who = ego.id;
  if (scene.states.size() > 1) who = scene.states[1].id;
  throw NoFeasibleEndpoint(who, params.r_max);
}

}  // namespace specscen::path
