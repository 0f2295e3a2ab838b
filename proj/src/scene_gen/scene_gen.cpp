#include "specscen/scene_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specscen/relations.hpp"
#include "specscen/seeds.hpp"

namespace specscen::scene {

using world::EntityState;
using world::RoadWorld;
using world::Vec2;

const EntityDecl* SceneConstraintProgram::entity(const std::string& id) const {
  for (const auto& e : entities)
    if (e.id == id) return &e;
  return nullptr;
}

const BindingHint* SceneConstraintProgram::hint(const std::string& node) const {
  for (const auto& h : hints)
    if (h.node == node) return &h;
  return nullptr;
}

SceneConstraintProgram map_rg_to_constraints(const rg::RelationalGraph& g) {
  SceneConstraintProgram sigma;
  for (const auto& n : g.nodes()) {
    if (world::is_vehicle_type(n.type)) sigma.entities.push_back({n.id, n.type, {}, std::nullopt});
    else if (world::is_static_type(n.type)) sigma.static_nodes.push_back(n.id);
    else throw std::invalid_argument("no scene mapping for node type '" + n.type + "'");
  }
  const bool stop_scene = std::any_of(g.edges().begin(), g.edges().end(),
                                      [](const rg::RgEdge& e) { return e.positive && e.relation == "hasStop"; });
  for (const auto& n : g.nodes())
    if (world::is_static_type(n.type)) sigma.hints.push_back({n.id, n.type, stop_scene});

  auto decl = [&](int node) -> EntityDecl* {
    const std::string& id = g.nodes()[static_cast<std::size_t>(node)].id;
    for (auto& e : sigma.entities)
      if (e.id == id) return &e;
    return nullptr;
  };
  for (const auto& e : g.edges()) {
    if (!world::find_relation(e.relation)) throw std::invalid_argument("no scene mapping for relation '" + e.relation + "'");
    if (e.tag != rg::Tag::I) continue;
    const std::string& src = g.nodes()[static_cast<std::size_t>(e.src)].id;
    const std::string& dst = g.nodes()[static_cast<std::size_t>(e.dst)].id;
    if (EntityDecl* d = decl(e.src); d && e.src == e.dst) {
      if (e.relation == "hasEmergencyLights") d->attributes.emergency_lights = e.positive;
      if (e.relation == "sirens") d->attributes.sirens = e.positive;
      if (e.relation == "stopped") d->stopped = e.positive;
    }
    sigma.constraints.push_back({e.relation, src, dst, e.positive});
  }
  return sigma;
}

const EntityState& Scene::state(const std::string& id) const {
  for (const auto& s : states)
    if (s.id == id) return s;
  throw std::out_of_range("scene has no entity '" + id + "'");
}

nlohmann::json Scene::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["entities"] = nlohmann::json::array();
  for (const auto& s : states) {
    j["entities"].push_back({{"id", s.id},
                             {"type", s.type},
                             {"x", s.pose.position.x},
                             {"y", s.pose.position.y},
                             {"heading", s.pose.heading},
                             {"speed", s.speed},
                             {"emergency_lights", s.attributes.emergency_lights},
                             {"sirens", s.attributes.sirens}});
  }
  j["binding"] = binding;
  return j;
}

Scene Scene::from_json(const nlohmann::json& j) {
  Scene s;
  s.seed = j.value("seed", std::uint64_t{0});
  for (const auto& e : j.at("entities")) {
    EntityState st;
    st.id = e.at("id").get<std::string>();
    st.type = e.at("type").get<std::string>();
    st.pose.position = {e.at("x").get<double>(), e.at("y").get<double>()};
    st.pose.heading = e.at("heading").get<double>();
    st.speed = e.value("speed", 0.0);
    st.attributes.emergency_lights = e.value("emergency_lights", false);
    st.attributes.sirens = e.value("sirens", false);
    s.states.push_back(std::move(st));
  }
  s.binding = j.value("binding", std::map<std::string, std::string>{});
  return s;
}

namespace {

struct Placement {
  EntityState state;
  int lane = -1;
};

std::string flip(const std::string& rel) {
  if (rel == "aheadOf") return "behind";
  if (rel == "behind") return "aheadOf";
  if (rel == "toLeftOf") return "toRightOf";
  if (rel == "toRightOf") return "toLeftOf";
  return rel;
}

bool is_pair(const std::string& rel) {
  const auto info = world::find_relation(rel);
  return info && info->kind == world::RelationKind::Pair;
}

class Sampler {
 public:
  Sampler(const SceneConstraintProgram& sigma, const RoadWorld& world, const SamplerParams& params, Rng& rng)
      : sigma_(sigma), world_(world), params_(params), rng_(rng) {
    for (const auto& l : world.lanes())
      if (!l.is_connector()) road_lanes_.push_back(l.id);
  }

  std::optional<std::vector<Placement>> place_all() {
    std::vector<Placement> placed;
    for (const auto& d : sigma_.entities) {
      auto p = place(d, placed);
      if (!p) return std::nullopt;
      placed.push_back(std::move(*p));
    }
    return placed;
  }

 private:
  bool has(const std::string& entity, const std::string& rel, bool positive = true) const {
    return std::any_of(sigma_.constraints.begin(), sigma_.constraints.end(), [&](const SceneConstraint& c) {
      return c.src == entity && c.relation == rel && c.positive == positive;
    });
  }

  std::optional<std::string> intersection_node(const std::string& entity, bool& fully) const {
    for (const auto& c : sigma_.constraints) {
      if (c.src != entity || !c.positive) continue;
      if (c.relation == "fullyInIntersection") {
        fully = true;
        return c.dst;
      }
      if (c.relation == "atIntersection") return c.dst;
    }
    return std::nullopt;
  }

  std::optional<Placement> at_lane(const EntityDecl& d, int lane, double station) const {
    const auto& l = world_.lane(lane);
    if (station < 0 || station > l.centerline.length()) return std::nullopt;
    Placement p;
    p.lane = lane;
    p.state.id = d.id;
    p.state.type = d.type;
    p.state.attributes = d.attributes;
    const Vec2 pos = l.centerline.point_at(station);
    p.state.pose.position = {world::quantize(pos.x), world::quantize(pos.y)};
    p.state.pose.heading = world::quantize(l.centerline.heading_at(station));
    const bool ego = d.type == world::kEgoType;
    const bool stopped = d.stopped.value_or(ego);
    p.state.speed = stopped ? 0.0 : params_.npc_speed;
    return p;
  }

  std::optional<Placement> place_at_intersection(const EntityDecl& d, const std::string& node, bool fully) {
    const BindingHint* h = sigma_.hint(node);
    std::vector<int> xs;
    for (const auto& x : world_.intersections())
      if (!(h && h->require_stop) || x.control == world::Control::StopSign) xs.push_back(x.id);
    if (xs.empty())
      for (const auto& x : world_.intersections()) xs.push_back(x.id);
    if (xs.empty()) return std::nullopt;
    const int xi = xs[rng_.index(xs.size())];
    std::vector<int> connectors;
    for (const auto& l : world_.lanes())
      if (l.intersection == xi) connectors.push_back(l.id);
    const auto& incoming = world_.intersection(xi).incoming;
    if (fully || incoming.empty() || rng_.chance(0.5)) {
      if (connectors.empty()) return std::nullopt;
      const int l = connectors[rng_.index(connectors.size())];
      const double L = world_.lane(l).centerline.length();
      return at_lane(d, l, L * rng_.uniform(0.35, 0.65));
    }
    const int l = incoming[rng_.index(incoming.size())];
    const double L = world_.lane(l).centerline.length();
    return at_lane(d, l, L - rng_.uniform(0.0, 1.5));
  }

  int pick_lane_near(Vec2 p, double radius) {
    std::vector<int> close;
    for (int l : road_lanes_) {
      const auto pr = world_.lane(l).centerline.project(p);
      if (pr.distance <= radius) close.push_back(l);
    }
    if (close.empty()) return road_lanes_[rng_.index(road_lanes_.size())];
    return close[rng_.index(close.size())];
  }

  int opposing_of(int lane) const {
    int l = lane;
    while (world_.lane(l).left >= 0) l = world_.lane(l).left;
    return world_.lane(l).opposing;
  }

  std::optional<Placement> place(const EntityDecl& d, const std::vector<Placement>& placed) {
    bool fully = false;
    if (auto node = intersection_node(d.id, fully)) return place_at_intersection(d, *node, fully);

    if (placed.empty()) {
      std::vector<int> lanes;
      for (int l : road_lanes_)
        if (!has(d.id, "hasStop") || world_.lane(l).has_stop) lanes.push_back(l);
      if (lanes.empty()) return std::nullopt;
      const int l = lanes[rng_.index(lanes.size())];
      const double L = world_.lane(l).centerline.length();
      const double margin = std::min(8.0, L / 4);
      return at_lane(d, l, rng_.uniform(margin, L - margin));
    }

    // Relations towards the first placed partner, seen from that partner.
    const Placement* ref = &placed.front();
    std::vector<std::pair<std::string, bool>> rels;
    for (const auto& p : placed) {
      rels.clear();
      for (const auto& c : sigma_.constraints) {
        if (!is_pair(c.relation)) continue;
        if (c.src == p.state.id && c.dst == d.id) rels.emplace_back(c.relation, c.positive);
        if (c.dst == p.state.id && c.src == d.id) rels.emplace_back(c.relation == "tooClose" ? "tooCloseBehind" : flip(c.relation), c.positive);
      }
      if (!rels.empty()) {
        ref = &p;
        break;
      }
    }
    auto want = [&](const std::string& r, bool positive = true) {
      return std::any_of(rels.begin(), rels.end(), [&](const auto& x) { return x.first == r && x.second == positive; });
    };

    const auto& rl = world_.lane(ref->lane);
    int lane = -1;
    if (want("sameLane") || want("tooClose") || want("tooCloseBehind")) {
      lane = ref->lane;
    } else if (want("oppositeLane")) {
      lane = opposing_of(ref->lane);
    } else if (want("toLeftOf")) {
      lane = rl.left >= 0 ? rl.left : rl.opposing;
    } else if (want("toRightOf")) {
      lane = rl.right;
    } else {
      const double r = rng_.uniform();
      std::vector<int> adjacent;
      if (rl.left >= 0) adjacent.push_back(rl.left);
      if (rl.right >= 0) adjacent.push_back(rl.right);
      if (r < 0.4 && !want("sameLane", false)) lane = ref->lane;
      else if (r < 0.7 && !adjacent.empty()) lane = adjacent[rng_.index(adjacent.size())];
      else if (r < 0.85) lane = opposing_of(ref->lane);
      else lane = pick_lane_near(ref->state.pose.position, 40.0);
    }
    if (lane < 0) lane = ref->lane;
    if (world_.lane(lane).is_connector()) lane = ref->lane;

    double offset;
    if (want("tooClose")) offset = rng_.uniform(5.0, 9.5);
    else if (want("tooCloseBehind")) offset = -rng_.uniform(5.0, 9.5);
    else if (want("near")) {
      const double sign = want("aheadOf") ? 1.0 : want("behind") ? -1.0 : (rng_.chance(0.5) ? 1.0 : -1.0);
      offset = sign * rng_.uniform(10.5, 15.5);
    } else if (want("aheadOf")) offset = rng_.uniform(5.0, 30.0);
    else if (want("behind")) offset = -rng_.uniform(5.0, 30.0);
    else offset = rng_.uniform(-30.0, 30.0);

    const Vec2 aim = ref->state.pose.position + world::unit(ref->state.pose.heading) * offset;
    const auto pr = world_.lane(lane).centerline.project(aim);
    if (!pr.within) return std::nullopt;
    return at_lane(d, lane, pr.station);
  }

  const SceneConstraintProgram& sigma_;
  const RoadWorld& world_;
  const SamplerParams& params_;
  Rng& rng_;
  std::vector<int> road_lanes_;
};

bool overlapping(const std::vector<EntityState>& states) {
  for (std::size_t a = 0; a < states.size(); ++a)
    for (std::size_t b = a + 1; b < states.size(); ++b) {
      const auto ca = world::footprint_corners(states[a].pose, world::footprint_for(states[a].type));
      const auto cb = world::footprint_corners(states[b].pose, world::footprint_for(states[b].type));
      if (world::rectangles_overlap(ca, cb)) return true;
    }
  return false;
}

bool constraint_holds(const world::SceneGraph& sg, const SceneConstraint& c, const std::string& src, const std::string& dst) {
  return sg.has_edge(src, c.relation, dst) == c.positive;
}

// Concrete static vertices ordered by preference: ahead of the ego first,
// then by distance, then by id.
std::vector<std::string> static_candidates(const RoadWorld& world, const BindingHint& h, const EntityState& ego) {
  struct Cand {
    int behind;
    double dist;
    int id;
    std::string vertex;
  };
  std::vector<Cand> cands;
  const Vec2 u = world::unit(ego.pose.heading);
  auto rank = [&](Vec2 p) { return world::dot(p - ego.pose.position, u) < 0 ? 1 : 0; };
  if (h.kind == world::kLaneType) {
    for (const auto& l : world.lanes()) {
      if (h.require_stop && !l.has_stop) continue;
      const Vec2 mid = l.centerline.point_at(l.centerline.length() / 2);
      cands.push_back({rank(mid), l.centerline.project(ego.pose.position).distance, l.id, world::lane_vertex_id(l.id)});
    }
  } else {
    for (const auto& x : world.intersections()) {
      if (h.require_stop && x.control != world::Control::StopSign) continue;
      Vec2 c{};
      for (const auto& p : x.polygon) c = c + p * (1.0 / static_cast<double>(x.polygon.size()));
      const double d = world::point_in_polygon(ego.pose.position, x.polygon) ? 0.0 : world::distance(c, ego.pose.position);
      cands.push_back({d == 0.0 ? 0 : rank(c), d, x.id, world::intersection_vertex_id(x.id)});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return std::tie(a.behind, a.dist, a.id) < std::tie(b.behind, b.dist, b.id);
  });
  std::vector<std::string> out;
  for (auto& c : cands) out.push_back(std::move(c.vertex));
  return out;
}

std::optional<std::map<std::string, std::string>> bind_statics(const SceneConstraintProgram& sigma, const RoadWorld& world,
                                                               const world::SceneGraph& sg, const EntityState& ego) {
  std::map<std::string, std::string> binding;
  for (const auto& node : sigma.static_nodes) {
    const BindingHint* h = sigma.hint(node);
    BindingHint hint = h ? *h : BindingHint{node, std::string(world::kLaneType), false};
    auto cands = static_candidates(world, hint, ego);
    if (cands.empty() && hint.require_stop) {
      hint.require_stop = false;
      cands = static_candidates(world, hint, ego);
    }
    bool bound = false;
    for (const auto& v : cands) {
      bool ok = true;
      for (const auto& c : sigma.constraints) {
        if (c.dst != node) continue;
        if (!constraint_holds(sg, c, c.src, v)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        binding[node] = v;
        bound = true;
        break;
      }
    }
    if (!bound) return std::nullopt;
  }
  return binding;
}

}  // namespace

Scene sample_initial_scene(const SceneConstraintProgram& sigma, const RoadWorld& world, std::uint64_t seed,
                           const SamplerParams& params) {
  if (params.max_tries < 1) throw std::invalid_argument("max_tries must be >= 1");
  if (sigma.entities.empty() || sigma.entities.front().type != world::kEgoType)
    throw std::invalid_argument("scene program must declare the ego first");
  Rng rng(seed);
  Sampler sampler(sigma, world, params, rng);
  world::SceneGraphBuilder builder(world);
  for (int t = 0; t < params.max_tries; ++t) {
    auto placed = sampler.place_all();
    if (!placed) continue;
    Scene scene;
    scene.seed = seed;
    for (auto& p : *placed) scene.states.push_back(std::move(p.state));
    if (overlapping(scene.states)) continue;
    const auto sg = builder(scene.states);
    bool ok = true;
    for (const auto& c : sigma.constraints) {
      if (!sigma.entity(c.dst)) continue;  // static targets are checked by the binding
      if (!constraint_holds(sg, c, c.src, c.dst)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    auto binding = bind_statics(sigma, world, sg, scene.states.front());
    if (!binding) continue;
    scene.binding = std::move(*binding);
    return scene;
  }
  throw Unsatisfiable(params.max_tries);
}

std::vector<SceneConstraint> violations(const SceneConstraintProgram& sigma, const RoadWorld& world, const Scene& scene) {
  const auto sg = world::compute_scene_graph(world, scene.states);
  std::vector<SceneConstraint> out;
  for (const auto& c : sigma.constraints) {
    std::string dst = c.dst;
    if (!sigma.entity(c.dst)) {
      auto it = scene.binding.find(c.dst);
      if (it == scene.binding.end()) {
        out.push_back(c);
        continue;
      }
      dst = it->second;
    }
    if (!constraint_holds(sg, c, c.src, dst)) out.push_back(c);
  }
  return out;
}

}  // namespace specscen::scene
