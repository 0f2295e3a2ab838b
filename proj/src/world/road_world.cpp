#include "specscen/road_world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace specscen::world {

std::string to_string(Control c) {
  switch (c) {
    case Control::None: return "none";
    case Control::StopSign: return "stop-sign";
    case Control::Signal: return "signal";
  }
  return "none";
}

Control control_from_string(const std::string& s) {
  if (s == "none") return Control::None;
  if (s == "stop-sign" || s == "stop-sign-all") return Control::StopSign;
  if (s == "signal") return Control::Signal;
  throw std::invalid_argument("unknown control scheme '" + s + "'");
}

RoadWorld::RoadWorld(std::vector<Lane> lanes, std::vector<Intersection> intersections)
    : lanes_(std::move(lanes)), intersections_(std::move(intersections)) {
  int max_road = -1;
  for (const auto& l : lanes_) max_road = std::max(max_road, l.road);
  road_count_ = max_road + 1;
}

std::vector<LaneHit> RoadWorld::road_lanes_at(Vec2 p, double half_extent) const {
  std::vector<LaneHit> hits;
  for (const auto& l : lanes_) {
    if (l.is_connector()) continue;
    const Projection pr = l.centerline.project(p);
    if (pr.within && std::abs(pr.lateral) < l.width / 2 + half_extent) hits.push_back({l.id, pr});
  }
  return hits;
}

int RoadWorld::directed_segment_count() const {
  // A directed segment is one travel direction of one road.
  std::vector<std::pair<int, long>> seen;
  for (const auto& l : lanes_) {
    if (l.is_connector()) continue;
    const double h = l.centerline.heading_at(0.0);
    const long bucket = std::lround(h / (std::numbers::pi / 2));
    auto key = std::make_pair(l.road, ((bucket % 4) + 4) % 4);
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) seen.push_back(key);
  }
  return static_cast<int>(seen.size());
}

void RoadWorld::validate() const {
  const int n = static_cast<int>(lanes_.size());
  const int m = static_cast<int>(intersections_.size());
  auto lane_ok = [&](int id) { return id >= 0 && id < n; };
  auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid world: " + msg); };
  for (int i = 0; i < n; ++i) {
    const Lane& l = lanes_[static_cast<std::size_t>(i)];
    const std::string tag = "lane " + std::to_string(i);
    if (l.id != i) fail(tag + " has id " + std::to_string(l.id));
    if (l.width <= 0) fail(tag + " has non-positive width");
    if (l.centerline.points().size() < 2) fail(tag + " has no centerline");
    for (int s : l.successors) {
      if (!lane_ok(s)) fail(tag + " references missing successor");
      const auto& p = lanes_[static_cast<std::size_t>(s)].predecessors;
      if (std::find(p.begin(), p.end(), i) == p.end()) fail(tag + " successor link is one-sided");
    }
    for (int s : l.predecessors) {
      if (!lane_ok(s)) fail(tag + " references missing predecessor");
      const auto& q = lanes_[static_cast<std::size_t>(s)].successors;
      if (std::find(q.begin(), q.end(), i) == q.end()) fail(tag + " predecessor link is one-sided");
    }
    if (l.left >= 0 && (!lane_ok(l.left) || lanes_[static_cast<std::size_t>(l.left)].right != i))
      fail(tag + " left adjacency is not symmetric");
    if (l.right >= 0 && (!lane_ok(l.right) || lanes_[static_cast<std::size_t>(l.right)].left != i))
      fail(tag + " right adjacency is not symmetric");
    if (l.opposing >= 0 && (!lane_ok(l.opposing) || lanes_[static_cast<std::size_t>(l.opposing)].opposing != i))
      fail(tag + " opposing link is not symmetric");
    if (l.intersection >= m) fail(tag + " references missing intersection");
  }
  for (int j = 0; j < m; ++j) {
    const Intersection& x = intersections_[static_cast<std::size_t>(j)];
    if (x.id != j) fail("intersection " + std::to_string(j) + " has id " + std::to_string(x.id));
    if (!polygon_is_simple(x.polygon)) fail("intersection " + std::to_string(j) + " polygon is not simple");
    for (int in : x.incoming)
      if (!lane_ok(in)) fail("intersection " + std::to_string(j) + " references missing lane");
  }
}

namespace {

nlohmann::json points_json(const std::vector<Vec2>& pts) {
  auto arr = nlohmann::json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

std::vector<Vec2> points_from(const nlohmann::json& arr) {
  std::vector<Vec2> pts;
  for (const auto& p : arr) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return pts;
}

}  // namespace

nlohmann::json RoadWorld::to_json() const {
  nlohmann::json j;
  j["lanes"] = nlohmann::json::array();
  for (const auto& l : lanes_) {
    j["lanes"].push_back({
        {"id", l.id},
        {"centerline", points_json(l.centerline.points())},
        {"width", l.width},
        {"left", l.left},
        {"right", l.right},
        {"opposing", l.opposing},
        {"successors", l.successors},
        {"predecessors", l.predecessors},
        {"intersection", l.intersection},
        {"road", l.road},
        {"has_stop", l.has_stop},
        {"overtaking_allowed", l.overtaking_allowed},
    });
  }
  j["intersections"] = nlohmann::json::array();
  for (const auto& x : intersections_) {
    j["intersections"].push_back({
        {"id", x.id},
        {"polygon", points_json(x.polygon)},
        {"incoming", x.incoming},
        {"control", to_string(x.control)},
    });
  }
  return j;
}

RoadWorld RoadWorld::from_json(const nlohmann::json& j) {
  std::vector<Lane> lanes;
  for (const auto& e : j.at("lanes")) {
    Lane l;
    l.id = e.at("id").get<int>();
    l.centerline = Polyline(points_from(e.at("centerline")));
    l.width = e.value("width", 3.5);
    l.left = e.value("left", -1);
    l.right = e.value("right", -1);
    l.opposing = e.value("opposing", -1);
    l.successors = e.value("successors", std::vector<int>{});
    l.predecessors = e.value("predecessors", std::vector<int>{});
    l.intersection = e.value("intersection", -1);
    l.road = e.value("road", -1);
    l.has_stop = e.value("has_stop", false);
    l.overtaking_allowed = e.value("overtaking_allowed", false);
    lanes.push_back(std::move(l));
  }
  std::vector<Intersection> xs;
  for (const auto& e : j.value("intersections", nlohmann::json::array())) {
    Intersection x;
    x.id = e.at("id").get<int>();
    x.polygon = points_from(e.at("polygon"));
    x.incoming = e.value("incoming", std::vector<int>{});
    x.control = control_from_string(e.value("control", std::string("none")));
    xs.push_back(std::move(x));
  }
  RoadWorld w(std::move(lanes), std::move(xs));
  w.validate();
  return w;
}

RoadWorld load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open world file " + path.string());
  return RoadWorld::from_json(nlohmann::json::parse(in));
}

void save_world(const RoadWorld& world, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write world file " + path.string());
  out << world.to_json().dump(1) << '\n';
}

namespace {

struct RoadLaneInfo {
  int start_node;
  int end_node;
  Vec2 dir;
  int index;  // 0 = innermost (next to the center line)
};

std::vector<Vec2> turn_curve(Vec2 p0, Vec2 d_in, Vec2 p2, Vec2 d_out) {
  if (std::abs(cross(d_in, d_out)) < 1e-9) return {p0, p2};
  const Vec2 c = p0 + d_in * dot(p2 - p0, d_in);
  std::vector<Vec2> pts;
  constexpr int kSteps = 8;
  for (int s = 0; s <= kSteps; ++s) {
    const double t = static_cast<double>(s) / kSteps;
    const double u = 1.0 - t;
    pts.push_back(p0 * (u * u) + c * (2 * u * t) + p2 * (t * t));
  }
  return pts;
}

}  // namespace

RoadWorld build_grid_world(const GridParams& gp) {
  if (gp.blocks_x < 1 || gp.blocks_y < 1) throw std::invalid_argument("grid world needs at least one block per axis");
  if (gp.lanes_per_road < 1) throw std::invalid_argument("lanes_per_road must be >= 1");
  if (gp.lane_length <= 0 || gp.lane_width <= 0) throw std::invalid_argument("lane dimensions must be positive");

  const int nx = gp.blocks_x + 1;
  const int ny = gp.blocks_y + 1;
  const double h = gp.lanes_per_road * gp.lane_width;  // half road width
  const double pitch = gp.lane_length + 2 * h;
  auto node_pos = [&](int node) { return Vec2{(node % nx) * pitch, (node / nx) * pitch}; };

  std::vector<Intersection> xs;
  for (int node = 0; node < nx * ny; ++node) {
    const Vec2 c = node_pos(node);
    xs.push_back({node, {{c.x - h, c.y - h}, {c.x + h, c.y - h}, {c.x + h, c.y + h}, {c.x - h, c.y + h}}, {}, gp.control});
  }

  std::vector<std::pair<int, int>> roads;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) roads.emplace_back(j * nx + i, j * nx + i + 1);
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i < nx; ++i) roads.emplace_back(j * nx + i, (j + 1) * nx + i);

  std::vector<Lane> lanes;
  std::vector<RoadLaneInfo> info;
  for (int r = 0; r < static_cast<int>(roads.size()); ++r) {
    const auto [a, b] = roads[static_cast<std::size_t>(r)];
    int first_of_dir[2] = {-1, -1};
    for (int dir = 0; dir < 2; ++dir) {
      const int from = dir == 0 ? a : b;
      const int to = dir == 0 ? b : a;
      const Vec2 pa = node_pos(from);
      const Vec2 pb = node_pos(to);
      const Vec2 d = (pb - pa) * (1.0 / distance(pa, pb));
      const Vec2 right = {d.y, -d.x};
      first_of_dir[dir] = static_cast<int>(lanes.size());
      for (int k = 0; k < gp.lanes_per_road; ++k) {
        const double off = (k + 0.5) * gp.lane_width;
        Lane l;
        l.id = static_cast<int>(lanes.size());
        l.centerline = Polyline({pa + d * h + right * off, pb - d * h + right * off});
        l.width = gp.lane_width;
        l.road = r;
        l.left = k > 0 ? l.id - 1 : -1;
        l.right = k + 1 < gp.lanes_per_road ? l.id + 1 : -1;
        l.has_stop = gp.control == Control::StopSign;
        l.overtaking_allowed = gp.lanes_per_road == 1;
        lanes.push_back(std::move(l));
        info.push_back({from, to, d, k});
        xs[static_cast<std::size_t>(to)].incoming.push_back(lanes.back().id);
      }
    }
    lanes[static_cast<std::size_t>(first_of_dir[0])].opposing = first_of_dir[1];
    lanes[static_cast<std::size_t>(first_of_dir[1])].opposing = first_of_dir[0];
  }

  const std::size_t road_lane_count = lanes.size();
  for (const auto& x : xs) {
    for (int in : x.incoming) {
      for (std::size_t out = 0; out < road_lane_count; ++out) {
        const RoadLaneInfo& li = info[static_cast<std::size_t>(in)];
        const RoadLaneInfo& lo = info[out];
        if (lo.start_node != x.id || lo.index != li.index) continue;
        if (lanes[out].road == lanes[static_cast<std::size_t>(in)].road) continue;  // no U-turns
        Lane c;
        c.id = static_cast<int>(lanes.size());
        const Vec2 p0 = lanes[static_cast<std::size_t>(in)].centerline.points().back();
        const Vec2 p2 = lanes[out].centerline.points().front();
        c.centerline = Polyline(turn_curve(p0, li.dir, p2, lo.dir));
        c.width = gp.lane_width;
        c.intersection = x.id;
        c.predecessors = {in};
        c.successors = {static_cast<int>(out)};
        lanes[static_cast<std::size_t>(in)].successors.push_back(c.id);
        lanes[out].predecessors.push_back(c.id);
        lanes.push_back(std::move(c));
      }
    }
  }

  RoadWorld w(std::move(lanes), std::move(xs));
  w.validate();
  return w;
}

}  // namespace specscen::world
