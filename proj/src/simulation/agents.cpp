#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "specscen/simulation.hpp"

namespace specscen::sim {

bool Route::trivial() const {
  if (points.size() < 2) return true;
  double len = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) len += world::distance(points[i - 1], points[i]);
  return len < 1e-9;
}

RouteTracker::RouteTracker(Route route) : route_(std::move(route)) {
  if (!route_.trivial()) {
    polyline_.emplace(route_.points);
    cum_.push_back(0.0);
    for (std::size_t i = 1; i < route_.points.size(); ++i)
      cum_.push_back(cum_.back() + world::distance(route_.points[i - 1], route_.points[i]));
  }
}

void RouteTracker::update(Vec2 p) {
  if (!polyline_) return;
  const auto& pts = route_.points;
  const std::size_t last = std::min(segment_ + 8, pts.size() - 2);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = segment_; i <= last; ++i) {
    const Vec2 d = pts[i + 1] - pts[i];
    const double len2 = world::dot(d, d);
    const double t = len2 > 0 ? std::clamp(world::dot(p - pts[i], d) / len2, 0.0, 1.0) : 0.0;
    const double dist = world::distance(p, pts[i] + d * t);
    if (dist < best - 1e-12) {
      best = dist;
      const double s = cum_[i] + t * std::sqrt(len2);
      if (s >= station_) {
        station_ = s;
        segment_ = i;
      }
    }
  }
}

bool RouteTracker::finished() const { return !polyline_ || station_ >= polyline_->length() - 0.5; }

Vec2 RouteTracker::lookahead(double distance) const {
  if (!polyline_) return route_.points.empty() ? Vec2{} : route_.points.front();
  return polyline_->point_at(station_ + distance);
}

namespace {

constexpr double kCruise = 8.0;
constexpr double kAccel = 3.0;
constexpr double kDecel = 8.0;
constexpr double kFollowRange = 20.0;
constexpr double kBand = 10.0;      // tooClose band edge
constexpr double kFollowGap = 8.0;  // gap the speed rule aims for outside the band

double lookahead_distance(double v) { return 3.0 + 0.5 * v; }

/// Speed at which the pure-pursuit arc toward `aim` respects the heading-rate bound.
double turn_speed_cap(const EntityState& self, Vec2 aim, double floor) {
  const Vec2 to = aim - self.pose.position;
  const double ld = world::norm(to);
  if (ld < 1e-6) return std::numeric_limits<double>::infinity();
  const double a = world::wrap_angle(std::atan2(to.y, to.x) - self.pose.heading);
  const double kappa = 2.0 * std::abs(std::sin(a)) / ld;
  if (kappa < 1e-9) return std::numeric_limits<double>::infinity();
  return std::max(floor, kMaxHeadingRate / kappa);
}

class Follower : public Agent {
 public:
  void reset(const Route& route) override {
    tracker_.emplace(route);
    done_ = tracker_->finished();
    on_reset();
  }

  bool finished() const override { return done_; }

  Control step(const Observation& obs) override {
    const EntityState& me = obs.self;
    const Vec2 u = world::unit(me.pose.heading);
    const double v = me.speed;
    tracker_->update(me.pose.position);
    if (tracker_->finished()) {
      done_ = true;
      return {std::max(0.0, v - kDecel * obs.dt), me.pose.position + u};
    }
    const Vec2 aim = tracker_->lookahead(lookahead_distance(v));
    double target = std::min(kCruise, turn_speed_cap(me, aim, 1.5));
    const double remaining = tracker_->length() - tracker_->station();
    target = std::min(target, std::sqrt(2.0 * kAccel * std::max(0.0, remaining - 0.5)));

    const EntityState* leader = nullptr;
    double gap = kFollowRange;
    for (const auto& o : obs.others) {
      const Vec2 rel = o.pose.position - me.pose.position;
      const double lon = world::dot(rel, u);
      const double lat = world::cross(u, rel);
      if (lon > 0 && lon <= gap && std::abs(lat) < 2.5) {
        gap = lon;
        leader = &o;
      }
    }
    if (leader) {
      const double vl = leader->speed;
      if (gap <= kBand) target = std::min(target, std::max(0.0, vl - 3.0));
      else target = std::min(target, std::max(0.0, vl + 0.5 * (gap - kFollowGap)));
    }
    target = adjust(obs, target);
    const double next = std::clamp(target, v - kDecel * obs.dt, v + kAccel * obs.dt);
    return {std::max(0.0, next), aim};
  }

 protected:
  virtual void on_reset() {}
  virtual double adjust(const Observation&, double target) { return target; }

  std::optional<RouteTracker> tracker_;
  bool done_ = false;
};

class CompliantStopper : public Follower {
 public:
  explicit CompliantStopper(const world::RoadWorld* world) : world_(world) {
    if (!world_) throw std::invalid_argument("compliant-stopper needs the road world");
  }

 protected:
  void on_reset() override {
    stops_.clear();
    served_ = 0;
    holding_ = -1.0;
    const Route& r = tracker_->route();
    double s = 0.0;
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      if (i > 0) s += world::distance(r.points[i - 1], r.points[i]);
      if (i >= r.lanes.size() || r.lanes[i] < 0) continue;
      const auto& lane = world_->lane(r.lanes[i]);
      const bool lane_ends = i + 1 < r.lanes.size() && r.lanes[i + 1] != r.lanes[i];
      if (lane.has_stop && !lane.is_connector() && lane_ends) stops_.push_back(s);
    }
  }

  double adjust(const Observation& obs, double target) override {
    const double s = tracker_->station();
    while (served_ < stops_.size() && s > stops_[served_] + 2.0) ++served_;
    if (served_ >= stops_.size()) return target;
    const double stop_at = stops_[served_] - 1.0;
    if (holding_ >= 0.0) {
      holding_ += obs.dt;
      if (holding_ >= 1.0) {
        holding_ = -1.0;
        ++served_;
        return target;
      }
      return 0.0;
    }
    const double dist = stop_at - s;
    if (std::abs(dist) <= 1.0 && obs.self.speed < 0.1) {
      holding_ = 0.0;
      return 0.0;
    }
    return std::min(target, std::sqrt(2.0 * 4.0 * std::max(0.0, dist)));
  }

 private:
  const world::RoadWorld* world_;
  std::vector<double> stops_;
  std::size_t served_ = 0;
  double holding_ = -1.0;
};

class Scripted : public Agent {
 public:
  explicit Scripted(std::vector<double> tape) : tape_(std::move(tape)) {}

  void reset(const Route& route) override {
    tracker_.emplace(route);
    frame_ = 0;
  }

  bool finished() const override { return tracker_ && tracker_->finished(); }

  Control step(const Observation& obs) override {
    tracker_->update(obs.self.pose.position);
    const double v = frame_ < tape_.size() ? std::max(0.0, tape_[frame_]) : 0.0;
    ++frame_;
    if (tracker_->finished()) return {0.0, obs.self.pose.position + world::unit(obs.self.pose.heading)};
    return {v, tracker_->lookahead(lookahead_distance(obs.self.speed))};
  }

 private:
  std::vector<double> tape_;
  std::optional<RouteTracker> tracker_;
  std::size_t frame_ = 0;
};

}  // namespace

double npc_turn_cap(const EntityState& self, Vec2 aim) { return turn_speed_cap(self, aim, 1.0); }
double npc_lookahead(double v) { return lookahead_distance(v); }

const std::map<std::string, AgentFactory>& builtin_agents() {
  static const std::map<std::string, AgentFactory> registry = {
      {"follower", [](const AgentContext&) { return std::unique_ptr<Agent>(new Follower()); }},
      {"compliant-stopper", [](const AgentContext& c) { return std::unique_ptr<Agent>(new CompliantStopper(c.world)); }},
      {"scripted", [](const AgentContext& c) { return std::unique_ptr<Agent>(new Scripted(c.tape)); }},
  };
  return registry;
}

std::unique_ptr<Agent> make_agent(const std::string& name, const AgentContext& ctx) {
  const auto& reg = builtin_agents();
  auto it = reg.find(name);
  if (it == reg.end()) throw std::invalid_argument("unknown agent '" + name + "'");
  return it->second(ctx);
}

}  // namespace specscen::sim
