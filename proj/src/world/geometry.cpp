#include "specscen/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace specscen::world {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0) a += two_pi;
  return a - std::numbers::pi;
}

Polyline::Polyline(std::vector<Vec2> points) : pts_(std::move(points)) {
  if (pts_.size() < 2) throw std::invalid_argument("polyline needs at least two points");
  cum_.reserve(pts_.size());
  cum_.push_back(0.0);
  for (std::size_t i = 1; i < pts_.size(); ++i) cum_.push_back(cum_.back() + distance(pts_[i - 1], pts_[i]));
}

std::size_t Polyline::segment_at(double station) const {
  auto it = std::upper_bound(cum_.begin(), cum_.end(), station);
  std::size_t i = it == cum_.begin() ? 0 : static_cast<std::size_t>(it - cum_.begin()) - 1;
  return std::min(i, pts_.size() - 2);
}

Vec2 Polyline::point_at(double station) const {
  station = std::clamp(station, 0.0, length());
  const std::size_t i = segment_at(station);
  const double seg = cum_[i + 1] - cum_[i];
  const double t = seg > 0 ? (station - cum_[i]) / seg : 0.0;
  return pts_[i] + (pts_[i + 1] - pts_[i]) * t;
}

double Polyline::heading_at(double station) const {
  const std::size_t i = segment_at(std::clamp(station, 0.0, length()));
  const Vec2 d = pts_[i + 1] - pts_[i];
  return std::atan2(d.y, d.x);
}

Projection Polyline::project(Vec2 p) const {
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
    const Vec2 a = pts_[i];
    const Vec2 d = pts_[i + 1] - a;
    const double len2 = dot(d, d);
    double t = len2 > 0 ? dot(p - a, d) / len2 : 0.0;
    const bool clamped_start = (i == 0 && t < 0.0);
    const bool clamped_end = (i + 2 == pts_.size() && t > 1.0);
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 q = a + d * t;
    const double dist = distance(p, q);
    if (dist < best.distance - 1e-12) {
      best.distance = dist;
      best.station = cum_[i] + t * std::sqrt(len2);
      const Vec2 dir = len2 > 0 ? d * (1.0 / std::sqrt(len2)) : Vec2{1, 0};
      best.lateral = cross(dir, p - a);
      best.within = !(clamped_start || clamped_end);
    }
  }
  return best;
}

std::vector<Vec2> Polyline::resample(std::size_t count) const {
  if (count < 2) throw std::invalid_argument("resample needs count >= 2");
  std::vector<Vec2> out;
  out.reserve(count);
  const double L = length();
  for (std::size_t i = 0; i < count; ++i) out.push_back(point_at(L * static_cast<double>(i) / (count - 1)));
  return out;
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  const double t = len2 > 0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
  return distance(p, a + d * t);
}

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

double distance_to_polygon_boundary(Vec2 p, std::span<const Vec2> poly) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
    best = std::min(best, point_segment_distance(p, poly[j], poly[i]));
  return best;
}

bool polygon_is_simple(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // adjacent edges share a vertex
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

Footprint footprint_for(std::string_view type) {
  if (type == "Bike") return {1.8, 0.6};
  if (type == "EmergencyVehicle") return {5.5, 2.2};
  return {4.5, 2.0};
}

std::array<Vec2, 4> footprint_corners(const Pose& pose, const Footprint& fp) {
  const Vec2 f = unit(pose.heading) * (fp.length / 2);
  const Vec2 l = left_normal(unit(pose.heading)) * (fp.width / 2);
  const Vec2 c = pose.position;
  return {c + f + l, c - f + l, c - f - l, c + f - l};
}

bool rectangles_overlap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  auto separated_on = [](const std::array<Vec2, 4>& p, const std::array<Vec2, 4>& q, Vec2 axis) {
    double pmin = 1e300, pmax = -1e300, qmin = 1e300, qmax = -1e300;
    for (const auto& v : p) {
      pmin = std::min(pmin, dot(v, axis));
      pmax = std::max(pmax, dot(v, axis));
    }
    for (const auto& v : q) {
      qmin = std::min(qmin, dot(v, axis));
      qmax = std::max(qmax, dot(v, axis));
    }
    return pmax < qmin || qmax < pmin;
  };
  for (const auto* r : {&a, &b}) {
    for (std::size_t i = 0; i < 2; ++i) {
      const Vec2 e = (*r)[i + 1] - (*r)[i];
      if (separated_on(a, b, left_normal(e))) return false;
    }
  }
  return true;
}

}  // namespace specscen::world
