#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string_view>
#include <vector>

namespace specscen::world {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit(double heading) { return {std::cos(heading), std::sin(heading)}; }
inline Vec2 left_normal(Vec2 d) { return {-d.y, d.x}; }
double wrap_angle(double a);

/// Rounds to a multiple of `step`; artifacts store quantized values so a
/// replay from file starts from exactly the in-memory state.
inline double quantize(double v, double step = 1e-6) { return std::round(v / step) * step; }

struct Pose {
  Vec2 position;
  double heading = 0.0;  // rad, counter-clockwise from +x
};

struct Projection {
  double station = 0.0;  // arc length of the closest point
  double lateral = 0.0;  // signed offset, left of travel positive
  double distance = 0.0;
  bool within = false;  // closest point is interior, not clamped to an end
};

/// Piecewise-linear curve with cached arc lengths.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return pts_; }
  double length() const { return cum_.empty() ? 0.0 : cum_.back(); }
  Vec2 point_at(double station) const;
  double heading_at(double station) const;
  Projection project(Vec2 p) const;
  /// `count` points equally spaced by arc length (count >= 2).
  std::vector<Vec2> resample(std::size_t count) const;

 private:
  std::size_t segment_at(double station) const;
  std::vector<Vec2> pts_;
  std::vector<double> cum_;
};

bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon);
double distance_to_polygon_boundary(Vec2 p, std::span<const Vec2> polygon);
bool polygon_is_simple(std::span<const Vec2> polygon);

struct Footprint {
  double length = 4.5;
  double width = 2.0;
};

Footprint footprint_for(std::string_view type);
std::array<Vec2, 4> footprint_corners(const Pose& pose, const Footprint& fp);
bool rectangles_overlap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b);

}  // namespace specscen::world
