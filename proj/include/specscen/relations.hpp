#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specscen::world {

// How a relation's edges are shaped in a scene graph.
enum class RelationKind {
  Pair,            // entity -> entity
  Attribute,       // entity -> itself (unary flag)
  ToLane,          // entity -> lane
  ToIntersection,  // entity -> intersection
};

struct RelationInfo {
  std::string name;
  RelationKind kind;
};

const std::vector<RelationInfo>& relation_registry();
std::optional<RelationInfo> find_relation(std::string_view name);
/// Position in relation_registry(), or -1.
int relation_index(std::string_view name);

inline constexpr std::string_view kEgoType = "ego";
inline constexpr std::string_view kLaneType = "Lane";
inline constexpr std::string_view kIntersectionType = "Intersection";

bool is_vehicle_type(std::string_view type);  // ego, Car, Bike, EmergencyVehicle
bool is_static_type(std::string_view type);   // Lane, Intersection
bool is_known_type(std::string_view type);

/// Element type of the image of `relation` applied to vertices of `source_type`.
/// Pair relations yield no fixed type (nullopt).
std::optional<std::string> image_type(std::string_view relation, std::string_view source_type);

/// Geometric thresholds behind every relation predicate. One place to tune.
struct RelationThresholds {
  double too_close_max = 10.0;  // m, tooClose band upper edge
  double near_min = 10.0;       // m, exclusive
  double near_max = 16.0;       // m, inclusive
  double longitudinal_min = 0.5;
  double lateral_min = 1.75;  // half a lane width
  double intersection_inflation = 2.0;
  double opposing_clear_range = 30.0;
  double stop_speed = 0.1;  // m/s
};

const RelationThresholds& thresholds();

/// True if positive edges `a` and `b` under the same temporal tag contradict.
/// `mirrored` means b runs in the opposite direction of a (b: dst -> src).
bool mutually_exclusive(std::string_view a, std::string_view b, bool mirrored);

}  // namespace specscen::world
