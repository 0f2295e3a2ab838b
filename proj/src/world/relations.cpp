#include "specscen/relations.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace specscen::world {

const std::vector<RelationInfo>& relation_registry() {
  static const std::vector<RelationInfo> registry = {
      {"tooClose", RelationKind::Pair},
      {"near", RelationKind::Pair},
      {"aheadOf", RelationKind::Pair},
      {"behind", RelationKind::Pair},
      {"toLeftOf", RelationKind::Pair},
      {"toRightOf", RelationKind::Pair},
      {"sameLane", RelationKind::Pair},
      {"oppositeLane", RelationKind::Pair},
      {"atIntersection", RelationKind::ToIntersection},
      {"fullyInIntersection", RelationKind::ToIntersection},
      {"inLane", RelationKind::ToLane},
      {"onlyIn", RelationKind::ToLane},
      {"opposingClear", RelationKind::ToLane},
      {"hasStop", RelationKind::Attribute},
      {"stopped", RelationKind::Attribute},
      {"hasEmergencyLights", RelationKind::Attribute},
      {"isEmergencyVehicle", RelationKind::Attribute},
      {"sirens", RelationKind::Attribute},
  };
  return registry;
}

std::optional<RelationInfo> find_relation(std::string_view name) {
  for (const auto& r : relation_registry())
    if (r.name == name) return r;
  return std::nullopt;
}

int relation_index(std::string_view name) {
  const auto& reg = relation_registry();
  for (std::size_t i = 0; i < reg.size(); ++i)
    if (reg[i].name == name) return static_cast<int>(i);
  return -1;
}

bool is_vehicle_type(std::string_view type) {
  return type == kEgoType || type == "Car" || type == "Bike" || type == "EmergencyVehicle";
}

bool is_static_type(std::string_view type) { return type == kLaneType || type == kIntersectionType; }

bool is_known_type(std::string_view type) { return is_vehicle_type(type) || is_static_type(type); }

std::optional<std::string> image_type(std::string_view relation, std::string_view source_type) {
  auto info = find_relation(relation);
  if (!info) return std::nullopt;
  switch (info->kind) {
    case RelationKind::Pair: return std::nullopt;
    case RelationKind::Attribute: return std::string(source_type);
    case RelationKind::ToLane: return std::string(kLaneType);
    case RelationKind::ToIntersection: return std::string(kIntersectionType);
  }
  return std::nullopt;
}

const RelationThresholds& thresholds() {
  static const RelationThresholds t{};
  return t;
}

namespace {

using Pair = std::pair<std::string_view, std::string_view>;

// Same ordered pair, same tag.
constexpr std::array<Pair, 4> kSamePairExclusions = {{
    {"aheadOf", "behind"},
    {"toLeftOf", "toRightOf"},
    {"near", "tooClose"},
    {"sameLane", "oppositeLane"},
}};

// Edge a: x -> y, edge b: y -> x.
constexpr std::array<Pair, 7> kMirroredExclusions = {{
    {"aheadOf", "aheadOf"},
    {"behind", "behind"},
    {"toLeftOf", "toLeftOf"},
    {"toRightOf", "toRightOf"},
    {"near", "tooClose"},
    {"tooClose", "tooClose"},
    {"sameLane", "oppositeLane"},
}};

template <std::size_t N>
bool listed(const std::array<Pair, N>& table, std::string_view a, std::string_view b) {
  return std::any_of(table.begin(), table.end(), [&](const Pair& p) {
    return (p.first == a && p.second == b) || (p.first == b && p.second == a);
  });
}

}  // namespace

bool mutually_exclusive(std::string_view a, std::string_view b, bool mirrored) {
  return mirrored ? listed(kMirroredExclusions, a, b) : listed(kSamePairExclusions, a, b);
}

}  // namespace specscen::world
