#include <algorithm>
#include <stdexcept>

#include "specscen/simulation.hpp"

namespace specscen::sim {

void SpeedLawParams::validate() const {
  if (!(0 <= v_min && v_min <= v0 && v0 <= v_max)) throw std::invalid_argument("speed law needs 0 <= v_min <= v0 <= v_max");
  if (alpha < 0 || beta < 0) throw std::invalid_argument("speed law gains must be >= 0");
}

double npc_speed(double d, const SpeedLawParams& p) {
  double v;
  if (p.printed_sign) v = p.v0 + (d >= 0 ? p.alpha : -p.beta) * d;
  else v = p.v0 - (d >= 0 ? p.alpha : p.beta) * d;
  return std::clamp(v, p.v_min, p.v_max);
}

double longitudinal_deviation(const EntityState& npc, const EntityState& ego) {
  return world::dot(npc.pose.position - ego.pose.position, world::unit(ego.pose.heading));
}

}  // namespace specscen::sim
