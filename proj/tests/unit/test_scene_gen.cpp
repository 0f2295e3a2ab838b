#include <doctest.h>

#include "specscen/rg_generation.hpp"
#include "specscen/scene_gen.hpp"
#include "specscen/spec.hpp"

using namespace specscen;
using rg::RelationalGraph;
using rg::Tag;

namespace {

const world::RoadWorld& grid() {
  static const world::RoadWorld w = world::build_grid_world({});
  return w;
}

bool has_constraint(const scene::SceneConstraintProgram& s, const std::string& rel, bool positive = true) {
  for (const auto& c : s.constraints)
    if (c.relation == rel && c.positive == positive) return true;
  return false;
}

}  // namespace

TEST_CASE("rg to constraint program") {
  RelationalGraph g;
  const int car = g.add_node("Car");
  g.add_edge({0, car, "near", Tag::I, true});
  g.add_edge({0, car, "behind", Tag::F, true});
  const auto sigma = scene::map_rg_to_constraints(g);
  REQUIRE(sigma.entities.size() == 2);
  CHECK(sigma.entities[0].id == "ego");
  CHECK(sigma.entities[1].type == "Car");
  REQUIRE(sigma.constraints.size() == 1);
  CHECK(sigma.constraints[0].relation == "near");
  CHECK(sigma.constraints[0].src == "ego");
  CHECK_FALSE(has_constraint(sigma, "behind"));
}

TEST_CASE("stop-sign hint and forced attributes") {
  RelationalGraph g;
  const int lane = g.add_node("Lane");
  g.add_edge({0, lane, "inLane", Tag::I, true});
  g.add_edge({lane, lane, "hasStop", Tag::I, true});
  const int car = g.add_node("Car");
  g.add_edge({car, car, "stopped", Tag::I, true});
  const auto sigma = scene::map_rg_to_constraints(g);
  REQUIRE(sigma.static_nodes.size() == 1);
  const auto* h = sigma.hint(sigma.static_nodes[0]);
  REQUIRE(h);
  CHECK(h->require_stop);
  const auto* c = sigma.entity(g.nodes()[static_cast<std::size_t>(car)].id);
  REQUIRE(c);
  REQUIRE(c->stopped);
  CHECK(*c->stopped);
}

TEST_CASE("sampled scenes satisfy their constraints") {
  RelationalGraph g;
  const int car = g.add_node("Car");
  g.add_edge({0, car, "aheadOf", Tag::I, true});
  g.add_edge({0, car, "sameLane", Tag::I, true});
  g.add_edge({0, car, "tooClose", Tag::I, false});
  const auto sigma = scene::map_rg_to_constraints(g);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto sc = scene::sample_initial_scene(sigma, grid(), seed);
    CHECK(sc.states.size() == 2);
    CHECK(scene::violations(sigma, grid(), sc).empty());
    CHECK(sc.state("ego").speed == 0.0);
  }
  const auto a = scene::sample_initial_scene(sigma, grid(), 5);
  const auto b = scene::sample_initial_scene(sigma, grid(), 5);
  CHECK(a.to_json() == b.to_json());
  CHECK(scene::Scene::from_json(a.to_json()).to_json() == a.to_json());
}

TEST_CASE("contradictory constraints are unsatisfiable") {
  RelationalGraph g;
  const int car = g.add_node("Car");
  g.add_edge({0, car, "aheadOf", Tag::I, true});
  g.add_edge({0, car, "behind", Tag::I, true});
  scene::SamplerParams p;
  p.max_tries = 50;
  CHECK_THROWS_AS(scene::sample_initial_scene(scene::map_rg_to_constraints(g), grid(), 3, p), scene::Unsatisfiable);
}

TEST_CASE("violations flag an unsound scene") {
  RelationalGraph g;
  const int car = g.add_node("Car");
  g.add_edge({0, car, "aheadOf", Tag::I, true});
  const auto sigma = scene::map_rg_to_constraints(g);
  auto sc = scene::sample_initial_scene(sigma, grid(), 11);
  // Swap the two poses: the car is now behind.
  std::swap(sc.states[0].pose, sc.states[1].pose);
  const auto v = scene::violations(sigma, grid(), sc);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].relation == "aheadOf");
}

TEST_CASE("following-vehicle graphs: four of seven are realizable") {
  const auto sp = spec::parse_spec(R"(
    ap tooClose := |ego.tooClose & Car| > 0;
    ap sameLane := |ego.sameLane & Car| > 0;
    ap behind := |ego.aheadOf & Car| > 0;
    ap stopped := |Car.stopped| > 0;
    pre: !(tooClose && sameLane && behind) && !stopped && X (tooClose && sameLane && behind && !stopped);)");
  const auto r = rg::generate_rgs(sp, rg::NodeBudget{});
  REQUIRE(r.graphs.size() == 7);
  int feasible = 0;
  for (const auto& g : r.graphs) {
    try {
      scene::sample_initial_scene(scene::map_rg_to_constraints(g.graph), grid(), 1);
      ++feasible;
    } catch (const scene::Unsatisfiable&) {
    }
  }
  CHECK(feasible == 4);
}
