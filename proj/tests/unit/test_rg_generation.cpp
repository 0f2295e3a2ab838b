#include <doctest.h>

#include "specscen/rg_generation.hpp"
#include "specscen/spec.hpp"

using namespace specscen;
using rg::RelationalGraph;
using rg::Tag;

namespace {

std::size_t count_edges(const RelationalGraph& g, const std::string& rel, Tag tag, bool positive = true) {
  std::size_t n = 0;
  for (const auto& e : g.edges()) n += e.relation == rel && e.tag == tag && e.positive == positive;
  return n;
}

}  // namespace

TEST_CASE("decompose AP bodies") {
  auto d = rg::decompose_ap("behind", spec::parse_rfol("|ego.aheadOf & Car| > 0"));
  REQUIRE(d.tuples.size() == 1);
  CHECK(d.tuples[0].shape == rg::ApTuple::Shape::FromEgo);
  CHECK(d.tuples[0].relation == "aheadOf");
  CHECK(d.tau == "Car");
  CHECK(d.tag == Tag::I);

  d = rg::decompose_ap("side", spec::parse_rfol("|ego.toLeftOf | ego.behind| > 0"));
  REQUIRE(d.tuples.size() == 2);
  CHECK(d.tuples[0].relation == "toLeftOf");
  CHECK(d.tuples[1].relation == "behind");

  d = rg::decompose_ap("any", spec::parse_rfol("|Car| > 0"));
  CHECK(d.tuples.empty());
  CHECK(d.tau == "Car");

  CHECK_THROWS_AS(rg::decompose_ap("odd", spec::parse_rfol("|ego.near.near & Car| > 0")), rg::UnsupportedBody);
}

TEST_CASE("candidate generation") {
  const auto near = rg::decompose_ap("n", spec::parse_rfol("|ego.near & Car| > 0"));
  RelationalGraph g;

  auto one = rg::generate_candidates(g, near, rg::NodeBudget{{"Car", 1}});
  REQUIRE(one.size() == 1);
  CHECK(one[0].nodes().size() == 2);
  CHECK(count_edges(one[0], "near", Tag::I) == 1);

  auto two = rg::generate_candidates(g, near, rg::NodeBudget{{"Car", 2}});
  CHECK(two.size() == 3);
  CHECK(rg::dedupe_isomorphic(two).size() == 2);

  // Two tuples over one new node: (S1, S2) in {({c},{}), ({},{c}), ({c},{c})}.
  const auto side = rg::decompose_ap("s", spec::parse_rfol("|(ego.toLeftOf | ego.behind) & Car| > 0"));
  auto pairs = rg::generate_candidates(g, side, rg::NodeBudget{{"Car", 1}});
  CHECK(pairs.size() == 3);
}

TEST_CASE("consistency") {
  RelationalGraph g;
  CHECK(rg::check_consistency(g));
  const int v = g.add_node("Car");
  g.add_edge({0, v, "aheadOf", Tag::I, true});
  CHECK(rg::check_consistency(g));

  RelationalGraph bad = g;
  bad.add_edge({0, v, "behind", Tag::I, true});
  CHECK_FALSE(rg::check_consistency(bad));

  RelationalGraph later = g;
  later.add_edge({0, v, "behind", Tag::F, true});
  CHECK(rg::check_consistency(later));

  RelationalGraph twin = g;
  twin.add_edge({0, v, "aheadOf", Tag::I, false});
  CHECK_FALSE(rg::check_consistency(twin));
}

TEST_CASE("isomorphism classes") {
  RelationalGraph a;
  a.add_edge({0, a.add_node("Car"), "near", Tag::I, true});
  a.add_node("Car");
  RelationalGraph b;
  b.add_node("Car");
  b.add_edge({0, b.add_node("Car"), "near", Tag::I, true});
  CHECK(rg::canonical_form(a) == rg::canonical_form(b));
  CHECK(rg::dedupe_isomorphic({a, b}).size() == 1);

  RelationalGraph c;
  c.add_edge({0, c.add_node("Car"), "aheadOf", Tag::I, true});
  RelationalGraph d;
  d.add_edge({0, d.add_node("Car"), "behind", Tag::I, true});
  CHECK(rg::dedupe_isomorphic({c, d}).size() == 2);
}

TEST_CASE("serialization round trip") {
  RelationalGraph g;
  const int c = g.add_node("Car");
  const int ul = g.add_edge({0, c, "near", Tag::Ul, true});
  const int ur = g.add_edge({0, c, "tooClose", Tag::Ur, true});
  g.add_until_pair(ul, ur);
  g.add_edge({c, c, "stopped", Tag::I, false});
  const auto back = RelationalGraph::parse(g.serialize());
  CHECK(back == g);
  CHECK(back.serialize() == g.serialize());
}

TEST_CASE("whole-spec generation") {
  const auto following = spec::parse_spec(R"(
    ap tooClose := |ego.tooClose & Car| > 0;
    ap sameLane := |ego.sameLane & Car| > 0;
    ap behind := |ego.aheadOf & Car| > 0;
    ap stopped := |Car.stopped| > 0;
    pre: !(tooClose && sameLane && behind) && !stopped && X (tooClose && sameLane && behind && !stopped);)");
  auto r = rg::generate_rgs(following, rg::NodeBudget{});
  CHECK(r.graphs.size() == 7);
  for (const auto& g : r.graphs) {
    CHECK(g.graph.count("ego") == 1);
    CHECK(g.graph.count("Car") <= 1);
  }

  const auto overtake = spec::parse_spec(R"(
    ap behindBike := |ego.aheadOf & Bike| > 0;
    ap passed := |ego.behind & Bike| > 0;
    pre: behindBike && F passed;)");
  r = rg::generate_rgs(overtake, rg::NodeBudget{});
  REQUIRE(r.graphs.size() == 1);
  CHECK(count_edges(r.graphs[0].graph, "aheadOf", Tag::I) == 1);
  CHECK(count_edges(r.graphs[0].graph, "behind", Tag::F) == 1);

  const auto single = spec::parse_spec("ap n := |ego.near & Car| > 0; pre: n;");
  r = rg::generate_rgs(single, rg::NodeBudget{});
  REQUIRE(r.graphs.size() == 1);
  CHECK(r.graphs[0].graph.nodes().size() == 2);
  CHECK(r.graphs[0].graph.edges().size() == 1);

  // Contradiction within one time slice under a one-car budget.
  const auto impossible = spec::parse_spec(R"(
    ap ahead := |ego.aheadOf & Car| > 0;
    ap back := |ego.behind & Car| > 0;
    pre: ahead && back;)");
  r = rg::generate_rgs(impossible, rg::NodeBudget{});
  CHECK(r.graphs.empty());
  REQUIRE_FALSE(r.diagnostics.empty());
  CHECK(r.diagnostics[0].find("not satisfiable within the given node budget") != std::string::npos);

  CHECK_THROWS(rg::generate_rgs(spec::parse_spec("ap n := |ego.near & Car| > 0; pre: G n;"), rg::NodeBudget{}));
}

TEST_CASE("budget") {
  rg::NodeBudget b;
  CHECK(b.at("Car") == 1);
  b.set("Car", 3);
  CHECK(b.at("Car") == 3);
  CHECK_THROWS(b.set("Car", 0));
}
