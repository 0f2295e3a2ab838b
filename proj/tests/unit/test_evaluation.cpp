#include <doctest.h>

#include "../support/oracles.hpp"
#include "specscen/evaluation.hpp"
#include "specscen/spec.hpp"

using namespace specscen;
using eval::ApTrace;

namespace {

const char* kFollowing = R"(
ap tooClose := |ego.tooClose & Car| > 0;
ap sameLane := |ego.sameLane & Car| > 0;
ap behind := |ego.aheadOf & Car| > 0;
ap stopped := |Car.stopped| > 0;
pre: !(tooClose && sameLane && behind) && !stopped && X (tooClose && sameLane && behind && !stopped);
)";

const std::vector<std::string> kAps{"tooClose", "sameLane", "behind", "stopped"};

// frames[i] lists the true APs of frame i.
ApTrace valuation(const std::vector<std::set<std::string>>& frames) {
  ApTrace v;
  for (const auto& a : kAps) {
    auto& col = v[a];
    for (const auto& f : frames) col.push_back(f.count(a) ? 1 : 0);
  }
  return v;
}

world::EntityState vehicle(std::string id, std::string type, double x, double y, double speed = 5.0) {
  world::EntityState s;
  s.id = std::move(id);
  s.type = std::move(type);
  s.pose = {{x, y}, 0.0};
  s.speed = speed;
  return s;
}

ApTrace to_valuation(const oracle::NaiveTrace& t, int aps) {
  ApTrace v;
  for (int a = 0; a < aps; ++a) {
    auto& col = v[oracle::ap_name(a)];
    for (const auto& s : t) col.push_back(s.count(oracle::ap_name(a)) ? 1 : 0);
  }
  return v;
}

eval::CoverageReport report_for(const std::vector<ApTrace>& vals, std::size_t n) {
  const auto sp = spec::parse_spec(kFollowing);
  const auto cs = spec::enumerate_configurations(spec::normalize(sp.precondition), sp.aps);
  eval::EvaluatedTraces ev;
  std::vector<eval::TraceResult> info;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    ev.values.push_back(vals[i]);
    ev.lengths.push_back(n);
    info.push_back({"t" + std::to_string(i), false, {}, {}, {}, false, false});
  }
  return eval::compute_coverage(sp, cs, {0, 2, 4, 6}, ev, info);
}

}  // namespace

TEST_CASE("relational expressions on a scene graph") {
  world::Lane l;
  l.id = 0;
  l.road = 0;
  l.centerline = world::Polyline({{0, 0}, {200, 0}});
  const world::RoadWorld w({l}, {});
  const std::vector<world::EntityState> states{vehicle("ego", "ego", 20, 0), vehicle("Car1", "Car", 32, 0),
                                               vehicle("Car2", "Car", 60, 0, 0.0)};
  const auto sg = world::compute_scene_graph(w, states);
  auto holds = [&](const char* text) { return eval::eval_rfol(spec::parse_rfol(text), sg); };
  CHECK(holds("|ego.aheadOf & Car| > 0"));
  CHECK(holds("|ego.aheadOf & Car| = 2"));
  CHECK_FALSE(holds("|ego.behind & Car| > 0"));
  CHECK(holds("|ego.near & Car| > 0"));
  CHECK(holds("|Car.stopped| = 1"));
  CHECK(holds("|Car \\ ego.near| = 1"));
  CHECK(holds("|ego.near | Car.stopped| >= 2"));
  CHECK_FALSE(holds("|Bike| > 0"));
  CHECK(eval::eval_set(*spec::parse_rfol("|ego.near| > 0").set, sg) == eval::VertexSet{sg.find("Car1")});
  CHECK_THROWS_AS(holds("|Truck| > 0"), spec::ParseError);
}

TEST_CASE("temporal operators on short traces") {
  const ApTrace v{{"p0", {1, 0, 1}}, {"p1", {0, 0, 1}}};
  auto at = [&](const char* f, std::size_t i) { return eval::eval_ltlf(spec::parse_formula(f), v, 3, i); };
  CHECK(at("X p1", 1));
  CHECK_FALSE(at("X p1", 2));  // strong next fails on the last frame
  CHECK(at("N p1", 2));
  CHECK(at("F p1", 0));
  CHECK_FALSE(at("G p0", 0));
  CHECK(at("G p0", 2));
  CHECK(at("p0 U p1", 2));
  CHECK_FALSE(at("p0 U p1", 0));
  CHECK(at("p1 R p0", 2));
  CHECK(eval::first_satisfied(spec::parse_formula("p1"), v, 3) == std::optional<std::size_t>{2});
  CHECK_FALSE(eval::first_satisfied(spec::parse_formula("p0 && p1 && X p0"), v, 3));
}

TEST_CASE("temporal evaluation agrees with the recursive definition") {
  Rng rng(2024);
  for (int i = 0; i < 1500; ++i) {
    int ors = 0;
    const auto f = oracle::random_formula(rng, 4, 3, 4, ors);
    const auto t = oracle::random_trace(rng, 3, 6);
    const auto v = to_valuation(t, 3);
    for (std::size_t k = 0; k < t.size(); ++k) REQUIRE(eval::eval_ltlf(f, v, t.size(), k) == oracle::holds(f, t, k));
  }
}

TEST_CASE("coverage with no traces") {
  const auto r = report_for({}, 2);
  CHECK(r.total_configurations == 7);
  CHECK(r.cov1_numerator() == 0);
  CHECK(r.cov1_denominator() == 4);
  CHECK_FALSE(r.cov3());
  CHECK(r.covered_oneflips.empty());
}

TEST_CASE("one covered configuration") {
  const auto sp = spec::parse_spec(kFollowing);
  const auto cs = spec::enumerate_configurations(spec::normalize(sp.precondition), sp.aps);
  // Search the 2-frame valuations for one satisfying configuration 0 only.
  std::optional<ApTrace> witness;
  for (unsigned bits = 0; bits < 256 && !witness; ++bits) {
    std::vector<std::set<std::string>> frames(2);
    for (unsigned b = 0; b < 8; ++b)
      if (bits >> b & 1u) frames[b / 4].insert(kAps[b % 4]);
    const auto v = valuation(frames);
    if (eval::eval_ltlf(cs.configurations[0].formula, v, 2, 0)) witness = v;
  }
  REQUIRE(witness);
  const auto r = report_for({*witness}, 2);
  CHECK(r.covered == std::set<std::size_t>{0});
  CHECK(r.cov1_numerator() == 1);
  CHECK(r.cov1_denominator() == 4);
  CHECK(r.cov1() == doctest::Approx(0.25));
  CHECK(r.cov3());
  REQUIRE(r.traces.size() == 1);
  CHECK(r.traces[0].precondition);
}

TEST_CASE("every one-flip covered") {
  const std::set<std::string> after{"tooClose", "sameLane", "behind"};
  std::vector<ApTrace> vals;
  for (const char* missing : {"tooClose", "sameLane", "behind"}) {
    auto before = after;
    before.erase(missing);
    vals.push_back(valuation({before, after}));
  }
  const auto r = report_for(vals, 2);
  CHECK(r.cov2_applicable);
  CHECK(r.oneflips == 3);
  CHECK(r.covered_oneflips.size() == 3);
  for (const auto& [id, w] : r.covered_oneflips) {
    CHECK(w.from == 0);
    CHECK(w.to == 1);
  }
  // Two APs changing at once is not a one-flip.
  const auto two = report_for({valuation({{"behind"}, after})}, 2);
  CHECK(two.covered_oneflips.empty());
}

TEST_CASE("covered but infeasible configurations are counted with a warning") {
  const auto sp = spec::parse_spec(kFollowing);
  const auto cs = spec::enumerate_configurations(spec::normalize(sp.precondition), sp.aps);
  eval::EvaluatedTraces ev;
  ev.values.push_back(valuation({{"tooClose", "sameLane"}, {"tooClose", "sameLane", "behind"}}));
  ev.lengths.push_back(2);
  const auto r = eval::compute_coverage(sp, cs, {}, ev, {{"t0", false, {}, {}, {}, false, false}});
  CHECK(r.cov1_numerator() == 1);
  CHECK(r.cov1_denominator() == 1);
  CHECK(r.covered_infeasible.size() == 1);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("response time and verdict") {
  const auto sp = spec::parse_spec(R"(
    ap a := |Car| > 0; ap b := |Bike| > 0; ap c := |ego.near| > 0;
    pre: a && F b; post: c;)");
  const auto cs = spec::enumerate_configurations(spec::normalize(sp.precondition), sp.aps);
  eval::EvaluatedTraces ev;
  ev.values.push_back({{"a", {1, 0, 0, 0}}, {"b", {0, 0, 0, 1}}, {"c", {1, 0, 0, 0}}});
  ev.values.push_back({{"a", {1, 1, 0, 0}}, {"b", {0, 0, 1, 0}}, {"c", {1, 0, 0, 0}}});
  ev.lengths = {4, 4};
  const auto r = eval::compute_coverage(sp, cs, {0}, ev,
                                        {{"t0", false, {}, {}, {}, false, false}, {"t1", false, {}, {}, {}, false, false}});
  REQUIRE(r.traces.size() == 2);
  CHECK(r.traces[0].h == std::optional<std::size_t>{3});
  CHECK(r.traces[1].h == std::optional<std::size_t>{1});
  CHECK(r.h == std::optional<std::size_t>{1});
  CHECK(r.traces[0].verdict == std::optional<bool>{true});
  CHECK(r.traces[1].verdict == std::optional<bool>{false});
}

TEST_CASE("coverage curve") {
  SUBCASE("single trace") {
    const auto c = eval::coverage_curve_serial({{1, 0}}, {0, 1}, 2, 10, 1);
    REQUIRE(c.mean.size() == 1);
    CHECK(c.mean[0] == doctest::Approx(0.5));
    CHECK(c.stddev[0] == doctest::Approx(0.0));
  }
  SUBCASE("two traces") {
    const auto c = eval::coverage_curve_serial({{1, 0}, {0, 0}}, {0, 1}, 2, 400, 3);
    REQUIRE(c.mean.size() == 2);
    CHECK(c.mean[1] == doctest::Approx(0.5));
    CHECK(c.stddev[1] == doctest::Approx(0.0));
    CHECK(c.mean[0] > 0.15);
    CHECK(c.mean[0] < 0.35);
    CHECK(c.stddev[0] == doctest::Approx(0.25).epsilon(0.05));
  }
  SUBCASE("monotone runs, serial equals parallel") {
    Rng rng(9);
    eval::SatMatrix m(30, std::vector<char>(6));
    for (auto& row : m)
      for (auto& x : row) x = rng.chance(0.15);
    const std::set<std::size_t> counted{0, 1, 2, 3, 4};
    const auto s = eval::coverage_curve_serial(m, counted, 5, 50, 11);
    const auto p = eval::coverage_curve(m, counted, 5, 50, 11);
    CHECK(s.mean == p.mean);
    CHECK(s.stddev == p.stddev);
    CHECK(s.runs == p.runs);
    for (const auto& run : s.runs)
      for (std::size_t i = 1; i < run.size(); ++i) CHECK(run[i] >= run[i - 1]);
    CHECK(eval::curve_csv(s).rfind("n,mean,stddev\n", 0) == 0);
  }
}

TEST_CASE("satisfaction matrix serial equals parallel") {
  Rng rng(5);
  std::vector<spec::Formula> configs;
  for (int i = 0; i < 12; ++i) {
    int ors = 0;
    configs.push_back(oracle::random_formula(rng, 3, 3, 0, ors));
  }
  std::vector<ApTrace> traces;
  std::vector<std::size_t> lengths;
  for (int i = 0; i < 40; ++i) {
    const auto t = oracle::random_trace(rng, 3, 8);
    traces.push_back(to_valuation(t, 3));
    lengths.push_back(t.size());
  }
  const auto a = eval::satisfaction_matrix_serial(configs, traces, lengths);
  const auto b = eval::satisfaction_matrix(configs, traces, lengths);
  CHECK(a == b);
  // Entry = holds at some start frame.
  for (std::size_t t = 0; t < traces.size(); ++t)
    for (std::size_t c = 0; c < configs.size(); ++c)
      CHECK((a[t][c] != 0) == eval::first_satisfied(configs[c], traces[t], lengths[t]).has_value());
}
