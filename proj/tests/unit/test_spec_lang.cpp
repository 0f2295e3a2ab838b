#include <doctest.h>

#include "../support/oracles.hpp"
#include "specscen/configurations.hpp"
#include "specscen/spec.hpp"

using namespace specscen;
using spec::Formula;
using spec::Op;

namespace {

const char* kFollowing = R"(
spec phi3;
ap tooClose := |ego.tooClose & Car| > 0;
ap sameLane := |ego.sameLane & Car| > 0;
ap behind := |ego.aheadOf & Car| > 0;
ap stopped := |Car.stopped| > 0;
pre: !(tooClose && sameLane && behind) && !stopped
     && X (tooClose && sameLane && behind && !stopped);
)";

// Truth-table equivalence over all traces of length 1..3 with the given APs.
bool equivalent(const Formula& a, const Formula& b, int aps) {
  for (int n = 1; n <= 3; ++n) {
    oracle::BitTraces bt(aps, n);
    if (bt.eval(a) != bt.eval(b)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parse the following-vehicle spec") {
  const auto s = spec::parse_spec(kFollowing);
  CHECK(s.name == "phi3");
  CHECK(s.aps.size() == 4);
  for (const char* name : {"tooClose", "sameLane", "behind", "stopped"}) CHECK(s.aps.contains(name));
  CHECK_FALSE(s.postcondition);
  std::function<int(const Formula&)> count_x = [&](const Formula& f) {
    int n = f.op() == Op::Next ? 1 : 0;
    for (const auto& k : f.children()) n += count_x(k);
    return n;
  };
  CHECK(count_x(s.precondition) == 1);
}

TEST_CASE("minimal program") {
  const auto s = spec::parse_spec("ap p := |Car| > 0; pre: p;");
  CHECK(s.precondition == Formula::ap("p"));
  CHECK_FALSE(s.postcondition);
}

TEST_CASE("syntax errors carry the line") {
  try {
    spec::parse_spec("ap p := |Car| > 0;\npre: (p && p;\n");
    FAIL("expected a parse error");
  } catch (const spec::ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(spec::parse_spec("ap p := |ego.flies| > 0; pre: p;"), spec::ParseError);
  CHECK_THROWS_AS(spec::parse_spec("ap p := |Car| > 0; pre: q;"), spec::ParseError);
}

TEST_CASE("pre/post split") {
  const auto s = spec::parse_spec("ap p := |Car| > 0; ap q := |Bike| > 0; ap r := |ego.near| > 0;"
                                  "pre: p && F q; post: X r;");
  REQUIRE(s.postcondition);
  CHECK(spec::to_string(s.precondition) == "p && F q");
  CHECK(spec::to_string(*s.postcondition) == "X r");

  auto [pre, post] = spec::decompose_pre_post(spec::parse_formula("(a -> b) -> c"));
  CHECK(spec::to_string(pre) == "a -> b");
  REQUIRE(post);
  CHECK(spec::to_string(*post) == "c");
  auto [only, none] = spec::decompose_pre_post(spec::parse_formula("F p"));
  CHECK(spec::to_string(only) == "F p");
  CHECK_FALSE(none);
}

TEST_CASE("normal form") {
  CHECK(spec::to_string(spec::normalize(spec::parse_formula("a -> b"))) == "!a || b");
  CHECK(spec::normalize(Formula::ap("a")) == Formula::ap("a"));
  const Formula f = spec::parse_formula("!(p0 && X p1)");
  const Formula n = spec::normalize(f);
  CHECK(spec::to_string(n) == "!p0 || N !p1");
  CHECK(spec::is_normalized(n));
  CHECK(equivalent(f, n, 2));
}

TEST_CASE("normal form preserves semantics on random formulas") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    int ors = 0;
    const Formula f = oracle::random_formula(rng, 4, 3, 8, ors);
    const Formula n = spec::normalize(f);
    REQUIRE(spec::is_normalized(n));
    REQUIRE(equivalent(f, n, 3));
  }
}

TEST_CASE("disjunction splitting") {
  auto cases = spec::split_disjunctions(spec::parse_formula("a || b"));
  REQUIRE(cases.size() == 3);
  CHECK(spec::to_string(cases[0]) == "a && !b");
  CHECK(spec::to_string(cases[1]) == "!a && b");
  CHECK(spec::to_string(cases[2]) == "a && b");
  CHECK(spec::split_disjunctions(spec::parse_formula("a && b")).size() == 1);

  const Formula f = spec::parse_formula("(p0 || p1) && (p2 || p3)");
  cases = spec::split_disjunctions(f);
  REQUIRE(cases.size() == 9);
  oracle::BitTraces bt(4, 1);
  const auto whole = bt.eval(f);
  std::vector<oracle::BitTraces::Bits> parts;
  for (const auto& c : cases) parts.push_back(bt.eval(c));
  for (std::size_t k = 0; k < bt.count(); ++k) {
    int hits = 0;
    for (const auto& p : parts) hits += bt.test(p, k);
    CHECK(hits == (bt.test(whole, k) ? 1 : 0));
  }
}

TEST_CASE("configurations") {
  const auto s = spec::parse_spec(kFollowing);
  const auto cs = spec::enumerate_configurations(spec::normalize(s.precondition), s.aps);
  CHECK(cs.configurations.size() == 7);
  CHECK(cs.oneflips.size() == 3);
  std::set<std::string> flipped;
  for (const auto& of : cs.oneflips) flipped.insert(of.ap);
  CHECK(flipped == std::set<std::string>{"tooClose", "sameLane", "behind"});

  // Disjunction-free: one configuration, no oneflips.
  const auto plain = spec::parse_spec("ap p := |Car| > 0; ap q := |Bike| > 0; pre: p && X q;");
  const auto cs1 = spec::enumerate_configurations(spec::normalize(plain.precondition), plain.aps);
  CHECK(cs1.configurations.size() == 1);
  CHECK(cs1.oneflips.empty());

  // Union inside an AP body.
  const auto uni = spec::parse_spec("ap side := |ego.toLeftOf | ego.behind| > 0; pre: side;");
  const auto cs2 = spec::enumerate_configurations(spec::normalize(uni.precondition), uni.aps);
  CHECK(cs2.configurations.size() == 3);
  CHECK(cs2.aps.contains("side#0"));
  CHECK(cs2.aps.contains("side#1"));

  // Two-AP flip group.
  const auto two = spec::parse_spec("ap a := |Car| > 0; ap b := |Bike| > 0; pre: !(a && b) && X (a && b);");
  const auto cs3 = spec::enumerate_configurations(spec::normalize(two.precondition), two.aps);
  CHECK(cs3.configurations.size() == 3);
  CHECK(spec::enumerate_oneflips(spec::normalize(two.precondition)).size() == 2);
}

TEST_CASE("configurations are pairwise exclusive") {
  const auto s = spec::parse_spec(R"(
    ap a := |Car| > 0; ap b := |Bike| > 0; ap c := |ego.near| > 0;
    pre: (a || b) && X (!(a && c)); )");
  const auto cs = spec::enumerate_configurations(spec::normalize(s.precondition), s.aps);
  CHECK(cs.configurations.size() == 9);
  // Rename to p0.. for the bit oracle.
  std::map<std::string, std::string> rename{{"a", "p0"}, {"b", "p1"}, {"c", "p2"}};
  std::function<Formula(const Formula&)> rn = [&](const Formula& f) -> Formula {
    if (f.op() == Op::Ap) return Formula::ap(rename.at(f.name()));
    std::vector<Formula> kids;
    for (const auto& k : f.children()) kids.push_back(rn(k));
    return f.arity() ? Formula::make(f.op(), kids) : f;
  };
  for (int n = 1; n <= 3; ++n) {
    oracle::BitTraces bt(3, n);
    const auto whole = bt.eval(rn(s.precondition));
    std::vector<oracle::BitTraces::Bits> parts;
    for (const auto& c : cs.configurations) parts.push_back(bt.eval(rn(c.formula)));
    for (std::size_t k = 0; k < bt.count(); ++k) {
      int hits = 0;
      for (const auto& p : parts) hits += bt.test(p, k);
      REQUIRE(hits == (bt.test(whole, k) ? 1 : 0));
    }
  }
}
