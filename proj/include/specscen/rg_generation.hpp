#pragma once

#include <map>
#include <string>
#include <vector>

#include "specscen/formula.hpp"
#include "specscen/relational_graph.hpp"
#include "specscen/spec.hpp"

namespace specscen::rg {

/// Per-type node cap. Types without an entry get 1.
class NodeBudget {
 public:
  NodeBudget() = default;
  NodeBudget(std::initializer_list<std::pair<const std::string, int>> init);
  void set(const std::string& type, int max_count);
  int at(const std::string& type) const;
  const std::map<std::string, int>& entries() const { return caps_; }

 private:
  std::map<std::string, int> caps_;
};

struct ApTuple {
  enum class Shape {
    FromEgo,   // ego -rel-> v
    ToEgo,     // v -rel-> ego
    SelfLoop,  // v -attr-> v
  };
  Shape shape = Shape::FromEgo;
  std::string relation;
};

struct ApDecomposition {
  std::string ap;
  spec::RfolExpr body;
  std::vector<ApTuple> tuples;
  std::string tau;  // element type of the body's set
  Tag tag = Tag::I;
  bool positive = true;
  int until_group = -1;  // shared by the two sides of one U
};

struct UnsupportedBody : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

ApDecomposition decompose_ap(const std::string& ap_name, const spec::RfolExpr& body, Tag tag = Tag::I,
                             bool positive = true);

/// Evaluates an AP body over the positive edges of `g` carrying `tag`.
bool holds_in(const RelationalGraph& g, const spec::RfolExpr& body, Tag tag);

std::vector<RelationalGraph> generate_candidates(const RelationalGraph& g, const ApDecomposition& ap,
                                                 const NodeBudget& budget);

bool check_consistency(const RelationalGraph& g);

std::vector<RelationalGraph> dedupe_isomorphic(const std::vector<RelationalGraph>& graphs);

struct GeneratedRg {
  RelationalGraph graph;
  std::vector<std::size_t> sources;  // indices of the input cases that produced it
};

struct RgResult {
  std::vector<GeneratedRg> graphs;
  std::vector<std::string> diagnostics;
};

/// Literal occurrences of a conjunctive formula, positives first.
std::vector<std::vector<ApDecomposition>> decompose_formula(const spec::Formula& f, const spec::ApTable& aps);

/// Folds generate_candidates over each case; isomorphic results are merged
/// and remember every case that produced them.
RgResult generate_rgs(const std::vector<spec::Formula>& cases, const spec::ApTable& aps, const NodeBudget& budget);

/// Normalizes and splits the precondition, then generates.
RgResult generate_rgs(const spec::Spec& spec, const NodeBudget& budget);

}  // namespace specscen::rg
