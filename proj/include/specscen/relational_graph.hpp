#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace specscen::rg {

enum class Tag { I, X, F, Ul, Ur };

std::string to_string(Tag t);
Tag tag_from_string(std::string_view s);

struct RgNode {
  std::string id;
  std::string type;
  bool operator==(const RgNode&) const = default;
};

struct RgEdge {
  int src = -1;
  int dst = -1;
  std::string relation;
  Tag tag = Tag::I;
  bool positive = true;

  bool operator==(const RgEdge&) const = default;
};

class RelationalGraph {
 public:
  /// A graph holding only the ego node.
  RelationalGraph();

  const std::vector<RgNode>& nodes() const { return nodes_; }
  const std::vector<RgEdge>& edges() const { return edges_; }
  const std::vector<std::pair<int, int>>& until_pairs() const { return until_pairs_; }

  int ego() const { return 0; }
  int find(std::string_view id) const;
  std::size_t count(std::string_view type) const;
  std::vector<int> nodes_of(std::string_view type) const;

  int add_node(std::string type);
  /// Returns the index of the (possibly pre-existing) identical edge.
  int add_edge(const RgEdge& e);
  void add_until_pair(int ul_edge, int ur_edge) { until_pairs_.emplace_back(ul_edge, ur_edge); }
  int degree(int node) const;
  /// Removes nodes with index >= first_new that have no incident edge.
  void drop_isolated_from(int first_new);


  std::string serialize() const;
  static RelationalGraph parse(std::string_view text);

  bool operator==(const RelationalGraph& o) const {
    return nodes_ == o.nodes_ && edges_ == o.edges_ && until_pairs_ == o.until_pairs_;
  }

 private:
  std::vector<RgNode> nodes_;
  std::vector<RgEdge> edges_;
  std::vector<std::pair<int, int>> until_pairs_;
  std::map<std::string, int, std::less<>> counters_;
};

/// Isomorphism-invariant string (ego pinned). Equal strings <=> isomorphic.
std::string canonical_form(const RelationalGraph& g);

/// The graph relabeled into its canonical node and edge order.
RelationalGraph canonicalize(const RelationalGraph& g);

}  // namespace specscen::rg
