#include "specscen/relational_graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace specscen::rg {

std::string to_string(Tag t) {
  switch (t) {
    case Tag::I: return "I";
    case Tag::X: return "X";
    case Tag::F: return "F";
    case Tag::Ul: return "U_l";
    case Tag::Ur: return "U_r";
  }
  return "I";
}

Tag tag_from_string(std::string_view s) {
  if (s == "I") return Tag::I;
  if (s == "X") return Tag::X;
  if (s == "F") return Tag::F;
  if (s == "U_l") return Tag::Ul;
  if (s == "U_r") return Tag::Ur;
  throw std::invalid_argument("unknown temporal tag '" + std::string(s) + "'");
}

namespace {

std::string id_prefix(std::string_view type) {
  if (type == "Car") return "car";
  if (type == "Bike") return "bike";
  if (type == "EmergencyVehicle") return "ev";
  if (type == "Lane") return "lane";
  if (type == "Intersection") return "intersection";
  std::string s(type);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

RelationalGraph::RelationalGraph() { nodes_.push_back({"ego", "ego"}); }

int RelationalGraph::find(std::string_view id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].id == id) return static_cast<int>(i);
  return -1;
}

std::size_t RelationalGraph::count(std::string_view type) const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [&](const RgNode& n) { return n.type == type; }));
}

std::vector<int> RelationalGraph::nodes_of(std::string_view type) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].type == type) out.push_back(static_cast<int>(i));
  return out;
}

int RelationalGraph::add_node(std::string type) {
  const std::string prefix = id_prefix(type);
  int& c = counters_[prefix];
  std::string id;
  do {
    id = prefix + std::to_string(++c);
  } while (find(id) >= 0);
  nodes_.push_back({std::move(id), std::move(type)});
  return static_cast<int>(nodes_.size()) - 1;
}

int RelationalGraph::add_edge(const RgEdge& e) {
  for (std::size_t i = 0; i < edges_.size(); ++i)
    if (edges_[i] == e) return static_cast<int>(i);
  edges_.push_back(e);
  return static_cast<int>(edges_.size()) - 1;
}

int RelationalGraph::degree(int node) const {
  return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [&](const RgEdge& e) { return e.src == node || e.dst == node; }));
}

void RelationalGraph::drop_isolated_from(int first_new) {
  std::vector<int> remap(nodes_.size());
  std::vector<RgNode> kept;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (static_cast<int>(i) >= first_new && degree(static_cast<int>(i)) == 0) {
      remap[i] = -1;
      continue;
    }
    remap[i] = static_cast<int>(kept.size());
    kept.push_back(nodes_[i]);
  }
  if (kept.size() == nodes_.size()) return;
  nodes_ = std::move(kept);
  for (auto& e : edges_) {
    e.src = remap[static_cast<std::size_t>(e.src)];
    e.dst = remap[static_cast<std::size_t>(e.dst)];
  }
}

std::string RelationalGraph::serialize() const {
  std::ostringstream out;
  for (const auto& n : nodes_) out << "node " << n.id << ' ' << n.type << '\n';
  for (const auto& e : edges_) {
    out << "edge " << nodes_[static_cast<std::size_t>(e.src)].id << ' ' << e.relation << '@' << to_string(e.tag) << ' '
        << nodes_[static_cast<std::size_t>(e.dst)].id;
    if (!e.positive) out << " neg";
    out << '\n';
  }
  for (const auto& [a, b] : until_pairs_) out << "until " << a << ' ' << b << '\n';
  return out.str();
}

RelationalGraph RelationalGraph::parse(std::string_view text) {
  RelationalGraph g;
  g.nodes_.clear();
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("relational graph line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "node") {
      RgNode n;
      if (!(ls >> n.id >> n.type)) fail("expected 'node <id> <type>'");
      g.nodes_.push_back(n);
    } else if (kw == "edge") {
      std::string src, label, dst, flag;
      if (!(ls >> src >> label >> dst)) fail("expected 'edge <src> <rel>@<tag> <dst>'");
      const auto at = label.find('@');
      if (at == std::string::npos) fail("edge label needs '@<tag>'");
      RgEdge e;
      e.src = g.find(src);
      e.dst = g.find(dst);
      if (e.src < 0 || e.dst < 0) fail("edge references unknown node");
      e.relation = label.substr(0, at);
      e.tag = tag_from_string(label.substr(at + 1));
      if (ls >> flag) {
        if (flag != "neg") fail("unexpected token '" + flag + "'");
        e.positive = false;
      }
      g.edges_.push_back(e);
    } else if (kw == "until") {
      int a = -1, b = -1;
      if (!(ls >> a >> b)) fail("expected 'until <edge> <edge>'");
      const int n = static_cast<int>(g.edges_.size());
      if (a < 0 || b < 0 || a >= n || b >= n) fail("until references unknown edge");
      g.until_pairs_.emplace_back(a, b);
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }
  if (g.nodes_.empty() || g.nodes_[0].type != "ego") throw std::invalid_argument("relational graph must start with the ego node");
  return g;
}

namespace {

std::string edge_key(const RgEdge& e, const std::vector<int>& pos) {
  char buf[16];
  std::string s;
  std::snprintf(buf, sizeof buf, "%03d,%03d,", pos[static_cast<std::size_t>(e.src)], pos[static_cast<std::size_t>(e.dst)]);
  s += buf;
  s += e.relation;
  s += '@';
  s += to_string(e.tag);
  s += e.positive ? "+" : "-";
  return s;
}

struct Labeling {
  std::string form;
  std::vector<int> order;  // canonical position -> original node
};

// Color refinement gives an isomorphism-invariant partition; trying every
// order inside each color class makes the minimum exact.
Labeling best_labeling(const RelationalGraph& g) {
  const std::size_t n = g.nodes().size();
  std::vector<std::string> color(n);
  for (std::size_t i = 0; i < n; ++i) color[i] = (i == 0 ? "0" : "1") + g.nodes()[i].type;

  std::size_t classes = 0;
  for (std::size_t round = 0; round <= n; ++round) {
    std::vector<std::string> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> around;
      for (const auto& e : g.edges()) {
        const std::string lab = e.relation + "@" + to_string(e.tag) + (e.positive ? "+" : "-");
        if (e.src == static_cast<int>(i)) around.push_back("o" + lab + ">" + color[static_cast<std::size_t>(e.dst)]);
        if (e.dst == static_cast<int>(i)) around.push_back("i" + lab + "<" + color[static_cast<std::size_t>(e.src)]);
      }
      std::sort(around.begin(), around.end());
      next[i] = color[i] + "[";
      for (const auto& a : around) next[i] += a + ";";
      next[i] += "]";
    }
    std::vector<std::string> distinct = next;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = std::lower_bound(distinct.begin(), distinct.end(), next[i]) - distinct.begin();
      char buf[8];
      std::snprintf(buf, sizeof buf, "%04d", static_cast<int>(r));
      color[i] = std::string(buf);
    }
    if (distinct.size() == classes) break;
    classes = distinct.size();
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return color[static_cast<std::size_t>(a)] < color[static_cast<std::size_t>(b)]; });
  std::vector<std::pair<std::size_t, std::size_t>> runs;  // [begin, end) of equal colors
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && color[static_cast<std::size_t>(order[j])] == color[static_cast<std::size_t>(order[i])]) ++j;
    runs.emplace_back(i, j);
    i = j;
  }

  auto form_of = [&](const std::vector<int>& ord) {
    std::vector<int> pos(n);
    for (std::size_t p = 0; p < n; ++p) pos[static_cast<std::size_t>(ord[p])] = static_cast<int>(p);
    std::string s;
    for (int v : ord) s += g.nodes()[static_cast<std::size_t>(v)].type + ";";
    std::vector<std::string> keys;
    for (const auto& e : g.edges()) keys.push_back(edge_key(e, pos));
    std::sort(keys.begin(), keys.end());
    for (const auto& k : keys) s += "|" + k;
    std::vector<std::string> pairs;
    for (const auto& [a, b] : g.until_pairs())
      pairs.push_back(edge_key(g.edges()[static_cast<std::size_t>(a)], pos) + "~" + edge_key(g.edges()[static_cast<std::size_t>(b)], pos));
    std::sort(pairs.begin(), pairs.end());
    for (const auto& p : pairs) s += "#" + p;
    return s;
  };

  Labeling best{form_of(order), order};
  std::function<void(std::size_t, std::vector<int>&)> search = [&](std::size_t r, std::vector<int>& ord) {
    if (r == runs.size()) {
      std::string f = form_of(ord);
      if (f < best.form) best = {std::move(f), ord};
      return;
    }
    auto [b, e] = runs[r];
    std::sort(ord.begin() + static_cast<long>(b), ord.begin() + static_cast<long>(e));
    do {
      search(r + 1, ord);
    } while (std::next_permutation(ord.begin() + static_cast<long>(b), ord.begin() + static_cast<long>(e)));
  };
  std::vector<int> ord = order;
  search(0, ord);
  return best;
}

}  // namespace

std::string canonical_form(const RelationalGraph& g) { return best_labeling(g).form; }

RelationalGraph canonicalize(const RelationalGraph& g) {
  const Labeling lab = best_labeling(g);
  const std::size_t n = g.nodes().size();
  std::vector<int> pos(n);
  for (std::size_t p = 0; p < n; ++p) pos[static_cast<std::size_t>(lab.order[p])] = static_cast<int>(p);

  RelationalGraph out;
  for (std::size_t p = 1; p < n; ++p) out.add_node(g.nodes()[static_cast<std::size_t>(lab.order[p])].type);

  std::vector<int> edge_order(g.edges().size());
  std::iota(edge_order.begin(), edge_order.end(), 0);
  std::sort(edge_order.begin(), edge_order.end(), [&](int a, int b) {
    return edge_key(g.edges()[static_cast<std::size_t>(a)], pos) < edge_key(g.edges()[static_cast<std::size_t>(b)], pos);
  });
  std::vector<int> new_index(g.edges().size());
  for (int old : edge_order) {
    RgEdge e = g.edges()[static_cast<std::size_t>(old)];
    e.src = pos[static_cast<std::size_t>(e.src)];
    e.dst = pos[static_cast<std::size_t>(e.dst)];
    new_index[static_cast<std::size_t>(old)] = out.add_edge(e);
  }
  std::vector<std::pair<int, int>> pairs;
  for (const auto& [a, b] : g.until_pairs()) pairs.emplace_back(new_index[static_cast<std::size_t>(a)], new_index[static_cast<std::size_t>(b)]);
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [a, b] : pairs) out.add_until_pair(a, b);
  return out;
}

}  // namespace specscen::rg
