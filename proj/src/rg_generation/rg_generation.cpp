#include "specscen/rg_generation.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "specscen/relations.hpp"

namespace specscen::rg {

using spec::Formula;
using spec::Op;
using spec::SetExpr;
using spec::SetExprPtr;

NodeBudget::NodeBudget(std::initializer_list<std::pair<const std::string, int>> init) {
  for (const auto& [t, c] : init) set(t, c);
}

void NodeBudget::set(const std::string& type, int max_count) {
  if (max_count < 1) throw std::invalid_argument("node budget for " + type + " must be >= 1");
  caps_[type] = max_count;
}

int NodeBudget::at(const std::string& type) const {
  auto it = caps_.find(type);
  return it == caps_.end() ? 1 : it->second;
}

namespace {

void collect_images(const SetExprPtr& s, bool under_image, std::vector<const SetExpr*>& images,
                    std::vector<std::string>& filters) {
  switch (s->kind) {
    case SetExpr::Kind::Base:
      if (!under_image) filters.push_back(s->name);
      return;
    case SetExpr::Kind::Image:
      images.push_back(s.get());
      collect_images(s->lhs, true, images, filters);
      return;
    case SetExpr::Kind::Binary:
      collect_images(s->lhs, under_image, images, filters);
      collect_images(s->rhs, under_image, images, filters);
      return;
  }
}

}  // namespace

ApDecomposition decompose_ap(const std::string& ap_name, const spec::RfolExpr& body, Tag tag, bool positive) {
  ApDecomposition d;
  d.ap = ap_name;
  d.body = body;
  d.tag = tag;
  d.positive = positive;

  std::vector<const SetExpr*> images;
  std::vector<std::string> filters;
  collect_images(body.set, false, images, filters);
  auto fail = [&](const std::string& why) { throw UnsupportedBody("AP '" + ap_name + "': " + why); };

  std::vector<std::string> typed_filters;
  bool ego_filter = false;
  for (const auto& f : filters) {
    if (f == world::kEgoType) ego_filter = true;
    else if (std::find(typed_filters.begin(), typed_filters.end(), f) == typed_filters.end()) typed_filters.push_back(f);
  }
  if (typed_filters.size() > 1) fail("set mixes several entity types");

  if (images.empty()) {
    if (typed_filters.empty()) fail("body has neither a relation nor an entity type");
    d.tau = typed_filters[0];
    return d;
  }

  std::set<std::string> taus;
  for (const SetExpr* img : images) {
    if (img->lhs->kind != SetExpr::Kind::Base) fail("chained relational images are not supported");
    const std::string& src = img->lhs->name;
    const auto info = world::find_relation(img->name);
    if (!info) fail("unknown relation '" + img->name + "'");
    ApTuple t;
    t.relation = img->name;
    std::string tau;
    if (info->kind == world::RelationKind::Attribute) {
      t.shape = ApTuple::Shape::SelfLoop;
      tau = src;
    } else if (src == world::kEgoType) {
      t.shape = ApTuple::Shape::FromEgo;
      if (info->kind == world::RelationKind::ToLane) tau = world::kLaneType;
      else if (info->kind == world::RelationKind::ToIntersection) tau = world::kIntersectionType;
      else tau = typed_filters.empty() ? "Car" : typed_filters[0];
    } else if (info->kind == world::RelationKind::Pair && ego_filter) {
      t.shape = ApTuple::Shape::ToEgo;
      tau = src;
    } else {
      fail("relation '" + img->name + "' applied to '" + src + "' needs an ego endpoint");
    }
    taus.insert(tau);
    d.tuples.push_back(t);
  }
  if (taus.size() != 1) fail("tuples disagree on the element type");
  d.tau = *taus.begin();
  return d;
}

namespace {

std::vector<int> eval_set(const RelationalGraph& g, const SetExpr& s, Tag tag) {
  std::vector<int> out;
  switch (s.kind) {
    case SetExpr::Kind::Base:
      out = g.nodes_of(s.name);
      break;
    case SetExpr::Kind::Image: {
      const auto src = eval_set(g, *s.lhs, tag);
      for (const auto& e : g.edges())
        if (e.positive && e.tag == tag && e.relation == s.name && std::binary_search(src.begin(), src.end(), e.src))
          out.push_back(e.dst);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      break;
    }
    case SetExpr::Kind::Binary: {
      const auto a = eval_set(g, *s.lhs, tag);
      const auto b = eval_set(g, *s.rhs, tag);
      switch (s.op) {
        case spec::SetOp::Union: std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out)); break;
        case spec::SetOp::Intersection: std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out)); break;
        case spec::SetOp::Difference: std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out)); break;
        case spec::SetOp::SymmetricDifference:
          std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
          break;
      }
      break;
    }
  }
  return out;
}

RgEdge tuple_edge(const ApTuple& t, int ego, int v, Tag tag, bool positive) {
  switch (t.shape) {
    case ApTuple::Shape::FromEgo: return {ego, v, t.relation, tag, positive};
    case ApTuple::Shape::ToEgo: return {v, ego, t.relation, tag, positive};
    case ApTuple::Shape::SelfLoop: return {v, v, t.relation, tag, positive};
  }
  return {};
}

struct Candidate {
  RelationalGraph graph;
  std::vector<int> added_edges;
};

std::vector<Candidate> candidates(const RelationalGraph& g, const ApDecomposition& ap, const NodeBudget& budget) {
  std::vector<Candidate> out;
  const bool tau_is_ego = ap.tau == world::kEgoType;

  if (!ap.positive) {
    Candidate c{g, {}};
    for (const auto& t : ap.tuples)
      for (int v : g.nodes_of(ap.tau)) c.added_edges.push_back(c.graph.add_edge(tuple_edge(t, g.ego(), v, ap.tag, false)));
    out.push_back(std::move(c));
    return out;
  }

  if (ap.tuples.empty()) {
    RelationalGraph h = g;
    while (!holds_in(h, ap.body, ap.tag)) {
      if (tau_is_ego || static_cast<int>(h.count(ap.tau)) >= budget.at(ap.tau)) return out;
      h.add_node(ap.tau);
    }
    out.push_back({std::move(h), {}});
    return out;
  }

  RelationalGraph base = g;
  const int first_new = static_cast<int>(base.nodes().size());
  if (!tau_is_ego) {
    const int n = budget.at(ap.tau) - static_cast<int>(base.count(ap.tau));
    for (int i = 0; i < n; ++i) base.add_node(ap.tau);
  }
  const std::vector<int> D = base.nodes_of(ap.tau);
  if (D.size() > 16) throw std::runtime_error("node budget too large for exhaustive candidate enumeration");
  const std::uint64_t subsets = std::uint64_t{1} << D.size();
  const std::size_t m = ap.tuples.size();

  // Odometer over (S_1, ..., S_m) in P(D)^m; S_1 varies slowest.
  std::vector<std::uint64_t> pick(m, 0);
  while (true) {
    Candidate c{base, {}};
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < D.size(); ++k)
        if ((pick[j] >> k) & 1u) c.added_edges.push_back(c.graph.add_edge(tuple_edge(ap.tuples[j], base.ego(), D[k], ap.tag, true)));
    c.graph.drop_isolated_from(first_new);
    if (holds_in(c.graph, ap.body, ap.tag)) out.push_back(std::move(c));

    std::size_t j = m;
    while (j > 0) {
      --j;
      if (++pick[j] < subsets) break;
      pick[j] = 0;
      if (j == 0) return out;
    }
  }
}

struct Literal {
  std::string ap;
  Tag tag;
  bool positive;
  int until_group;
};

using Branch = std::vector<Literal>;

std::vector<Branch> branches(const Formula& f, Tag tag, int group, int& next_group) {
  switch (f.op()) {
    case Op::True: return {Branch{}};
    case Op::False: return {};
    case Op::Ap: return {Branch{{f.name(), tag, true, group}}};
    case Op::Not:
      if (f.child(0).op() != Op::Ap) throw std::invalid_argument("relational graph generation needs a normalized formula");
      return {Branch{{f.child(0).name(), tag, false, group}}};
    case Op::And: {
      auto left = branches(f.child(0), tag, group, next_group);
      auto right = branches(f.child(1), tag, group, next_group);
      std::vector<Branch> out;
      for (const auto& l : left)
        for (const auto& r : right) {
          Branch b = l;
          b.insert(b.end(), r.begin(), r.end());
          out.push_back(std::move(b));
        }
      return out;
    }
    case Op::Or: {
      auto out = branches(f.child(0), tag, group, next_group);
      auto right = branches(f.child(1), tag, group, next_group);
      out.insert(out.end(), right.begin(), right.end());
      return out;
    }
    case Op::Next:
    case Op::WeakNext:
      return branches(f.child(0), tag == Tag::F ? Tag::F : Tag::X, -1, next_group);
    case Op::Finally:
      return branches(f.child(0), Tag::F, -1, next_group);
    case Op::Globally:
      return branches(f.child(0), tag, group, next_group);
    case Op::Until:
    case Op::Release: {
      const int g = next_group++;
      const bool until = f.op() == Op::Until;
      auto left = branches(f.child(0), until ? Tag::Ul : Tag::Ur, g, next_group);
      auto right = branches(f.child(1), until ? Tag::Ur : Tag::Ul, g, next_group);
      std::vector<Branch> out;
      for (const auto& l : left)
        for (const auto& r : right) {
          Branch b = l;
          b.insert(b.end(), r.begin(), r.end());
          out.push_back(std::move(b));
        }
      return out;
    }
    case Op::Implies:
      throw std::invalid_argument("relational graph generation needs a normalized formula");
  }
  return {};
}

}  // namespace

bool holds_in(const RelationalGraph& g, const spec::RfolExpr& body, Tag tag) {
  return spec::compare(eval_set(g, *body.set, tag).size(), body.cmp, body.bound);
}

std::vector<RelationalGraph> generate_candidates(const RelationalGraph& g, const ApDecomposition& ap,
                                                 const NodeBudget& budget) {
  std::vector<RelationalGraph> out;
  for (auto& c : candidates(g, ap, budget)) out.push_back(std::move(c.graph));
  return out;
}

bool check_consistency(const RelationalGraph& g) {
  const auto& E = g.edges();
  for (std::size_t i = 0; i < E.size(); ++i) {
    for (std::size_t j = i + 1; j < E.size(); ++j) {
      const RgEdge& a = E[i];
      const RgEdge& b = E[j];
      if (a.tag != b.tag) continue;
      if (a.positive != b.positive) {
        if (a.src == b.src && a.dst == b.dst && a.relation == b.relation) return false;
        continue;
      }
      if (!a.positive) continue;
      if (a.src == b.src && a.dst == b.dst && world::mutually_exclusive(a.relation, b.relation, false)) return false;
      if (a.src == b.dst && a.dst == b.src && a.src != a.dst && world::mutually_exclusive(a.relation, b.relation, true))
        return false;
    }
  }
  return true;
}

std::vector<RelationalGraph> dedupe_isomorphic(const std::vector<RelationalGraph>& graphs) {
  std::vector<RelationalGraph> out;
  std::set<std::string> seen;
  for (const auto& g : graphs)
    if (seen.insert(canonical_form(g)).second) out.push_back(canonicalize(g));
  return out;
}

std::vector<std::vector<ApDecomposition>> decompose_formula(const Formula& f, const spec::ApTable& aps) {
  int next_group = 0;
  std::vector<std::vector<ApDecomposition>> out;
  for (const auto& b : branches(f, Tag::I, -1, next_group)) {
    std::vector<ApDecomposition> pos, neg;
    for (const auto& lit : b) {
      if (!aps.contains(lit.ap)) throw std::invalid_argument("unknown AP '" + lit.ap + "'");
      auto d = decompose_ap(lit.ap, aps.at(lit.ap).body, lit.tag, lit.positive);
      d.until_group = lit.until_group;
      (lit.positive ? pos : neg).push_back(std::move(d));
    }
    // Negative literals constrain existing nodes, so they go last.
    pos.insert(pos.end(), neg.begin(), neg.end());
    out.push_back(std::move(pos));
  }
  return out;
}

namespace {

struct Partial {
  RelationalGraph graph;
  std::map<int, std::pair<std::vector<int>, std::vector<int>>> until_edges;
};

void attach_until_pairs(Partial& p) {
  for (auto& [group, sides] : p.until_edges) {
    auto& [ls, rs] = sides;
    for (auto* v : {&ls, &rs}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    if (ls.empty() || rs.empty()) continue;
    // Unequal sides: the shorter side's last edge is reused.
    const std::size_t k = std::max(ls.size(), rs.size());
    for (std::size_t i = 0; i < k; ++i)
      p.graph.add_until_pair(ls[std::min(i, ls.size() - 1)], rs[std::min(i, rs.size() - 1)]);
  }
}

}  // namespace

RgResult generate_rgs(const std::vector<Formula>& cases, const spec::ApTable& aps, const NodeBudget& budget) {
  RgResult result;
  std::map<std::string, std::size_t> index;  // canonical form -> position in result
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    std::size_t produced = 0;
    for (const auto& branch : decompose_formula(cases[ci], aps)) {
      std::vector<Partial> frontier{Partial{}};
      for (const auto& ap : branch) {
        std::vector<Partial> next;
        for (const auto& p : frontier) {
          for (auto& c : candidates(p.graph, ap, budget)) {
            if (!check_consistency(c.graph)) continue;
            Partial q{std::move(c.graph), p.until_edges};
            if (ap.until_group >= 0 && (ap.tag == Tag::Ul || ap.tag == Tag::Ur)) {
              auto& side = ap.tag == Tag::Ul ? q.until_edges[ap.until_group].first : q.until_edges[ap.until_group].second;
              side.insert(side.end(), c.added_edges.begin(), c.added_edges.end());
            }
            next.push_back(std::move(q));
          }
        }
        frontier = std::move(next);
        if (frontier.empty()) break;
      }
      for (auto& p : frontier) {
        attach_until_pairs(p);
        ++produced;
        std::string form = canonical_form(p.graph);
        auto it = index.find(form);
        if (it == index.end()) {
          index.emplace(std::move(form), result.graphs.size());
          result.graphs.push_back({canonicalize(p.graph), {ci}});
        } else {
          auto& src = result.graphs[it->second].sources;
          if (src.back() != ci) src.push_back(ci);
        }
      }
    }
    if (produced == 0)
      result.diagnostics.push_back("case " + std::to_string(ci) + " (" + spec::to_string(cases[ci]) +
                                   "): the LTLf formula is not satisfiable within the given node budget");
  }
  if (result.graphs.empty() && !cases.empty())
    result.diagnostics.push_back("no relational graph: the LTLf formula is not satisfiable within the given node budget");
  return result;
}

RgResult generate_rgs(const spec::Spec& spec, const NodeBudget& budget) {
  const Formula pre = spec::normalize(spec.precondition);
  if (spec::contains_op(pre, Op::Globally))
    throw std::invalid_argument("relational graph generation expects a G-free precondition");
  return generate_rgs(spec::split_disjunctions(pre), spec.aps, budget);
}

}  // namespace specscen::rg
