#include "specscen/configurations.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace specscen::spec {

std::string to_string(FragmentKind k) {
  switch (k) {
    case FragmentKind::LtlOr: return "ltl-or";
    case FragmentKind::RfolUnion: return "rfol-union";
    case FragmentKind::NegatedConjunction: return "negated-conjunction";
  }
  return "?";
}

namespace {

constexpr std::size_t kMaxOperands = 16;

std::vector<std::uint32_t> nonempty_subsets(std::size_t n) {
  if (n > kMaxOperands) throw std::runtime_error("disjunction with too many operands");
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 1; m < (1u << n); ++m) out.push_back(m);
  return out;
}

// Path to a union chain inside a set expression; 0 = lhs, 1 = rhs.
using SetPath = std::vector<int>;

// Union chains in positions where the enclosing expression distributes over
// union (image source, either side of intersection, left of difference).
void union_sites(const SetExprPtr& s, SetPath& path, std::vector<SetPath>& out) {
  if (s->kind == SetExpr::Kind::Binary && s->op == SetOp::Union) {
    out.push_back(path);
    return;
  }
  if (s->kind == SetExpr::Kind::Image) {
    path.push_back(0);
    union_sites(s->lhs, path, out);
    path.pop_back();
  } else if (s->kind == SetExpr::Kind::Binary) {
    if (s->op == SetOp::Intersection || s->op == SetOp::Difference) {
      path.push_back(0);
      union_sites(s->lhs, path, out);
      path.pop_back();
    }
    if (s->op == SetOp::Intersection) {
      path.push_back(1);
      union_sites(s->rhs, path, out);
      path.pop_back();
    }
  }
}

std::vector<SetPath> union_sites(const RfolExpr& body) {
  std::vector<SetPath> out;
  if (!is_existential(body)) return out;
  SetPath path;
  union_sites(body.set, path, out);
  return out;
}

const SetExprPtr& set_at(const SetExprPtr& s, const SetPath& p, std::size_t d = 0) {
  if (d == p.size()) return s;
  return set_at(p[d] == 0 ? s->lhs : s->rhs, p, d + 1);
}

SetExprPtr set_replace(const SetExprPtr& s, const SetPath& p, const SetExprPtr& with, std::size_t d = 0) {
  if (d == p.size()) return with;
  auto copy = std::make_shared<SetExpr>(*s);
  if (p[d] == 0) copy->lhs = set_replace(s->lhs, p, with, d + 1);
  else copy->rhs = set_replace(s->rhs, p, with, d + 1);
  return copy;
}

bool is_negated_conjunction(const std::vector<Formula>& chain) {
  return chain.size() >= 2 &&
         std::all_of(chain.begin(), chain.end(), [](const Formula& f) { return f.is_negative_literal(); });
}

void collect(const Formula& f, const ApTable& aps, std::vector<Fragment>& out) {
  switch (f.op()) {
    case Op::Or: {
      auto chain = flatten(f, Op::Or);
      Fragment frag;
      frag.kind = is_negated_conjunction(chain) ? FragmentKind::NegatedConjunction : FragmentKind::LtlOr;
      for (const auto& c : chain) frag.operands.push_back(to_string(c));
      frag.alternatives = nonempty_subsets(chain.size());
      out.push_back(std::move(frag));
      for (const auto& c : chain) collect(c, aps, out);
      return;
    }
    case Op::Ap: {
      if (!aps.contains(f.name())) return;
      const RfolExpr& body = aps.at(f.name()).body;
      for (const auto& site : union_sites(body)) {
        auto ops = union_operands(set_at(body.set, site));
        Fragment frag;
        frag.kind = FragmentKind::RfolUnion;
        frag.ap = f.name();
        for (const auto& o : ops) frag.operands.push_back(to_string(*o));
        frag.alternatives = nonempty_subsets(ops.size());
        out.push_back(std::move(frag));
      }
      return;
    }
    case Op::Not:
      return;  // negative literal in normal form
    default:
      for (const auto& k : f.children()) collect(k, aps, out);
  }
}

struct Rebuilder {
  const std::vector<Fragment>& fragments;
  const std::vector<std::size_t>& choices;
  ApTable& aps;
  std::size_t next = 0;

  std::uint32_t take_mask() {
    const std::size_t k = next++;
    return fragments[k].alternatives[choices[k]];
  }

  Formula build(const Formula& f) {
    switch (f.op()) {
      case Op::Or: {
        auto chain = flatten(f, Op::Or);
        const std::uint32_t mask = take_mask();
        std::vector<Formula> rebuilt;
        for (const auto& c : chain) rebuilt.push_back(build(c));
        std::vector<Formula> parts;
        for (std::size_t i = 0; i < chain.size(); ++i)
          parts.push_back((mask >> i) & 1u ? rebuilt[i] : normalize(Formula::negation(chain[i])));
        return Formula::conjunction_of(parts);
      }
      case Op::Ap: {
        if (!aps.contains(f.name())) return f;
        const ApDef def = aps.at(f.name());
        auto sites = union_sites(def.body);
        if (sites.empty()) return f;
        return expand_union(def, sites);
      }
      case Op::Not:
        return f;
      default: {
        std::vector<Formula> kids;
        for (const auto& k : f.children()) kids.push_back(build(k));
        return Formula::make(f.op(), std::move(kids));
      }
    }
  }

  // Each selected union operand becomes its own AP that must hold; unselected
  // operands become APs that must not hold. Remaining union sites of the same
  // body are applied to the selected (positive) derived APs in turn.
  Formula expand_union(const ApDef& def, const std::vector<SetPath>& sites) {
    std::vector<std::uint32_t> masks;
    for (std::size_t s = 0; s < sites.size(); ++s) masks.push_back(take_mask());
    return expand_site(def, sites, masks, 0);
  }

  Formula expand_site(const ApDef& def, const std::vector<SetPath>& sites,
                      const std::vector<std::uint32_t>& masks, std::size_t s) {
    if (s == sites.size()) return Formula::ap(def.name);
    auto ops = union_operands(set_at(def.body.set, sites[s]));
    std::vector<Formula> parts;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      ApDef derived{def.name + "#" + std::to_string(i),
                    RfolExpr{set_replace(def.body.set, sites[s], ops[i]), def.body.cmp, def.body.bound}};
      if (!aps.contains(derived.name)) aps.add(derived);
      if ((masks[s] >> i) & 1u) {
        // Later sites live in the unchanged part of the body, so their paths stay valid.
        parts.push_back(expand_site(derived, sites, masks, s + 1));
      } else {
        parts.push_back(Formula::negation(Formula::ap(derived.name)));
      }
    }
    return Formula::conjunction_of(parts);
  }
};

std::string choice_label(const std::vector<Fragment>& fragments, const std::vector<std::size_t>& choices) {
  std::string label = "{";
  for (std::size_t k = 0; k < fragments.size(); ++k) {
    if (k) label += ",";
    const std::uint32_t mask = fragments[k].alternatives[choices[k]];
    for (std::size_t i = 0; i < fragments[k].operands.size(); ++i) label += ((mask >> i) & 1u) ? '1' : '0';
  }
  return label + "}";
}

}  // namespace

ConfigurationSpace enumerate_configurations(const Formula& pre, const ApTable& aps) {
  if (!is_normalized(pre)) throw std::invalid_argument("enumerate_configurations: formula not normalized");
  ConfigurationSpace cs;
  cs.aps = aps;
  collect(pre, aps, cs.fragments);

  std::vector<std::size_t> choices(cs.fragments.size(), 0);
  std::size_t id = 0;
  while (true) {
    Rebuilder rb{cs.fragments, choices, cs.aps};
    Configuration c;
    c.id = id++;
    c.choices = choices;
    c.formula = rb.build(pre);
    c.label = choice_label(cs.fragments, choices);
    cs.configurations.push_back(std::move(c));

    // Odometer increment; the last fragment varies fastest.
    bool done = true;
    for (std::size_t k = cs.fragments.size(); k-- > 0;) {
      if (++choices[k] < cs.fragments[k].alternatives.size()) {
        done = false;
        break;
      }
      choices[k] = 0;
    }
    if (done) break;
  }
  cs.oneflips = enumerate_oneflips(pre);
  return cs;
}

namespace {

bool is_temporal_slice(const Formula& f) { return f.op() == Op::Next || f.op() == Op::Finally; }

bool purely_boolean(const Formula& f) {
  switch (f.op()) {
    case Op::Next:
    case Op::WeakNext:
    case Op::Finally:
    case Op::Globally:
    case Op::Until:
    case Op::Release:
      return false;
    default:
      return std::all_of(f.children().begin(), f.children().end(), purely_boolean);
  }
}

bool has_positive(const std::vector<Formula>& conjuncts, const std::string& ap) {
  return std::any_of(conjuncts.begin(), conjuncts.end(),
                     [&](const Formula& c) { return c.op() == Op::Ap && c.name() == ap; });
}

std::vector<std::string> negated_group(const Formula& f) {
  std::vector<std::string> names;
  if (f.op() != Op::Or) return names;
  auto chain = flatten(f, Op::Or);
  if (!is_negated_conjunction(chain)) return names;
  for (const auto& c : chain) names.push_back(c.literal_name());
  return names;
}

}  // namespace

std::vector<OneFlip> enumerate_oneflips(const Formula& pre) {
  std::vector<OneFlip> out;
  auto conjuncts = flatten(pre, Op::And);
  std::vector<Formula> earlier;
  std::vector<Formula> later;
  for (const auto& c : conjuncts) {
    if (purely_boolean(c)) earlier.push_back(c);
    else if (is_temporal_slice(c) && purely_boolean(c.child(0))) later.push_back(c);
  }
  if (earlier.empty() || later.empty()) return out;
  const Formula earlier_slice = Formula::conjunction_of(earlier);

  for (const auto& slice : later) {
    const FlipShift shift = slice.op() == Op::Next ? FlipShift::Next : FlipShift::Eventually;
    auto later_conj = flatten(slice.child(0), Op::And);
    auto emit = [&](const std::vector<std::string>& group) {
      for (const auto& ap : group) {
        OneFlip of;
        of.id = out.size();
        of.ap = ap;
        of.group = group;
        of.shift = shift;
        of.earlier = earlier_slice;
        of.later = slice.child(0);
        out.push_back(std::move(of));
      }
    };
    // Forward: !(A && B ..) earlier, A && B .. later.
    for (const auto& e : earlier) {
      auto group = negated_group(e);
      if (group.empty()) continue;
      if (std::all_of(group.begin(), group.end(), [&](const std::string& a) { return has_positive(later_conj, a); })) {
        emit(group);
        return out;
      }
    }
    // Reverse: A && B .. earlier, !(A && B ..) later.
    for (const auto& l : later_conj) {
      auto group = negated_group(l);
      if (group.empty()) continue;
      if (std::all_of(group.begin(), group.end(), [&](const std::string& a) { return has_positive(earlier, a); })) {
        emit(group);
        return out;
      }
    }
  }
  return out;
}

}  // namespace specscen::spec
