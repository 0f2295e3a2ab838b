#include <algorithm>
#include <iterator>

#include "specscen/evaluation.hpp"
#include "specscen/relations.hpp"

namespace specscen::eval {

using spec::Op;
using spec::SetExpr;
using spec::SetOp;

VertexSet eval_set(const SetExpr& s, const world::SceneGraph& sg) {
  VertexSet out;
  switch (s.kind) {
    case SetExpr::Kind::Base: {
      if (!world::is_known_type(s.name)) throw UnknownName("unknown type: " + s.name);
      for (std::size_t i = 0; i < sg.vertex_count(); ++i)
        if (sg.vertex(i).type == s.name) out.push_back(static_cast<int>(i));
      return out;
    }
    case SetExpr::Kind::Image: {
      const int rel = world::relation_index(s.name);
      if (rel < 0) throw UnknownName("unknown relation: " + s.name);
      for (int v : eval_set(*s.lhs, sg))
        for (const auto& e : sg.out_edges(v))
          if (e.relation == rel) out.push_back(e.dst);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    case SetExpr::Kind::Binary: {
      const VertexSet a = eval_set(*s.lhs, sg);
      const VertexSet b = eval_set(*s.rhs, sg);
      auto it = std::back_inserter(out);
      switch (s.op) {
        case SetOp::Union: std::set_union(a.begin(), a.end(), b.begin(), b.end(), it); break;
        case SetOp::Intersection: std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), it); break;
        case SetOp::Difference: std::set_difference(a.begin(), a.end(), b.begin(), b.end(), it); break;
        case SetOp::SymmetricDifference:
          std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), it);
          break;
      }
      return out;
    }
  }
  return out;
}

bool eval_rfol(const spec::RfolExpr& e, const world::SceneGraph& sg) {
  return spec::compare(eval_set(*e.set, sg).size(), e.cmp, e.bound);
}

ApTrace ap_trace(const sim::Trace& trace, const spec::ApTable& aps) {
  ApTrace v;
  for (const auto& def : aps.defs()) {
    auto& row = v[def.name];
    row.reserve(trace.frames.size());
    for (const auto& f : trace.frames) row.push_back(eval_rfol(def.body, f.graph) ? 1 : 0);
  }
  return v;
}

std::vector<char> satisfaction(const spec::Formula& f, const ApTrace& v, std::size_t n) {
  std::vector<char> out(n, 0);
  switch (f.op()) {
    case Op::True:
      std::fill(out.begin(), out.end(), 1);
      return out;
    case Op::False:
      return out;
    case Op::Ap: {
      auto it = v.find(f.name());
      if (it == v.end()) throw UnknownName("no values for AP: " + f.name());
      if (it->second.size() < n) throw std::invalid_argument("AP value row shorter than trace: " + f.name());
      std::copy_n(it->second.begin(), n, out.begin());
      return out;
    }
    default:
      break;
  }
  const auto a = satisfaction(f.child(0), v, n);
  switch (f.op()) {
    case Op::Not:
      for (std::size_t i = 0; i < n; ++i) out[i] = !a[i];
      return out;
    case Op::Next:
      for (std::size_t i = 0; i + 1 < n; ++i) out[i] = a[i + 1];
      return out;
    case Op::WeakNext:
      for (std::size_t i = 0; i < n; ++i) out[i] = i + 1 >= n || a[i + 1];
      return out;
    case Op::Finally: {
      char acc = 0;
      for (std::size_t i = n; i-- > 0;) out[i] = acc = (acc || a[i]);
      return out;
    }
    case Op::Globally: {
      char acc = 1;
      for (std::size_t i = n; i-- > 0;) out[i] = acc = (acc && a[i]);
      return out;
    }
    default:
      break;
  }
  const auto b = satisfaction(f.child(1), v, n);
  switch (f.op()) {
    case Op::And:
      for (std::size_t i = 0; i < n; ++i) out[i] = a[i] && b[i];
      return out;
    case Op::Or:
      for (std::size_t i = 0; i < n; ++i) out[i] = a[i] || b[i];
      return out;
    case Op::Implies:
      for (std::size_t i = 0; i < n; ++i) out[i] = !a[i] || b[i];
      return out;
    case Op::Until: {
      char acc = 0;
      for (std::size_t i = n; i-- > 0;) out[i] = acc = (b[i] || (a[i] && acc));
      return out;
    }
    case Op::Release: {
      char acc = 1;
      for (std::size_t i = n; i-- > 0;) out[i] = acc = (b[i] && (a[i] || acc));
      return out;
    }
    default:
      throw std::logic_error("satisfaction: unexpected operator");
  }
}

bool eval_ltlf(const spec::Formula& f, const ApTrace& v, std::size_t n, std::size_t start) {
  if (start >= n) throw std::out_of_range("eval_ltlf: start index outside the trace");
  return satisfaction(f, v, n)[start];
}

bool eval_ltlf(const spec::Formula& f, const sim::Trace& trace, std::size_t start, const spec::ApTable& aps) {
  return eval_ltlf(f, ap_trace(trace, aps), trace.frames.size(), start);
}

std::optional<std::size_t> first_satisfied(const spec::Formula& f, const ApTrace& v, std::size_t n) {
  const auto s = satisfaction(f, v, n);
  auto it = std::find(s.begin(), s.end(), 1);
  if (it == s.end()) return std::nullopt;
  return static_cast<std::size_t>(it - s.begin());
}

}  // namespace specscen::eval
