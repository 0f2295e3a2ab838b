#include "specscen/formula.hpp"

#include <algorithm>
#include <stdexcept>

namespace specscen::spec {

Formula::Formula() : Formula(constant(true)) {}

Formula Formula::make(Op op, std::vector<Formula> kids) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->kids = std::move(kids);
  return Formula(std::move(n));
}

Formula Formula::constant(bool value) {
  auto n = std::make_shared<Node>();
  n->op = value ? Op::True : Op::False;
  return Formula(std::move(n));
}

Formula Formula::ap(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Ap;
  n->name = std::move(name);
  return Formula(std::move(n));
}

Formula Formula::negation(Formula f) { return make(Op::Not, {std::move(f)}); }
Formula Formula::conjunction(Formula a, Formula b) { return make(Op::And, {std::move(a), std::move(b)}); }
Formula Formula::disjunction(Formula a, Formula b) { return make(Op::Or, {std::move(a), std::move(b)}); }
Formula Formula::implication(Formula a, Formula b) { return make(Op::Implies, {std::move(a), std::move(b)}); }
Formula Formula::next(Formula f) { return make(Op::Next, {std::move(f)}); }
Formula Formula::weak_next(Formula f) { return make(Op::WeakNext, {std::move(f)}); }
Formula Formula::finally(Formula f) { return make(Op::Finally, {std::move(f)}); }
Formula Formula::globally(Formula f) { return make(Op::Globally, {std::move(f)}); }
Formula Formula::until(Formula a, Formula b) { return make(Op::Until, {std::move(a), std::move(b)}); }
Formula Formula::release(Formula a, Formula b) { return make(Op::Release, {std::move(a), std::move(b)}); }

Formula Formula::conjunction_of(const std::vector<Formula>& parts) {
  if (parts.empty()) return constant(true);
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = conjunction(acc, parts[i]);
  return acc;
}

bool Formula::is_literal() const {
  return op() == Op::Ap || is_negative_literal();
}

const std::string& Formula::literal_name() const {
  if (op() == Op::Ap) return name();
  if (is_negative_literal()) return child(0).name();
  throw std::logic_error("literal_name on non-literal formula");
}

std::size_t Formula::size() const {
  std::size_t n = 1;
  for (const auto& k : children()) n += k.size();
  return n;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op() || a.name() != b.name() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!(a.child(i) == b.child(i))) return false;
  return true;
}

namespace {

int precedence(Op op) {
  switch (op) {
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Until:
    case Op::Release: return 4;
    case Op::Not:
    case Op::Next:
    case Op::WeakNext:
    case Op::Finally:
    case Op::Globally: return 5;
    default: return 6;
  }
}

std::string wrap(const Formula& f, bool parens) {
  std::string s = to_string(f);
  return parens ? "(" + s + ")" : s;
}

}  // namespace

std::string to_string(const Formula& f) {
  const int p = precedence(f.op());
  switch (f.op()) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Ap: return f.name();
    case Op::Not: return "!" + wrap(f.child(0), precedence(f.child(0).op()) < p);
    case Op::Next: return "X " + wrap(f.child(0), precedence(f.child(0).op()) < p);
    case Op::WeakNext: return "N " + wrap(f.child(0), precedence(f.child(0).op()) < p);
    case Op::Finally: return "F " + wrap(f.child(0), precedence(f.child(0).op()) < p);
    case Op::Globally: return "G " + wrap(f.child(0), precedence(f.child(0).op()) < p);
    case Op::And:
    case Op::Or: {
      const char* sym = f.op() == Op::And ? " && " : " || ";
      return wrap(f.child(0), precedence(f.child(0).op()) < p) + sym +
             wrap(f.child(1), precedence(f.child(1).op()) <= p);
    }
    case Op::Implies:
    case Op::Until:
    case Op::Release: {
      const char* sym = f.op() == Op::Implies ? " -> " : (f.op() == Op::Until ? " U " : " R ");
      return wrap(f.child(0), precedence(f.child(0).op()) <= p) + sym +
             wrap(f.child(1), precedence(f.child(1).op()) < p);
    }
  }
  return "?";
}

namespace {

void collect_aps(const Formula& f, std::vector<std::string>& out) {
  if (f.op() == Op::Ap) {
    if (std::find(out.begin(), out.end(), f.name()) == out.end()) out.push_back(f.name());
    return;
  }
  for (const auto& k : f.children()) collect_aps(k, out);
}

Formula nnf(const Formula& f, bool neg) {
  switch (f.op()) {
    case Op::True: return Formula::constant(!neg);
    case Op::False: return Formula::constant(neg);
    case Op::Ap: return neg ? Formula::negation(f) : f;
    case Op::Not: return nnf(f.child(0), !neg);
    case Op::And:
      return neg ? Formula::disjunction(nnf(f.child(0), true), nnf(f.child(1), true))
                 : Formula::conjunction(nnf(f.child(0), false), nnf(f.child(1), false));
    case Op::Or:
      return neg ? Formula::conjunction(nnf(f.child(0), true), nnf(f.child(1), true))
                 : Formula::disjunction(nnf(f.child(0), false), nnf(f.child(1), false));
    case Op::Implies:
      return neg ? Formula::conjunction(nnf(f.child(0), false), nnf(f.child(1), true))
                 : Formula::disjunction(nnf(f.child(0), true), nnf(f.child(1), false));
    case Op::Next:
      return neg ? Formula::weak_next(nnf(f.child(0), true)) : Formula::next(nnf(f.child(0), false));
    case Op::WeakNext:
      return neg ? Formula::next(nnf(f.child(0), true)) : Formula::weak_next(nnf(f.child(0), false));
    case Op::Finally:
      return neg ? Formula::globally(nnf(f.child(0), true)) : Formula::finally(nnf(f.child(0), false));
    case Op::Globally:
      return neg ? Formula::finally(nnf(f.child(0), true)) : Formula::globally(nnf(f.child(0), false));
    case Op::Until:
      return neg ? Formula::release(nnf(f.child(0), true), nnf(f.child(1), true))
                 : Formula::until(nnf(f.child(0), false), nnf(f.child(1), false));
    case Op::Release:
      return neg ? Formula::until(nnf(f.child(0), true), nnf(f.child(1), true))
                 : Formula::release(nnf(f.child(0), false), nnf(f.child(1), false));
  }
  throw std::logic_error("nnf: unknown operator");
}

// Path (child indices) to the first disjunction reachable from the root
// through And and strong Next, in depth-first left-to-right order.
bool find_splittable(const Formula& f, std::vector<std::size_t>& path) {
  switch (f.op()) {
    case Op::Or:
      return true;
    case Op::And:
      for (std::size_t i = 0; i < 2; ++i) {
        path.push_back(i);
        if (find_splittable(f.child(i), path)) return true;
        path.pop_back();
      }
      return false;
    case Op::Next:
      path.push_back(0);
      if (find_splittable(f.child(0), path)) return true;
      path.pop_back();
      return false;
    default:
      return false;
  }
}

const Formula& at_path(const Formula& f, const std::vector<std::size_t>& path, std::size_t depth = 0) {
  if (depth == path.size()) return f;
  return at_path(f.child(path[depth]), path, depth + 1);
}

Formula replace_at(const Formula& f, const std::vector<std::size_t>& path, const Formula& with,
                   std::size_t depth = 0) {
  if (depth == path.size()) return with;
  std::vector<Formula> kids = f.children();
  kids[path[depth]] = replace_at(kids[path[depth]], path, with, depth + 1);
  return Formula::make(f.op(), std::move(kids));
}

void split_into(const Formula& f, std::vector<Formula>& out) {
  std::vector<std::size_t> path;
  if (!find_splittable(f, path)) {
    out.push_back(f);
    return;
  }
  const Formula& disj = at_path(f, path);
  const Formula& a = disj.child(0);
  const Formula& b = disj.child(1);
  const Formula not_a = normalize(Formula::negation(a));
  const Formula not_b = normalize(Formula::negation(b));
  split_into(replace_at(f, path, Formula::conjunction(a, not_b)), out);
  split_into(replace_at(f, path, Formula::conjunction(not_a, b)), out);
  split_into(replace_at(f, path, Formula::conjunction(a, b)), out);
}

void flatten_into(const Formula& f, Op op, std::vector<Formula>& out) {
  if (f.op() == op) {
    for (const auto& k : f.children()) flatten_into(k, op, out);
  } else {
    out.push_back(f);
  }
}

}  // namespace

std::vector<std::string> ap_names(const Formula& f) {
  std::vector<std::string> out;
  collect_aps(f, out);
  return out;
}

bool contains_op(const Formula& f, Op op) {
  if (f.op() == op) return true;
  return std::any_of(f.children().begin(), f.children().end(),
                     [op](const Formula& k) { return contains_op(k, op); });
}

Formula normalize(const Formula& f) { return nnf(f, false); }

bool is_normalized(const Formula& f) {
  if (f.op() == Op::Implies) return false;
  if (f.op() == Op::Not) return f.child(0).op() == Op::Ap;
  return std::all_of(f.children().begin(), f.children().end(),
                     [](const Formula& k) { return is_normalized(k); });
}

std::vector<Formula> split_disjunctions(const Formula& f) {
  std::vector<Formula> out;
  split_into(f, out);
  return out;
}

std::pair<Formula, std::optional<Formula>> decompose_pre_post(const Formula& f) {
  if (f.op() == Op::Implies) return {f.child(0), f.child(1)};
  return {f, std::nullopt};
}

std::vector<Formula> flatten(const Formula& f, Op op) {
  std::vector<Formula> out;
  flatten_into(f, op, out);
  return out;
}

}  // namespace specscen::spec
