#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace specscen::spec {

// LTLf operators. WeakNext and Release never appear in source text written by
// users; they are introduced by negation normal form (duals of Next and Until).
enum class Op {
  True,
  False,
  Ap,
  Not,
  And,
  Or,
  Implies,
  Next,
  WeakNext,
  Finally,
  Globally,
  Until,
  Release,
};

/// Immutable LTLf formula tree with value semantics (shared nodes).
class Formula {
 public:
  Formula();  // `true`

  static Formula constant(bool value);
  static Formula ap(std::string name);
  static Formula negation(Formula f);
  static Formula conjunction(Formula a, Formula b);
  static Formula disjunction(Formula a, Formula b);
  static Formula implication(Formula a, Formula b);
  static Formula next(Formula f);
  static Formula weak_next(Formula f);
  static Formula finally(Formula f);
  static Formula globally(Formula f);
  static Formula until(Formula a, Formula b);
  static Formula release(Formula a, Formula b);
  static Formula make(Op op, std::vector<Formula> kids);

  /// Left-nested conjunction of `parts`; `true` when empty.
  static Formula conjunction_of(const std::vector<Formula>& parts);

  Op op() const { return node_->op; }
  const std::string& name() const { return node_->name; }
  std::size_t arity() const { return node_->kids.size(); }
  const Formula& child(std::size_t i) const { return node_->kids[i]; }
  const std::vector<Formula>& children() const { return node_->kids; }

  bool is_literal() const;
  /// AP name of a literal (AP or negated AP).
  const std::string& literal_name() const;
  bool is_negative_literal() const { return op() == Op::Not && child(0).op() == Op::Ap; }

  std::size_t size() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

 private:
  struct Node {
    Op op = Op::True;
    std::string name;
    std::vector<Formula> kids;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

std::string to_string(const Formula& f);

/// Names of all APs, in first-occurrence (depth-first, left-to-right) order.
std::vector<std::string> ap_names(const Formula& f);

bool contains_op(const Formula& f, Op op);

/// Eliminates implications and pushes negations to AP leaves.
Formula normalize(const Formula& f);

bool is_normalized(const Formula& f);

/// Splits disjunctions reachable from the root through conjunction and strong
/// next into mutually exclusive conjunction-only cases.
std::vector<Formula> split_disjunctions(const Formula& f);

/// Outermost implication only.
std::pair<Formula, std::optional<Formula>> decompose_pre_post(const Formula& f);

/// Flattens a chain of binary `op` nodes into its operands.
std::vector<Formula> flatten(const Formula& f, Op op);

}  // namespace specscen::spec
