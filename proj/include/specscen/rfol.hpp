#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace specscen::spec {

enum class SetOp { Union, Intersection, Difference, SymmetricDifference };
enum class Comparator { Greater, GreaterEq, Equal, Less, LessEq };

struct SetExpr;
using SetExprPtr = std::shared_ptr<const SetExpr>;

// Set-valued RFOL term.
//   Base  : every vertex of a type, or the singleton `ego`
//   Image : source.relation
//   Binary: lhs <op> rhs
struct SetExpr {
  enum class Kind { Base, Image, Binary };

  Kind kind = Kind::Base;
  std::string name;  // type name for Base, relation name for Image
  SetOp op = SetOp::Union;
  SetExprPtr lhs;  // Image source, or Binary left operand
  SetExprPtr rhs;

  static SetExprPtr base(std::string type_name);
  static SetExprPtr image(SetExprPtr source, std::string relation);
  static SetExprPtr binary(SetOp op, SetExprPtr lhs, SetExprPtr rhs);
};

/// Boolean RFOL body of an atomic proposition: |set| <cmp> bound.
struct RfolExpr {
  SetExprPtr set;
  Comparator cmp = Comparator::Greater;
  std::uint32_t bound = 0;
};

bool compare(std::size_t cardinality, Comparator cmp, std::uint32_t bound);

/// True when the comparison is the existential form |S| > 0 or |S| >= 1.
bool is_existential(const RfolExpr& e);

std::string to_string(const SetExpr& s);
std::string to_string(const RfolExpr& e);
std::string to_string(Comparator c);
bool equal(const SetExpr& a, const SetExpr& b);

/// Operands of a maximal union chain rooted at `s` (s itself if not a union).
std::vector<SetExprPtr> union_operands(const SetExprPtr& s);

}  // namespace specscen::spec
