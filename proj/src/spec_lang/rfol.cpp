#include "specscen/rfol.hpp"

#include <stdexcept>

namespace specscen::spec {

SetExprPtr SetExpr::base(std::string type_name) {
  auto e = std::make_shared<SetExpr>();
  e->kind = Kind::Base;
  e->name = std::move(type_name);
  return e;
}

SetExprPtr SetExpr::image(SetExprPtr source, std::string relation) {
  auto e = std::make_shared<SetExpr>();
  e->kind = Kind::Image;
  e->name = std::move(relation);
  e->lhs = std::move(source);
  return e;
}

SetExprPtr SetExpr::binary(SetOp op, SetExprPtr lhs, SetExprPtr rhs) {
  auto e = std::make_shared<SetExpr>();
  e->kind = Kind::Binary;
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

bool compare(std::size_t cardinality, Comparator cmp, std::uint32_t bound) {
  const auto b = static_cast<std::size_t>(bound);
  switch (cmp) {
    case Comparator::Greater: return cardinality > b;
    case Comparator::GreaterEq: return cardinality >= b;
    case Comparator::Equal: return cardinality == b;
    case Comparator::Less: return cardinality < b;
    case Comparator::LessEq: return cardinality <= b;
  }
  return false;
}

bool is_existential(const RfolExpr& e) {
  return (e.cmp == Comparator::Greater && e.bound == 0) ||
         (e.cmp == Comparator::GreaterEq && e.bound == 1);
}

std::string to_string(Comparator c) {
  switch (c) {
    case Comparator::Greater: return ">";
    case Comparator::GreaterEq: return ">=";
    case Comparator::Equal: return "=";
    case Comparator::Less: return "<";
    case Comparator::LessEq: return "<=";
  }
  return "?";
}

namespace {

const char* op_symbol(SetOp op) {
  switch (op) {
    case SetOp::Union: return " | ";
    case SetOp::Intersection: return " & ";
    case SetOp::Difference: return " \\ ";
    case SetOp::SymmetricDifference: return " ^ ";
  }
  return " ? ";
}

}  // namespace

std::string to_string(const SetExpr& s) {
  switch (s.kind) {
    case SetExpr::Kind::Base:
      return s.name;
    case SetExpr::Kind::Image: {
      std::string src = to_string(*s.lhs);
      if (s.lhs->kind == SetExpr::Kind::Binary) src = "(" + src + ")";
      return src + "." + s.name;
    }
    case SetExpr::Kind::Binary: {
      auto side = [](const SetExpr& e) {
        std::string t = to_string(e);
        return e.kind == SetExpr::Kind::Binary ? "(" + t + ")" : t;
      };
      return side(*s.lhs) + op_symbol(s.op) + side(*s.rhs);
    }
  }
  return {};
}

std::string to_string(const RfolExpr& e) {
  return "|" + to_string(*e.set) + "| " + to_string(e.cmp) + " " + std::to_string(e.bound);
}

bool equal(const SetExpr& a, const SetExpr& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  switch (a.kind) {
    case SetExpr::Kind::Base: return true;
    case SetExpr::Kind::Image: return equal(*a.lhs, *b.lhs);
    case SetExpr::Kind::Binary: return a.op == b.op && equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
  }
  return false;
}

std::vector<SetExprPtr> union_operands(const SetExprPtr& s) {
  if (s->kind != SetExpr::Kind::Binary || s->op != SetOp::Union) return {s};
  auto out = union_operands(s->lhs);
  auto right = union_operands(s->rhs);
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

}  // namespace specscen::spec
