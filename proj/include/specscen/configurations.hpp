#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specscen/formula.hpp"
#include "specscen/spec.hpp"

namespace specscen::spec {

enum class FragmentKind {
  LtlOr,               // a || b in the temporal layer
  RfolUnion,           // S1 | S2 inside an AP body
  NegatedConjunction,  // !(A && B && ...) after normal form: !A || !B || ...
};

std::string to_string(FragmentKind k);

/// One disjunctive choice point. Each alternative is a nonempty subset of the
/// operands (bit i set = operand i holds, the rest do not).
struct Fragment {
  FragmentKind kind = FragmentKind::LtlOr;
  std::vector<std::string> operands;
  std::vector<std::uint32_t> alternatives;
  std::string ap;  // owning AP for RfolUnion fragments
};

struct Configuration {
  std::size_t id = 0;
  std::vector<std::size_t> choices;  // index into each fragment's alternatives
  Formula formula;                   // conjunction-only witness formula
  std::string label;
};

enum class FlipShift { Next, Eventually };

/// Exactly one member of a flipped AP group changes between time slices.
struct OneFlip {
  std::size_t id = 0;
  std::string ap;
  std::vector<std::string> group;
  FlipShift shift = FlipShift::Next;
  Formula earlier;  // boolean slice that holds first
  Formula later;    // slice reached by the shift
};

struct ConfigurationSpace {
  std::vector<Fragment> fragments;
  std::vector<Configuration> configurations;
  std::vector<OneFlip> oneflips;
  ApTable aps;  // spec APs plus derived APs introduced by RFOL union choices
};

/// `pre` must be normalized. Configurations are the cross product of fragment
/// alternatives in depth-first left-to-right order.
ConfigurationSpace enumerate_configurations(const Formula& pre, const ApTable& aps);

/// Empty when `pre` has no flipped negated-conjunction group.
std::vector<OneFlip> enumerate_oneflips(const Formula& pre);

}  // namespace specscen::spec
