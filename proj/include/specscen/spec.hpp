#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "specscen/formula.hpp"
#include "specscen/rfol.hpp"

namespace specscen::spec {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

struct ApDef {
  std::string name;
  RfolExpr body;
};

/// Ordered name -> RFOL body table.
class ApTable {
 public:
  void add(ApDef def);
  bool contains(std::string_view name) const;
  const ApDef& at(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  const std::vector<ApDef>& defs() const { return defs_; }
  std::size_t size() const { return defs_.size(); }

 private:
  std::vector<ApDef> defs_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct Spec {
  std::string name;
  ApTable aps;
  Formula precondition;
  std::optional<Formula> postcondition;
  Formula full;
};

/// Grammar:
///   spec <name>;                 (optional)
///   ap <name> := |<set>| <cmp> <n>;
///   pre: <formula>;  [post: <formula>;]   or   formula: <formula>;
Spec parse_spec(std::string_view source, std::string default_name = "spec");
Spec load_spec_file(const std::filesystem::path& path);

/// Parses a bare formula; AP names are not checked.
Formula parse_formula(std::string_view text);
RfolExpr parse_rfol(std::string_view text);

}  // namespace specscen::spec
