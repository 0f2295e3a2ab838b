#include <cctype>
#include <fstream>
#include <sstream>

#include "specscen/relations.hpp"
#include "specscen/spec.hpp"

namespace specscen::spec {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         message),
      message_(message),
      line_(line),
      column_(column) {}

void ApTable::add(ApDef def) {
  index_[def.name] = defs_.size();
  defs_.push_back(std::move(def));
}

bool ApTable::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

const ApDef& ApTable::at(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown AP: " + std::string(name));
  return defs_[it->second];
}

std::optional<std::size_t> ApTable::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

enum class Tok { Ident, Number, Sym, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { tokenize(); }
  const std::vector<Token>& tokens() const { return tokens_; }

 private:
  void tokenize() {
    static const char* const kSymbols[] = {":=", "||", "&&", "->", ">=", "<=", "==", ":", ";", "|", "&",
                                           "\\", "^",  ".",  "(",  ")",  "!",  ">",  "<", "="};
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        tokens_.push_back(t);
        return;
      }
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        t.kind = Tok::Ident;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        t.kind = Tok::Number;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else {
        bool matched = false;
        for (const char* sym : kSymbols) {
          std::string_view s(sym);
          if (src_.substr(pos_, s.size()) == s) {
            t.kind = Tok::Sym;
            t.text = std::string(s);
            for (std::size_t i = 0; i < s.size(); ++i) advance();
            matched = true;
            break;
          }
        }
        if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
      }
      tokens_.push_back(std::move(t));
    }
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#' || (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/')) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  std::vector<Token> tokens_;
};

bool is_comparator(const Token& t) {
  return t.kind == Tok::Sym &&
         (t.text == ">" || t.text == ">=" || t.text == "<" || t.text == "<=" || t.text == "=" || t.text == "==");
}

bool is_temporal_keyword(const std::string& s) {
  return s == "X" || s == "N" || s == "F" || s == "G" || s == "U" || s == "R";
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const ApTable* aps) : toks_(std::move(tokens)), aps_(aps) {}

  Spec parse_spec(std::string default_name) {
    Spec spec;
    spec.name = std::move(default_name);
    aps_ = &spec.aps;
    std::optional<Formula> pre, post, full;
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind != Tok::Ident) fail("expected a declaration (ap, pre, post, formula, spec)", t);
      if (t.text == "spec") {
        next();
        spec.name = expect_ident("spec name").text;
      } else if (t.text == "ap") {
        next();
        Token name = expect_ident("AP name");
        if (is_temporal_keyword(name.text) || name.text == "true" || name.text == "false")
          fail("reserved word used as AP name: " + name.text, name);
        if (spec.aps.contains(name.text)) fail("duplicate AP: " + name.text, name);
        expect_sym(":=");
        spec.aps.add({name.text, parse_rfol_body()});
      } else if (t.text == "pre" || t.text == "post" || t.text == "formula") {
        Token kw = next();
        expect_sym(":");
        Formula f = parse_formula();
        if (kw.text == "pre") pre = f;
        else if (kw.text == "post") post = f;
        else full = f;
      } else {
        fail("unknown declaration '" + t.text + "'", t);
      }
      expect_sym(";");
    }
    if (full && (pre || post)) fail("'formula:' cannot be combined with 'pre:'/'post:'", peek());
    if (full) {
      auto [p, q] = decompose_pre_post(*full);
      pre = p;
      post = q;
    }
    if (!pre) fail("missing 'pre:' declaration", peek());
    spec.precondition = *pre;
    spec.postcondition = post;
    spec.full = post ? Formula::implication(*pre, *post) : *pre;
    return spec;
  }

  Formula parse_formula() { return parse_implication(); }

  RfolExpr parse_rfol_body() {
    const Token& open = peek();
    if (!(open.kind == Tok::Sym && open.text == "|")) fail("expected '|' opening a cardinality", open);
    next();
    RfolExpr e;
    e.set = parse_set_expr();
    expect_sym("|");
    Token cmp = next();
    if (!is_comparator(cmp)) fail("expected a comparator after cardinality", cmp);
    if (cmp.text == ">") e.cmp = Comparator::Greater;
    else if (cmp.text == ">=") e.cmp = Comparator::GreaterEq;
    else if (cmp.text == "<") e.cmp = Comparator::Less;
    else if (cmp.text == "<=") e.cmp = Comparator::LessEq;
    else e.cmp = Comparator::Equal;
    Token num = next();
    if (num.kind != Tok::Number) fail("expected a natural-number bound", num);
    e.bound = static_cast<std::uint32_t>(std::stoul(num.text));
    return e;
  }

  void expect_end() {
    if (peek().kind != Tok::End) fail("unexpected trailing input", peek());
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& msg, const Token& t) const {
    throw ParseError(msg, t.line, t.column);
  }

  bool at_sym(const char* s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool at_ident(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }

  void expect_sym(const char* s) {
    if (!at_sym(s)) {
      const Token& t = peek();
      fail(std::string("expected '") + s + "' but found " +
               (t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'"),
           t);
    }
    next();
  }

  Token expect_ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what, peek());
    return next();
  }

  // Set expressions: left-associative, all four operators share precedence.
  // A '|' directly followed by a comparator closes the cardinality.
  SetExprPtr parse_set_expr() {
    SetExprPtr lhs = parse_set_term();
    while (true) {
      const Token& t = peek();
      if (t.kind != Tok::Sym) break;
      SetOp op;
      if (t.text == "|") {
        if (is_comparator(peek(1))) break;
        op = SetOp::Union;
      } else if (t.text == "&") {
        op = SetOp::Intersection;
      } else if (t.text == "\\") {
        op = SetOp::Difference;
      } else if (t.text == "^") {
        op = SetOp::SymmetricDifference;
      } else {
        break;
      }
      next();
      lhs = SetExpr::binary(op, lhs, parse_set_term());
    }
    return lhs;
  }

  SetExprPtr parse_set_term() {
    SetExprPtr s;
    if (at_sym("(")) {
      next();
      s = parse_set_expr();
      expect_sym(")");
    } else {
      Token t = expect_ident("an entity type or 'ego'");
      if (!world::is_known_type(t.text)) fail("unknown entity type '" + t.text + "'", t);
      s = SetExpr::base(t.text);
    }
    while (at_sym(".")) {
      next();
      Token rel = expect_ident("a relation name");
      if (!world::find_relation(rel.text)) fail("unknown relation name '" + rel.text + "'", rel);
      s = SetExpr::image(s, rel.text);
    }
    return s;
  }

  Formula parse_implication() {
    Formula lhs = parse_or();
    if (at_sym("->")) {
      next();
      return Formula::implication(lhs, parse_implication());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (at_sym("||")) {
      next();
      lhs = Formula::disjunction(lhs, parse_and());
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_until();
    while (at_sym("&&")) {
      next();
      lhs = Formula::conjunction(lhs, parse_until());
    }
    return lhs;
  }

  Formula parse_until() {
    Formula lhs = parse_unary();
    if (at_ident("U")) {
      next();
      return Formula::until(lhs, parse_until());
    }
    if (at_ident("R")) {
      next();
      return Formula::release(lhs, parse_until());
    }
    return lhs;
  }

  Formula parse_unary() {
    if (at_sym("!")) {
      next();
      return Formula::negation(parse_unary());
    }
    if (peek().kind == Tok::Ident) {
      const std::string& w = peek().text;
      if (w == "X" || w == "N" || w == "F" || w == "G") {
        Token op = next();
        Formula inner = parse_unary();
        if (op.text == "X") return Formula::next(inner);
        if (op.text == "N") return Formula::weak_next(inner);
        if (op.text == "F") return Formula::finally(inner);
        return Formula::globally(inner);
      }
    }
    return parse_primary();
  }

  Formula parse_primary() {
    if (at_sym("(")) {
      next();
      Formula f = parse_formula();
      expect_sym(")");
      return f;
    }
    const Token& t = peek();
    if (t.kind != Tok::Ident) {
      fail(t.kind == Tok::End ? "unexpected end of input in formula" : "unexpected '" + t.text + "' in formula",
           t);
    }
    Token id = next();
    if (id.text == "true") return Formula::constant(true);
    if (id.text == "false") return Formula::constant(false);
    if (is_temporal_keyword(id.text)) fail("operator '" + id.text + "' is missing an operand", id);
    if (aps_ && !aps_->contains(id.text)) fail("unknown AP reference '" + id.text + "'", id);
    return Formula::ap(id.text);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const ApTable* aps_;
};

}  // namespace

Spec parse_spec(std::string_view source, std::string default_name) {
  Lexer lex(source);
  Parser p(lex.tokens(), nullptr);
  return p.parse_spec(std::move(default_name));
}

Spec load_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open spec file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), path.stem().string());
}

Formula parse_formula(std::string_view text) {
  Lexer lex(text);
  Parser p(lex.tokens(), nullptr);
  Formula f = p.parse_formula();
  p.expect_end();
  return f;
}

RfolExpr parse_rfol(std::string_view text) {
  Lexer lex(text);
  Parser p(lex.tokens(), nullptr);
  RfolExpr e = p.parse_rfol_body();
  p.expect_end();
  return e;
}

}  // namespace specscen::spec
