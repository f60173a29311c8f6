#pragma once

#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "taftwin/core/error.hpp"

namespace taftwin::procgen {

// Expression tree of an asset pattern such as "(A|B)*CA+".
//
// Grammar (whitespace ignored):
//   expr := term+
//   term := atom ('*' | '+' | '?')?
//   atom := NAME | '(' expr ('|' expr)* ')'
//   NAME := an uppercase letter, or '{' [A-Za-z0-9_-]+ '}' for longer set names
struct PatternNode {
  enum class Op { symbol, star, plus, optional, alternation, concat };
  Op op = Op::symbol;
  std::string name;  // symbol only
  std::vector<PatternNode> children;

  friend bool operator==(const PatternNode&, const PatternNode&) = default;

  static PatternNode symbol(std::string n) { return {Op::symbol, std::move(n), {}}; }
  static PatternNode unary(Op op, PatternNode child) { return {op, {}, {std::move(child)}}; }
};

using AssetPattern = PatternNode;

inline std::string describe(const PatternNode& n) {
  auto join = [&](std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i) out += sep;
      out += describe(n.children[i]);
    }
    return out;
  };
  switch (n.op) {
    case PatternNode::Op::symbol: return n.name;
    case PatternNode::Op::star: return "Star(" + describe(n.children[0]) + ")";
    case PatternNode::Op::plus: return "Plus(" + describe(n.children[0]) + ")";
    case PatternNode::Op::optional: return "Optional(" + describe(n.children[0]) + ")";
    case PatternNode::Op::alternation: return "Alt(" + join(",") + ")";
    case PatternNode::Op::concat: return "Concat[" + join(", ") + "]";
  }
  return {};
}

inline void collect_symbols(const PatternNode& n, std::set<std::string>& out) {
  if (n.op == PatternNode::Op::symbol) out.insert(n.name);
  for (const auto& c : n.children) collect_symbols(c, out);
}

namespace detail {

class PatternParser {
 public:
  explicit PatternParser(std::string_view text) : text_(text) {}

  PatternNode parse() {
    PatternNode root = expr();
    skip_ws();
    if (pos_ < text_.size()) {
      if (text_[pos_] == ')') throw ParseError(pos_, "unbalanced ')'");
      if (text_[pos_] == '|') throw ParseError(pos_, "alternation must be enclosed in parentheses");
      throw ParseError(pos_, "unexpected character");
    }
    return root;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_expr_end() {
    skip_ws();
    return pos_ >= text_.size() || text_[pos_] == ')' || text_[pos_] == '|';
  }

  PatternNode expr() {
    std::vector<PatternNode> terms;
    while (!at_expr_end()) terms.push_back(term());
    if (terms.empty()) throw ParseError(pos_, "empty expression");
    if (terms.size() == 1) return std::move(terms.front());
    return {PatternNode::Op::concat, {}, std::move(terms)};
  }

  PatternNode term() {
    PatternNode a = atom();
    skip_ws();
    if (pos_ < text_.size()) {
      switch (text_[pos_]) {
        case '*': ++pos_; return PatternNode::unary(PatternNode::Op::star, std::move(a));
        case '+': ++pos_; return PatternNode::unary(PatternNode::Op::plus, std::move(a));
        case '?': ++pos_; return PatternNode::unary(PatternNode::Op::optional, std::move(a));
        default: break;
      }
    }
    return a;
  }

  bool has_matching_paren(std::size_t open) const {
    int depth = 0;
    for (std::size_t i = open; i < text_.size(); ++i) {
      if (text_[i] == '(') ++depth;
      if (text_[i] == ')' && --depth == 0) return true;
    }
    return false;
  }

  PatternNode atom() {
    skip_ws();
    const char c = text_[pos_];
    if (std::isupper(static_cast<unsigned char>(c))) {
      ++pos_;
      return PatternNode::symbol(std::string(1, c));
    }
    if (c == '{') {
      const std::size_t open = pos_++;
      const std::size_t begin = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_' || text_[pos_] == '-')) {
        ++pos_;
      }
      if (pos_ >= text_.size() || text_[pos_] != '}' || pos_ == begin) {
        throw ParseError(open, "malformed set name");
      }
      std::string name(text_.substr(begin, pos_ - begin));
      ++pos_;
      return PatternNode::symbol(std::move(name));
    }
    if (c == '(') {
      const std::size_t open = pos_;
      if (!has_matching_paren(open)) throw ParseError(open, "unbalanced '('");
      ++pos_;
      std::vector<PatternNode> branches;
      branches.push_back(expr());
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] == '|') {
        ++pos_;
        branches.push_back(expr());
        skip_ws();
      }
      if (pos_ >= text_.size() || text_[pos_] != ')') throw ParseError(open, "unbalanced '('");
      ++pos_;
      if (branches.size() == 1) return std::move(branches.front());
      return {PatternNode::Op::alternation, {}, std::move(branches)};
    }
    if (c == '*' || c == '+' || c == '?') throw ParseError(pos_, "operator without operand");
    throw ParseError(pos_, std::string("unknown operator '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline AssetPattern parse_pattern(std::string_view text) { return detail::PatternParser(text).parse(); }

}  // namespace taftwin::procgen
