#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "support/gen.hpp"
#include "taftwin/procgen/pattern.hpp"

namespace taftwin::testkit {

// Reference matcher written against the grammar, independent of the sampler: computes the set
// of end positions reachable from `start`.
inline std::set<std::size_t> ends_after(const procgen::PatternNode& n, const std::vector<std::string>& seq,
                                        std::size_t start) {
  using Op = procgen::PatternNode::Op;
  auto closure = [&](std::set<std::size_t> frontier) {
    std::set<std::size_t> all = frontier;
    while (!frontier.empty()) {
      std::set<std::size_t> next;
      for (std::size_t p : frontier) {
        for (std::size_t e : ends_after(n.children[0], seq, p)) {
          if (all.insert(e).second) next.insert(e);
        }
      }
      frontier = std::move(next);
    }
    return all;
  };
  switch (n.op) {
    case Op::symbol:
      if (start < seq.size() && seq[start] == n.name) return {start + 1};
      return {};
    case Op::optional: {
      auto r = ends_after(n.children[0], seq, start);
      r.insert(start);
      return r;
    }
    case Op::star: return closure({start});
    case Op::plus: return closure(ends_after(n.children[0], seq, start));
    case Op::alternation: {
      std::set<std::size_t> r;
      for (const auto& c : n.children) {
        auto e = ends_after(c, seq, start);
        r.insert(e.begin(), e.end());
      }
      return r;
    }
    case Op::concat: {
      std::set<std::size_t> cur{start};
      for (const auto& c : n.children) {
        std::set<std::size_t> next;
        for (std::size_t p : cur) {
          auto e = ends_after(c, seq, p);
          next.insert(e.begin(), e.end());
        }
        cur = std::move(next);
      }
      return cur;
    }
  }
  return {};
}

inline bool accepts(const procgen::PatternNode& n, const std::vector<std::string>& seq) {
  return ends_after(n, seq, 0).count(seq.size()) > 0;
}

// Random pattern text of nesting depth <= max_depth over the given single-letter sets.
inline std::string random_pattern(Gen& g, int max_depth, const std::string& letters = "ABCD") {
  auto letter = [&] { return std::string(1, letters[static_cast<std::size_t>(g.integer(0, int(letters.size()) - 1))]); };
  auto postfix = [&] {
    switch (g.integer(0, 3)) {
      case 0: return std::string("*");
      case 1: return std::string("+");
      case 2: return std::string("?");
      default: return std::string();
    }
  };
  std::function<std::string(int)> expr = [&](int depth) -> std::string {
    std::string out;
    const int terms = g.integer(1, 3);
    for (int i = 0; i < terms; ++i) {
      if (depth <= 1 || g.coin(0.5)) {
        out += letter() + postfix();
      } else {
        const int branches = g.integer(2, 3);
        std::string group = "(";
        for (int b = 0; b < branches; ++b) {
          if (b) group += "|";
          group += expr(depth - 1);
        }
        out += group + ")" + postfix();
      }
    }
    return out;
  };
  return expr(max_depth);
}

}  // namespace taftwin::testkit
