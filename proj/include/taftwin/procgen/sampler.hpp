#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "taftwin/procgen/pattern.hpp"

namespace taftwin::procgen {

class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

struct AssetVariant {
  std::string asset_id;
  double width = 0.0;
};

struct AssetSet {
  std::string name;
  std::vector<AssetVariant> members;
};

using AssetSets = std::map<std::string, AssetSet>;

struct Placement {
  std::string asset_id;
  std::string set_name;
  double width = 0.0;
  double lateral_start = 0.0;  // position along the span where the asset begins
};

inline void check_sets(const AssetSets& sets) {
  for (const auto& [name, set] : sets) {
    if (set.members.empty()) throw PreconditionError("asset set '" + name + "' is empty");
    for (const auto& m : set.members) {
      if (!(m.width > 0.0)) throw PreconditionError("asset '" + m.asset_id + "' has non-positive width");
    }
  }
}

namespace detail {

// Left-to-right greedy sampler. Each element is sampled against the budget left after
// reserving the minimum width of everything that follows it, so optional repetition never
// starves a later mandatory element.
class Sampler {
 public:
  Sampler(const AssetSets& sets, std::uint64_t seed) : sets_(sets), rng_(seed) {}

  double min_width(const PatternNode& n) const {
    using Op = PatternNode::Op;
    switch (n.op) {
      case Op::symbol: {
        const auto& members = sets_.at(n.name).members;
        double m = std::numeric_limits<double>::infinity();
        for (const auto& v : members) m = std::min(m, v.width);
        return m;
      }
      case Op::star:
      case Op::optional: return 0.0;
      case Op::plus: return min_width(n.children[0]);
      case Op::alternation: {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& c : n.children) m = std::min(m, min_width(c));
        return m;
      }
      case Op::concat: {
        double s = 0.0;
        for (const auto& c : n.children) s += min_width(c);
        return s;
      }
    }
    return 0.0;
  }

  // Emits into out; `avail` >= min_width(n) is guaranteed by the caller. Returns width used.
  double sample(const PatternNode& n, double avail, std::vector<Placement>& out) {
    using Op = PatternNode::Op;
    switch (n.op) {
      case Op::symbol: {
        std::vector<const AssetVariant*> fitting;
        for (const auto& v : sets_.at(n.name).members) {
          if (v.width <= avail) fitting.push_back(&v);
        }
        if (fitting.empty()) fitting.push_back(narrowest(sets_.at(n.name)));  // rounding at the edge
        const AssetVariant* pick = fitting[pick_index(fitting.size())];
        out.push_back({pick->asset_id, n.name, pick->width, 0.0});
        return pick->width;
      }
      case Op::star: return repeat(n.children[0], avail, out);
      case Op::plus: {
        double used = sample(n.children[0], avail, out);
        return used + repeat(n.children[0], avail - used, out);
      }
      case Op::optional: {
        if (min_width(n.children[0]) > avail) return 0.0;
        if (pick_index(2) == 0) return 0.0;
        return sample(n.children[0], avail, out);
      }
      case Op::alternation: {
        std::vector<const PatternNode*> fitting;
        for (const auto& c : n.children) {
          if (min_width(c) <= avail) fitting.push_back(&c);
        }
        if (fitting.empty()) {
          fitting.push_back(&*std::min_element(n.children.begin(), n.children.end(),
                                               [&](const PatternNode& a, const PatternNode& b) {
                                                 return min_width(a) < min_width(b);
                                               }));
        }
        return sample(*fitting[pick_index(fitting.size())], avail, out);
      }
      case Op::concat: {
        std::vector<double> suffix(n.children.size() + 1, 0.0);
        for (std::size_t i = n.children.size(); i-- > 0;) suffix[i] = suffix[i + 1] + min_width(n.children[i]);
        double used = 0.0;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          used += sample(n.children[i], avail - used - suffix[i + 1], out);
        }
        return used;
      }
    }
    return 0.0;
  }

  std::size_t pick_index(std::size_t n) {
    return static_cast<std::size_t>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_));
  }

 private:
  static const AssetVariant* narrowest(const AssetSet& set) {
    return &*std::min_element(set.members.begin(), set.members.end(),
                              [](const AssetVariant& a, const AssetVariant& b) { return a.width < b.width; });
  }

  double repeat(const PatternNode& child, double avail, std::vector<Placement>& out) {
    double used = 0.0;
    const double need = min_width(child);
    while (need <= avail - used) {
      const std::size_t before = out.size();
      used += sample(child, avail - used, out);
      if (out.size() == before) break;  // child can match empty; stop instead of spinning
    }
    return used;
  }

  const AssetSets& sets_;
  std::mt19937_64 rng_;
};

inline void assign_offsets(std::vector<Placement>& out) {
  double x = 0.0;
  for (auto& p : out) {
    p.lateral_start = x;
    x += p.width;
  }
}

}  // namespace detail

inline std::vector<Placement> sample_assets(const AssetPattern& pattern, const AssetSets& sets, double budget,
                                            std::uint64_t seed) {
  if (!(budget >= 0.0)) throw PreconditionError("budget must be non-negative");
  std::set<std::string> names;
  collect_symbols(pattern, names);
  for (const auto& n : names) {
    if (!sets.count(n)) throw PreconditionError("pattern references unknown asset set '" + n + "'");
  }
  check_sets(sets);
  detail::Sampler sampler(sets, seed);
  if (sampler.min_width(pattern) > budget) {
    throw BudgetExhausted("mandatory elements need " + std::to_string(sampler.min_width(pattern)) +
                          " m but the budget is " + std::to_string(budget) + " m");
  }
  std::vector<Placement> out;
  sampler.sample(pattern, budget, out);
  detail::assign_offsets(out);
  return out;
}

// Uniform choice among fitting members of one set, filling greedily.
inline std::vector<Placement> sample_random(const AssetSet& set, double budget, std::uint64_t seed) {
  AssetSets sets{{set.name, set}};
  return sample_assets(PatternNode::unary(PatternNode::Op::star, PatternNode::symbol(set.name)), sets, budget, seed);
}

// Members in cyclic index order; stops at the first member that no longer fits.
inline std::vector<Placement> sample_round_robin(const AssetSet& set, double budget) {
  if (set.members.empty()) throw PreconditionError("asset set '" + set.name + "' is empty");
  std::vector<Placement> out;
  double used = 0.0;
  for (std::size_t i = 0;; ++i) {
    const AssetVariant& v = set.members[i % set.members.size()];
    if (!(v.width > 0.0)) throw PreconditionError("asset '" + v.asset_id + "' has non-positive width");
    if (used + v.width > budget) break;
    out.push_back({v.asset_id, set.name, v.width, used});
    used += v.width;
  }
  return out;
}

}  // namespace taftwin::procgen
