#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "matchwalk/error.hpp"
#include "matchwalk/graph.hpp"
#include "matchwalk/matching.hpp"

namespace matchwalk {

inline constexpr std::size_t kDefaultStateBudget = 20000;

namespace detail {

/// Matchings of one connected component with at most `k` edges, bucketed by size.
inline std::vector<std::vector<std::vector<EdgeId>>> component_matchings(const Graph& g,
                                                                         const std::vector<EdgeId>& edges,
                                                                         std::size_t k, std::size_t budget) {
  std::vector<std::vector<std::vector<EdgeId>>> by_size(k + 1);
  std::vector<char> used(g.n(), 0);
  std::vector<EdgeId> chosen;
  std::size_t total = 0;
  auto dfs = [&](auto&& self, std::size_t from) -> void {
    by_size[chosen.size()].push_back(chosen);
    if (++total > budget) throw BudgetExceeded("state space too large while enumerating a component", total);
    if (chosen.size() == k) return;
    for (std::size_t i = from; i < edges.size(); ++i) {
      const Edge& e = g.edge(edges[i]);
      if (used[e.u] || used[e.v]) continue;
      used[e.u] = used[e.v] = 1;
      chosen.push_back(edges[i]);
      self(self, i + 1);
      chosen.pop_back();
      used[e.u] = used[e.v] = 0;
    }
  };
  dfs(dfs, 0);
  return by_size;
}

}  // namespace detail

/// All matchings of size exactly k, sorted lexicographically by edge ids.
/// Works component by component, so graphs with many small components stay
/// cheap. Throws BudgetExceeded when more than `budget` matchings exist.
inline std::vector<Matching> enumerate_matchings(const Graph& g, std::size_t k,
                                                 std::size_t budget = kDefaultStateBudget) {
  std::vector<std::vector<EdgeId>> comp_edges;
  {
    auto comps = connected_components(g);
    std::vector<std::size_t> comp_of(g.n());
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (Vertex v : comps[c]) comp_of[v] = c;
    comp_edges.assign(comps.size(), {});
    for (EdgeId e = 0; e < g.m(); ++e) comp_edges[comp_of[g.edge(e).u]].push_back(e);
    std::erase_if(comp_edges, [](const auto& list) { return list.empty(); });
  }

  std::vector<std::vector<std::vector<std::vector<EdgeId>>>> parts;
  parts.reserve(comp_edges.size());
  for (const auto& edges : comp_edges) parts.push_back(detail::component_matchings(g, edges, k, budget));

  // ways[i][s]: matchings of size s using components i.. (saturating at budget + 1).
  const std::size_t cap = budget + 1;
  std::vector<std::vector<std::size_t>> ways(parts.size() + 1, std::vector<std::size_t>(k + 1, 0));
  ways[parts.size()][0] = 1;
  for (std::size_t i = parts.size(); i-- > 0;)
    for (std::size_t s = 0; s <= k; ++s) {
      std::size_t w = 0;
      for (std::size_t a = 0; a <= s; ++a) {
        if (parts[i][a].empty() || ways[i + 1][s - a] == 0) continue;
        __extension__ using u128 = unsigned __int128;
        u128 add = static_cast<u128>(parts[i][a].size()) * ways[i + 1][s - a];
        w = static_cast<std::size_t>(std::min<u128>(cap, w + add));
      }
      ways[i][s] = w;
    }
  if (ways[0][k] > budget) throw BudgetExceeded("state space too large: more than " + std::to_string(budget) +
                                                    " matchings of size " + std::to_string(k),
                                                ways[0][k]);

  std::vector<Matching> out;
  out.reserve(ways[0][k]);
  std::vector<EdgeId> acc;
  auto combine = [&](auto&& self, std::size_t i, std::size_t remaining) -> void {
    if (i == parts.size()) {
      if (remaining == 0) out.emplace_back(acc);
      return;
    }
    for (std::size_t a = 0; a <= remaining; ++a) {
      if (ways[i + 1][remaining - a] == 0) continue;
      for (const auto& piece : parts[i][a]) {
        std::size_t mark = acc.size();
        acc.insert(acc.end(), piece.begin(), piece.end());
        self(self, i + 1, remaining - a);
        acc.resize(mark);
      }
    }
  };
  combine(combine, 0, k);
  std::sort(out.begin(), out.end());
  return out;
}

/// Enumerated Ω = M_k(G) with index lookup and the sparse off-diagonal
/// structure of the down-up walk (legal single exchanges).
class StateSpace {
 public:
  StateSpace(const Graph& g, std::size_t k, std::size_t budget = kDefaultStateBudget) : graph_(g), k_(k) {
    if (g.m() > EdgeMask::kCapacity)
      throw PreconditionError("exact state spaces support at most " + std::to_string(EdgeMask::kCapacity) +
                              " edges, graph has " + std::to_string(g.m()));
    auto all = enumerate_matchings(g, k, budget);
    if (all.empty()) throw PreconditionError("no matching of size " + std::to_string(k));
    states_.reserve(all.size());
    for (const auto& m : all) states_.push_back(to_mask(m));
    index_.reserve(states_.size() * 2);
    for (std::uint32_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
    build_transitions();
  }

  const Graph& graph() const { return graph_; }
  std::size_t k() const { return k_; }
  std::size_t size() const { return states_.size(); }
  const EdgeMask& state(std::size_t i) const { return states_[i]; }
  Matching matching(std::size_t i) const { return to_matching(states_[i]); }

  std::optional<std::uint32_t> find(const EdgeMask& m) const {
    auto it = index_.find(m);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Off-diagonal neighbours of state i, sorted ascending.
  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {targets_.data() + row_start_[i], targets_.data() + row_start_[i + 1]};
  }
  std::size_t degree(std::size_t i) const { return row_start_[i + 1] - row_start_[i]; }

  /// Directed transitions are numbered by CSR position.
  std::size_t transition_count() const { return targets_.size(); }
  std::size_t transition_id(std::uint32_t from, std::uint32_t to) const {
    auto row = neighbors(from);
    auto it = std::lower_bound(row.begin(), row.end(), to);
    if (it == row.end() || *it != to) return kNoTransition;
    return row_start_[from] + static_cast<std::size_t>(it - row.begin());
  }
  std::uint32_t transition_source(std::size_t tid) const {
    auto it = std::upper_bound(row_start_.begin(), row_start_.end(), tid);
    return static_cast<std::uint32_t>(it - row_start_.begin() - 1);
  }
  std::uint32_t transition_target(std::size_t tid) const { return targets_[tid]; }

  static constexpr std::size_t kNoTransition = std::numeric_limits<std::size_t>::max();

 private:
  void build_transitions() {
    const Graph& g = graph_;
    constexpr EdgeId kNone = static_cast<EdgeId>(-1);
    std::vector<EdgeId> cover(g.n(), kNone);
    row_start_.assign(states_.size() + 1, 0);
    for (std::uint32_t i = 0; i < states_.size(); ++i) {
      const EdgeMask& x = states_[i];
      std::vector<EdgeId> in_x = x.ids();
      for (EdgeId e : in_x) cover[g.edge(e).u] = cover[g.edge(e).v] = e;
      std::vector<std::uint32_t> row;
      for (EdgeId add = 0; add < g.m(); ++add) {
        if (x.test(add)) continue;
        EdgeId cu = cover[g.edge(add).u], cv = cover[g.edge(add).v];
        auto push = [&](EdgeId remove) {
          EdgeMask y = x;
          y.reset(remove);
          y.set(add);
          row.push_back(index_.at(y));
        };
        if (cu == kNone && cv == kNone) {
          for (EdgeId remove : in_x) push(remove);
        } else if (cu == kNone || cv == kNone) {
          push(cu == kNone ? cv : cu);
        }
      }
      for (EdgeId e : in_x) cover[g.edge(e).u] = cover[g.edge(e).v] = kNone;
      std::sort(row.begin(), row.end());
      targets_.insert(targets_.end(), row.begin(), row.end());
      row_start_[i + 1] = targets_.size();
    }
  }

  Graph graph_;
  std::size_t k_;
  std::vector<EdgeMask> states_;
  std::unordered_map<EdgeMask, std::uint32_t, EdgeMaskHash> index_;
  std::vector<std::size_t> row_start_;
  std::vector<std::uint32_t> targets_;
};

}  // namespace matchwalk
