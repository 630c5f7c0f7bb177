#pragma once

#include <optional>
#include <string>
#include <vector>

#include "matchwalk/blossom.hpp"
#include "matchwalk/graph.hpp"
#include "matchwalk/matching.hpp"
#include "matchwalk/rational.hpp"
#include "matchwalk/short_paths.hpp"

namespace matchwalk {

/// Shortest M-augmenting path with at most `max_edges` edges, or nullopt.
/// Ties go to the lexicographically least vertex sequence whose first vertex
/// is the smaller endpoint. `mate` must describe a matching.
inline std::optional<std::vector<Vertex>> shortest_augmenting_path(const Graph& g, const std::vector<Vertex>& mate,
                                                                   std::size_t max_edges) {
  std::vector<Vertex> stack;
  std::vector<char> on_path(g.n(), 0);
  std::size_t target = 0;

  // Stack holds an alternating path starting at a free vertex whose last
  // edge is unmatched; extend by (matched edge, unmatched edge) pairs.
  auto dfs = [&](auto&& self, Vertex v) -> bool {
    std::size_t edges = stack.size() - 1;
    if (edges == target) return mate[v] == kNoVertex && stack.front() < v;
    if (mate[v] == kNoVertex || on_path[mate[v]]) return false;
    Vertex w = mate[v];
    on_path[w] = 1;
    stack.push_back(w);
    for (auto inc : g.neighbors(w)) {
      Vertex x = inc.neighbor;
      if (on_path[x]) continue;
      on_path[x] = 1;
      stack.push_back(x);
      if (self(self, x)) return true;
      stack.pop_back();
      on_path[x] = 0;
    }
    stack.pop_back();
    on_path[w] = 0;
    return false;
  };

  for (target = 1; target <= max_edges; target += 2) {
    for (Vertex s = 0; s < g.n(); ++s) {
      if (mate[s] != kNoVertex) continue;
      on_path[s] = 1;
      for (auto inc : g.neighbors(s)) {
        Vertex x = inc.neighbor;
        stack = {s, x};
        on_path[x] = 1;
        bool found = dfs(dfs, x);
        if (found) return stack;
        on_path[x] = 0;
      }
      on_path[s] = 0;
    }
  }
  return std::nullopt;
}

/// Canonical short augmenting path: shortest, then lexicographically least,
/// with at most ceil(2/delta) edges. When |M| <= (1 - delta) m*(G) such a
/// path always exists (pigeonhole over M ⊕ M*). Throws PreconditionError
/// otherwise, stating whether M is maximum.
inline std::vector<Vertex> find_short_augmenting_path(const Graph& g, const Matching& m, const Rational& delta) {
  if (!is_matching(g, m)) throw PreconditionError("find_short_augmenting_path: input is not a matching");
  std::size_t cutoff = short_path_cutoff(delta);
  if (auto p = shortest_augmenting_path(g, mate_array(g, m), cutoff)) return *p;
  std::size_t best = maximum_matching(g, m).size();
  if (best == m.size())
    throw PreconditionError("no augmenting path: |M| = " + std::to_string(m.size()) + " = m*(G)");
  throw PreconditionError("no augmenting path with <= " + std::to_string(cutoff) + " edges: |M| = " +
                          std::to_string(m.size()) + ", m*(G) = " + std::to_string(best) +
                          " violates |M| <= (1 - delta) m*(G)");
}

}  // namespace matchwalk
