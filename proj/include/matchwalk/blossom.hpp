#pragma once

#include <numeric>
#include <queue>
#include <vector>

#include "matchwalk/graph.hpp"
#include "matchwalk/matching.hpp"

namespace matchwalk {

namespace detail {

/// Edmonds' blossom algorithm: BFS for an augmenting path from each free
/// root, contracting odd cycles by relabelling their base. O(V^3) worst case.
class BlossomMatcher {
 public:
  explicit BlossomMatcher(const Graph& g)
      : g_(g), mate_(g.n(), kNoVertex), parent_(g.n()), base_(g.n()), used_(g.n()), in_blossom_(g.n()) {}

  std::vector<Vertex> solve(std::vector<Vertex> initial) {
    mate_ = std::move(initial);
    greedy();
    for (Vertex root = 0; root < g_.n(); ++root) {
      if (mate_[root] != kNoVertex) continue;
      Vertex end = find_path(root);
      while (end != kNoVertex) {
        Vertex pv = parent_[end];
        Vertex ppv = mate_[pv];
        mate_[end] = pv;
        mate_[pv] = end;
        end = ppv;
      }
    }
    return mate_;
  }

 private:
  void greedy() {
    for (Vertex v = 0; v < g_.n(); ++v) {
      if (mate_[v] != kNoVertex) continue;
      for (auto inc : g_.neighbors(v))
        if (mate_[inc.neighbor] == kNoVertex) {
          mate_[v] = inc.neighbor;
          mate_[inc.neighbor] = v;
          break;
        }
    }
  }

  Vertex lca(Vertex a, Vertex b) {
    std::vector<char> seen(g_.n(), 0);
    for (;;) {
      a = base_[a];
      seen[a] = 1;
      if (mate_[a] == kNoVertex) break;
      a = parent_[mate_[a]];
    }
    for (;;) {
      b = base_[b];
      if (seen[b]) return b;
      b = parent_[mate_[b]];
    }
  }

  void mark_path(Vertex v, Vertex b, Vertex child) {
    while (base_[v] != b) {
      in_blossom_[base_[v]] = in_blossom_[base_[mate_[v]]] = 1;
      parent_[v] = child;
      child = mate_[v];
      v = parent_[mate_[v]];
    }
  }

  Vertex find_path(Vertex root) {
    std::fill(used_.begin(), used_.end(), 0);
    std::fill(parent_.begin(), parent_.end(), kNoVertex);
    std::iota(base_.begin(), base_.end(), Vertex{0});
    used_[root] = 1;
    std::queue<Vertex> q;
    q.push(root);
    while (!q.empty()) {
      Vertex v = q.front();
      q.pop();
      for (auto inc : g_.neighbors(v)) {
        Vertex to = inc.neighbor;
        if (base_[v] == base_[to] || mate_[v] == to) continue;
        if (to == root || (mate_[to] != kNoVertex && parent_[mate_[to]] != kNoVertex)) {
          Vertex cur = lca(v, to);
          std::fill(in_blossom_.begin(), in_blossom_.end(), 0);
          mark_path(v, cur, to);
          mark_path(to, cur, v);
          for (Vertex i = 0; i < g_.n(); ++i)
            if (in_blossom_[base_[i]]) {
              base_[i] = cur;
              if (!used_[i]) {
                used_[i] = 1;
                q.push(i);
              }
            }
        } else if (parent_[to] == kNoVertex) {
          parent_[to] = v;
          if (mate_[to] == kNoVertex) return to;
          used_[mate_[to]] = 1;
          q.push(mate_[to]);
        }
      }
    }
    return kNoVertex;
  }

  const Graph& g_;
  std::vector<Vertex> mate_, parent_, base_;
  std::vector<char> used_, in_blossom_;
};

}  // namespace detail

/// Maximum-cardinality matching of a general graph.
inline Matching maximum_matching(const Graph& g) {
  detail::BlossomMatcher solver(g);
  return matching_from_mates(g, solver.solve(std::vector<Vertex>(g.n(), kNoVertex)));
}

/// Maximum matching grown from a given matching (which it need not contain).
inline Matching maximum_matching(const Graph& g, const Matching& start) {
  detail::BlossomMatcher solver(g);
  return matching_from_mates(g, solver.solve(mate_array(g, start)));
}

inline std::size_t matching_number(const Graph& g) { return maximum_matching(g).size(); }

}  // namespace matchwalk
