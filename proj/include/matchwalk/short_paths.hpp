#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "matchwalk/graph.hpp"
#include "matchwalk/rational.hpp"

namespace matchwalk {

/// Edge cutoff for "short" paths: ceil(2 / delta). Throws unless 0 < delta < 1.
inline std::size_t short_path_cutoff(const Rational& delta) {
  if (delta <= 0 || delta >= 1) throw PreconditionError("delta must lie in (0, 1), got " + to_string(delta));
  return static_cast<std::size_t>(ceil_positive(Rational(2) / delta));
}

/// All simple paths of G with 1..max_edges edges, each stored once in the
/// orientation whose first vertex is the smaller endpoint, sorted
/// lexicographically.
struct ShortPathCatalog {
  Rational delta;
  std::size_t max_edges = 0;
  std::vector<std::vector<Vertex>> paths;

  std::size_t size() const { return paths.size(); }

  bool contains(const std::vector<Vertex>& path) const {
    return std::binary_search(paths.begin(), paths.end(), path);
  }
};

/// Stored orientation of a vertex sequence.
inline std::vector<Vertex> canonical_orientation(std::vector<Vertex> path) {
  if (path.size() > 1 && path.back() < path.front()) std::reverse(path.begin(), path.end());
  return path;
}

inline ShortPathCatalog short_path_catalog(const Graph& g, const Rational& delta) {
  ShortPathCatalog cat{delta, short_path_cutoff(delta), {}};
  std::vector<Vertex> stack;
  std::vector<char> on_path(g.n(), 0);

  auto dfs = [&](auto&& self, Vertex v) -> void {
    if (stack.size() >= 2 && stack.front() < stack.back()) cat.paths.push_back(stack);
    if (stack.size() - 1 == cat.max_edges) return;
    for (auto inc : g.neighbors(v)) {
      if (on_path[inc.neighbor]) continue;
      on_path[inc.neighbor] = 1;
      stack.push_back(inc.neighbor);
      self(self, inc.neighbor);
      stack.pop_back();
      on_path[inc.neighbor] = 0;
    }
  };
  for (Vertex s = 0; s < g.n(); ++s) {
    stack = {s};
    on_path[s] = 1;
    dfs(dfs, s);
    on_path[s] = 0;
  }
  std::sort(cat.paths.begin(), cat.paths.end());
  return cat;
}

}  // namespace matchwalk
