#pragma once

#include <algorithm>
#include <vector>

#include "matchwalk/graph.hpp"
#include "matchwalk/matching.hpp"

namespace matchwalk {

/// One connected component of x ⊕ y. `edges[i]` joins `vertices[i]` and
/// `vertices[i+1]`; for a cycle the last edge closes back to `vertices[0]`.
struct DiffComponent {
  std::vector<Vertex> vertices;
  std::vector<EdgeId> edges;
  std::vector<char> in_x;  // in_x[i]: edges[i] ∈ x (otherwise ∈ y)

  std::size_t length() const { return edges.size(); }
  /// Cycles: the minimum vertex. Odd paths: the smaller endpoint. Both are vertices[0].
  Vertex distinguished() const { return vertices.front(); }

  std::size_t x_edges() const { return static_cast<std::size_t>(std::count(in_x.begin(), in_x.end(), 1)); }

  friend bool operator<(const DiffComponent& a, const DiffComponent& b) { return a.vertices < b.vertices; }
};

/// x ⊕ y split by component type. Every list is sorted lexicographically by
/// canonical vertex sequence.
struct DiffDecomposition {
  std::vector<DiffComponent> even_paths;
  std::vector<DiffComponent> cycles;
  std::vector<DiffComponent> x_augmenting;  // odd, more y-edges
  std::vector<DiffComponent> y_augmenting;  // odd, more x-edges

  bool empty() const { return even_paths.empty() && cycles.empty() && x_augmenting.empty() && y_augmenting.empty(); }
  std::size_t odd_paths() const { return x_augmenting.size() + y_augmenting.size(); }
  /// Number of x-augmenting paths; equals the y-augmenting count when |x| = |y|.
  std::size_t j() const { return x_augmenting.size(); }

  /// Union of all component edges.
  Matching edges() const {
    std::vector<EdgeId> out;
    for (const auto* list : {&even_paths, &cycles, &x_augmenting, &y_augmenting})
      for (const auto& c : *list) out.insert(out.end(), c.edges.begin(), c.edges.end());
    return Matching(std::move(out));
  }
};

namespace detail {

/// x_only / y_only: the edges of x \ y and y \ x.
inline DiffDecomposition decompose_difference(const Graph& g, const std::vector<EdgeId>& x_only,
                                              const std::vector<EdgeId>& y_only) {
  DiffDecomposition out;
  if (x_only.empty() && y_only.empty()) return out;

  // Each vertex meets at most one x-edge and one y-edge of the difference.
  struct Slot {
    Vertex v;
    EdgeId xe, ye;
  };
  constexpr EdgeId kNone = static_cast<EdgeId>(-1);
  std::vector<Slot> slots;
  auto slot_of = [&](Vertex v) -> Slot& {
    for (auto& s : slots)
      if (s.v == v) return s;
    slots.push_back({v, kNone, kNone});
    return slots.back();
  };
  for (EdgeId e : x_only) {
    slot_of(g.edge(e).u).xe = e;
    slot_of(g.edge(e).v).xe = e;
  }
  for (EdgeId e : y_only) {
    slot_of(g.edge(e).u).ye = e;
    slot_of(g.edge(e).v).ye = e;
  }
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.v < b.v; });
  auto find = [&](Vertex v) -> const Slot& {
    return *std::lower_bound(slots.begin(), slots.end(), v, [](const Slot& s, Vertex w) { return s.v < w; });
  };

  std::vector<char> visited(slots.size(), 0);
  auto index_of = [&](Vertex v) {
    return static_cast<std::size_t>(
        std::lower_bound(slots.begin(), slots.end(), v, [](const Slot& s, Vertex w) { return s.v < w; }) -
        slots.begin());
  };

  auto walk = [&](Vertex start, EdgeId first) {
    DiffComponent c;
    c.vertices.push_back(start);
    visited[index_of(start)] = 1;
    Vertex cur = start;
    EdgeId e = first;
    while (e != kNone) {
      Vertex next = g.edge(e).other(cur);
      bool ex = find(cur).xe == e;
      c.edges.push_back(e);
      c.in_x.push_back(ex ? 1 : 0);
      if (next == start) break;  // closed a cycle
      c.vertices.push_back(next);
      visited[index_of(next)] = 1;
      const Slot& s = find(next);
      e = ex ? s.ye : s.xe;
      cur = next;
    }
    return c;
  };

  // Paths: start from endpoints (one incident difference edge), smaller end first.
  for (const auto& s : slots) {
    if (visited[index_of(s.v)]) continue;
    bool endpoint = (s.xe == kNone) != (s.ye == kNone);
    if (!endpoint) continue;
    DiffComponent c = walk(s.v, s.xe != kNone ? s.xe : s.ye);
    std::size_t xs = c.x_edges(), ys = c.length() - xs;
    if (xs == ys)
      out.even_paths.push_back(std::move(c));
    else if (ys > xs)
      out.x_augmenting.push_back(std::move(c));
    else
      out.y_augmenting.push_back(std::move(c));
  }
  // Cycles: start at the minimum vertex, towards its smaller neighbour.
  for (const auto& s : slots) {
    if (visited[index_of(s.v)]) continue;
    Vertex via_x = g.edge(s.xe).other(s.v), via_y = g.edge(s.ye).other(s.v);
    out.cycles.push_back(walk(s.v, via_x < via_y ? s.xe : s.ye));
  }
  for (auto* list : {&out.even_paths, &out.cycles, &out.x_augmenting, &out.y_augmenting})
    std::sort(list->begin(), list->end());
  return out;
}

}  // namespace detail

/// Decomposes x ⊕ y into even paths, even cycles, x-augmenting and
/// y-augmenting odd paths with their canonical orders.
inline DiffDecomposition symmetric_difference(const Graph& g, const Matching& x, const Matching& y) {
  std::vector<EdgeId> xo, yo;
  std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(xo));
  std::set_difference(y.begin(), y.end(), x.begin(), x.end(), std::back_inserter(yo));
  return detail::decompose_difference(g, xo, yo);
}

inline DiffDecomposition symmetric_difference(const Graph& g, const EdgeMask& x, const EdgeMask& y) {
  return detail::decompose_difference(g, (x & ~y).ids(), (y & ~x).ids());
}

}  // namespace matchwalk
