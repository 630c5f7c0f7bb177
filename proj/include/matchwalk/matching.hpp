#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "matchwalk/graph.hpp"

namespace matchwalk {

/// Set of edge ids, kept sorted. Vertex-disjointness is a property checked
/// against a Graph (`is_matching`), not an invariant of the container.
class Matching {
 public:
  Matching() = default;
  Matching(std::initializer_list<EdgeId> ids) : Matching(std::vector<EdgeId>(ids)) {}
  explicit Matching(std::vector<EdgeId> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<EdgeId>& edge_ids() const { return ids_; }
  EdgeId operator[](std::size_t i) const { return ids_[i]; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  bool contains(EdgeId e) const { return std::binary_search(ids_.begin(), ids_.end(), e); }

  /// M \ {remove} ∪ {add}.
  Matching exchanged(EdgeId remove, EdgeId add) const {
    std::vector<EdgeId> out;
    out.reserve(ids_.size() + 1);
    for (EdgeId e : ids_)
      if (e != remove) out.push_back(e);
    out.push_back(add);
    return Matching(std::move(out));
  }

  friend auto operator<=>(const Matching&, const Matching&) = default;

 private:
  std::vector<EdgeId> ids_;
};

inline Matching symmetric_difference_set(const Matching& a, const Matching& b) {
  std::vector<EdgeId> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Matching(std::move(out));
}

inline bool is_matching(const Graph& g, const Matching& m) {
  std::vector<char> used(g.n(), 0);
  for (EdgeId e : m) {
    if (e >= g.m()) return false;
    const Edge& ed = g.edge(e);
    if (used[ed.u] || used[ed.v]) return false;
    used[ed.u] = used[ed.v] = 1;
  }
  return true;
}

/// mate[v] = matched neighbour or kNoVertex. Requires `m` to be a matching.
inline std::vector<Vertex> mate_array(const Graph& g, const Matching& m) {
  std::vector<Vertex> mate(g.n(), kNoVertex);
  for (EdgeId e : m) {
    mate[g.edge(e).u] = g.edge(e).v;
    mate[g.edge(e).v] = g.edge(e).u;
  }
  return mate;
}

inline Matching matching_from_mates(const Graph& g, const std::vector<Vertex>& mate) {
  std::vector<EdgeId> ids;
  for (Vertex v = 0; v < g.n(); ++v)
    if (mate[v] != kNoVertex && v < mate[v]) ids.push_back(g.require_edge(v, mate[v]));
  return Matching(std::move(ids));
}

/// Edge ids along a vertex sequence; throws if two consecutive vertices are not adjacent.
inline std::vector<EdgeId> path_edges(const Graph& g, const std::vector<Vertex>& path) {
  std::vector<EdgeId> out;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) out.push_back(g.require_edge(path[i], path[i + 1]));
  return out;
}

/// M ⊕ E(path).
inline Matching flip_path(const Graph& g, const Matching& m, const std::vector<Vertex>& path) {
  return symmetric_difference_set(m, Matching(path_edges(g, path)));
}

inline std::string to_string(const Matching& m) {
  std::string s = "{";
  for (std::size_t i = 0; i < m.size(); ++i) s += (i ? "," : "") + std::to_string(m.edge_ids()[i]);
  return s + "}";
}

/// Fixed-width edge bitset for graphs with at most 128 edges; the key type
/// of enumerated state spaces.
struct EdgeMask {
  static constexpr std::size_t kCapacity = 128;
  std::array<std::uint64_t, 2> w{0, 0};

  void set(EdgeId e) { w[e >> 6] |= std::uint64_t{1} << (e & 63); }
  void reset(EdgeId e) { w[e >> 6] &= ~(std::uint64_t{1} << (e & 63)); }
  void flip(EdgeId e) { w[e >> 6] ^= std::uint64_t{1} << (e & 63); }
  bool test(EdgeId e) const { return w[e >> 6] >> (e & 63) & 1; }
  int count() const { return std::popcount(w[0]) + std::popcount(w[1]); }
  bool none() const { return (w[0] | w[1]) == 0; }

  EdgeMask operator^(const EdgeMask& o) const { return {{w[0] ^ o.w[0], w[1] ^ o.w[1]}}; }
  EdgeMask operator|(const EdgeMask& o) const { return {{w[0] | o.w[0], w[1] | o.w[1]}}; }
  EdgeMask operator&(const EdgeMask& o) const { return {{w[0] & o.w[0], w[1] & o.w[1]}}; }
  EdgeMask operator~() const { return {{~w[0], ~w[1]}}; }
  bool is_subset_of(const EdgeMask& o) const { return ((w[0] & ~o.w[0]) | (w[1] & ~o.w[1])) == 0; }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < 2; ++i)
      for (std::uint64_t bits = w[i]; bits; bits &= bits - 1)
        f(static_cast<EdgeId>(i * 64 + std::countr_zero(bits)));
  }

  std::vector<EdgeId> ids() const {
    std::vector<EdgeId> out;
    for_each([&](EdgeId e) { out.push_back(e); });
    return out;
  }

  friend bool operator==(const EdgeMask&, const EdgeMask&) = default;
};

inline EdgeMask to_mask(const Matching& m) {
  EdgeMask out;
  for (EdgeId e : m) out.set(e);
  return out;
}

inline Matching to_matching(const EdgeMask& mask) { return Matching(mask.ids()); }

struct EdgeMaskHash {
  std::size_t operator()(const EdgeMask& k) const {
    std::uint64_t h = k.w[0] * 0x9e3779b97f4a7c15ULL ^ (k.w[1] + 0x632be59bd9b4e019ULL) * 0xc2b2ae3d27d4eb4fULL;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

inline bool is_matching(const Graph& g, const EdgeMask& m) {
  std::vector<char> used(g.n(), 0);
  bool ok = true;
  m.for_each([&](EdgeId e) {
    const Edge& ed = g.edge(e);
    if (used[ed.u] || used[ed.v]) ok = false;
    used[ed.u] = used[ed.v] = 1;
  });
  return ok;
}

}  // namespace matchwalk
