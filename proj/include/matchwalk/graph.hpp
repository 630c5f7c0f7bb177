#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "matchwalk/error.hpp"

namespace matchwalk {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr Vertex kNoVertex = static_cast<Vertex>(-1);

struct Edge {
  Vertex u;
  Vertex v;
  friend auto operator<=>(const Edge&, const Edge&) = default;

  Vertex other(Vertex w) const { return w == u ? v : u; }
  bool touches(Vertex w) const { return w == u || w == v; }
};

struct Incidence {
  Vertex neighbor;
  EdgeId edge;
};

/// Simple undirected graph. Edges are stored as (u, v) with u < v, sorted
/// lexicographically, so edge ids are a canonical function of the edge set.
class Graph {
 public:
  Graph() = default;

  /// Canonicalizes `pairs`: orients u < v, sorts, drops duplicates.
  /// Throws PreconditionError on self-loops or endpoints outside [0, n).
  Graph(std::size_t n, std::vector<std::pair<Vertex, Vertex>> pairs) : n_(n) {
    edges_.reserve(pairs.size());
    for (auto [a, b] : pairs) {
      if (a == b) throw PreconditionError("self-loop at vertex " + std::to_string(a));
      if (a >= n || b >= n)
        throw PreconditionError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                ") has an endpoint >= n = " + std::to_string(n));
      edges_.push_back({std::min(a, b), std::max(a, b)});
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    adjacency_.assign(n_, {});
    for (EdgeId id = 0; id < edges_.size(); ++id) {
      adjacency_[edges_[id].u].push_back({edges_[id].v, id});
      adjacency_[edges_[id].v].push_back({edges_[id].u, id});
    }
    for (auto& list : adjacency_)
      std::sort(list.begin(), list.end(),
                [](const Incidence& a, const Incidence& b) { return a.neighbor < b.neighbor; });
  }

  std::size_t n() const { return n_; }
  std::size_t m() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId id) const { return edges_[id]; }
  std::span<const Incidence> neighbors(Vertex v) const { return adjacency_[v]; }
  std::size_t degree(Vertex v) const { return adjacency_[v].size(); }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& list : adjacency_) d = std::max(d, list.size());
    return d;
  }

  std::optional<EdgeId> edge_id(Vertex a, Vertex b) const {
    if (a >= n_ || b >= n_) return std::nullopt;
    const auto& list = adjacency_[a];
    auto it = std::lower_bound(list.begin(), list.end(), b,
                               [](const Incidence& inc, Vertex w) { return inc.neighbor < w; });
    if (it == list.end() || it->neighbor != b) return std::nullopt;
    return it->edge;
  }

  /// Edge id of {a, b}; throws if absent.
  EdgeId require_edge(Vertex a, Vertex b) const {
    if (auto id = edge_id(a, b)) return *id;
    throw PreconditionError("no edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Edge-list text: optional "n <int>" header, "u v" lines, '#' comments.
/// Without a header n is one more than the largest vertex id.
inline Graph parse_graph(std::string_view text) {
  std::optional<std::uint64_t> declared_n;
  std::vector<std::pair<Vertex, Vertex>> pairs;
  std::uint64_t max_id = 0;
  bool any_edge = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    auto tokens = detail::split_ws(line);
    if (tokens.size() == 2 && tokens[0] == "n") {
      if (declared_n) throw ParseError(line_no, "duplicate 'n' header");
      if (any_edge) throw ParseError(line_no, "'n' header must precede edges");
      declared_n = detail::parse_uint(tokens[1]);
      if (!declared_n) throw ParseError(line_no, "malformed vertex count '" + std::string(tokens[1]) + "'");
      continue;
    }
    if (tokens.size() != 2) throw ParseError(line_no, "expected 'u v', got '" + std::string(line) + "'");
    auto a = detail::parse_uint(tokens[0]);
    auto b = detail::parse_uint(tokens[1]);
    if (!a || !b) throw ParseError(line_no, "malformed edge '" + std::string(line) + "'");
    if (*a == *b) throw ParseError(line_no, "self-loop at vertex " + std::to_string(*a));
    if (*a >= kNoVertex || *b >= kNoVertex) throw ParseError(line_no, "vertex id too large");
    if (declared_n && (*a >= *declared_n || *b >= *declared_n))
      throw ParseError(line_no, "vertex id >= declared n = " + std::to_string(*declared_n));
    max_id = std::max({max_id, *a, *b});
    any_edge = true;
    pairs.emplace_back(static_cast<Vertex>(*a), static_cast<Vertex>(*b));
    if (eol == text.size()) break;
  }
  std::size_t n = declared_n ? *declared_n : (any_edge ? max_id + 1 : 0);
  return Graph(n, std::move(pairs));
}

inline Graph read_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open graph file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

/// Canonical form: header, then edges in id order.
inline std::string serialize_graph(const Graph& g) {
  std::string out = "n " + std::to_string(g.n()) + "\n";
  for (const auto& e : g.edges()) out += std::to_string(e.u) + " " + std::to_string(e.v) + "\n";
  return out;
}

/// Connected components as sorted vertex lists, ordered by smallest vertex.
inline std::vector<std::vector<Vertex>> connected_components(const Graph& g) {
  std::vector<std::vector<Vertex>> out;
  std::vector<char> seen(g.n(), 0);
  for (Vertex s = 0; s < g.n(); ++s) {
    if (seen[s]) continue;
    std::vector<Vertex> comp{s};
    seen[s] = 1;
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (auto inc : g.neighbors(comp[i]))
        if (!seen[inc.neighbor]) {
          seen[inc.neighbor] = 1;
          comp.push_back(inc.neighbor);
        }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

/// Induced subgraph on `keep` (need not be sorted). `original[i]` maps new
/// vertex i back; new ids follow increasing original id.
struct InducedSubgraph {
  Graph graph;
  std::vector<Vertex> original;
  std::vector<EdgeId> original_edge;  // new edge id -> edge id in the parent graph
};

inline InducedSubgraph induced_subgraph(const Graph& g, std::vector<Vertex> keep) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  std::vector<Vertex> relabel(g.n(), kNoVertex);
  for (Vertex i = 0; i < keep.size(); ++i) relabel[keep[i]] = i;
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (const auto& e : g.edges())
    if (relabel[e.u] != kNoVertex && relabel[e.v] != kNoVertex) pairs.emplace_back(relabel[e.u], relabel[e.v]);
  InducedSubgraph out{Graph(keep.size(), std::move(pairs)), keep, {}};
  out.original_edge.reserve(out.graph.m());
  for (const auto& e : out.graph.edges()) out.original_edge.push_back(g.require_edge(keep[e.u], keep[e.v]));
  return out;
}

}  // namespace matchwalk
