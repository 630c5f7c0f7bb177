#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "matchwalk/graph.hpp"
#include "matchwalk/rng.hpp"

namespace matchwalk::generators {

/// Path on `vertices` vertices (vertices - 1 edges).
inline Graph path(std::size_t vertices) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i + 1 < vertices; ++i) e.emplace_back(i, i + 1);
  return Graph(vertices, std::move(e));
}

inline Graph cycle(std::size_t vertices) {
  if (vertices < 3) throw PreconditionError("cycle needs at least 3 vertices");
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < vertices; ++i) e.emplace_back(i, static_cast<Vertex>((i + 1) % vertices));
  return Graph(vertices, std::move(e));
}

inline Graph complete(std::size_t vertices) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < vertices; ++i)
    for (Vertex j = i + 1; j < vertices; ++j) e.emplace_back(i, j);
  return Graph(vertices, std::move(e));
}

/// `count` disjoint edges (2i, 2i+1): the Bernoulli-Laplace instance.
inline Graph disjoint_edges(std::size_t count) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < count; ++i) e.emplace_back(2 * i, 2 * i + 1);
  return Graph(2 * count, std::move(e));
}

inline Graph disjoint_union(const Graph& a, const Graph& b) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (const auto& x : a.edges()) e.emplace_back(x.u, x.v);
  auto shift = static_cast<Vertex>(a.n());
  for (const auto& x : b.edges()) e.emplace_back(x.u + shift, x.v + shift);
  return Graph(a.n() + b.n(), std::move(e));
}

inline Graph petersen() {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);
    e.emplace_back(i, i + 5);
    e.emplace_back(5 + i, 5 + (i + 2) % 5);
  }
  return Graph(10, std::move(e));
}

/// 2 x r grid: vertices (0,i) = i, (1,i) = r + i.
inline Graph ladder(std::size_t rungs) {
  std::vector<std::pair<Vertex, Vertex>> e;
  auto r = static_cast<Vertex>(rungs);
  for (Vertex i = 0; i < r; ++i) {
    e.emplace_back(i, r + i);
    if (i + 1 < r) {
      e.emplace_back(i, i + 1);
      e.emplace_back(r + i, r + i + 1);
    }
  }
  return Graph(2 * rungs, std::move(e));
}

/// Prism C_r x K_2 (cubic for r >= 3).
inline Graph prism(std::size_t r) {
  std::vector<std::pair<Vertex, Vertex>> e;
  auto rr = static_cast<Vertex>(r);
  for (Vertex i = 0; i < rr; ++i) {
    e.emplace_back(i, (i + 1) % rr);
    e.emplace_back(rr + i, rr + (i + 1) % rr);
    e.emplace_back(i, rr + i);
  }
  return Graph(2 * r, std::move(e));
}

inline Graph hypercube(unsigned dim) {
  std::vector<std::pair<Vertex, Vertex>> e;
  Vertex n = Vertex{1} << dim;
  for (Vertex v = 0; v < n; ++v)
    for (unsigned b = 0; b < dim; ++b)
      if (!(v >> b & 1)) e.emplace_back(v, v | (Vertex{1} << b));
  return Graph(n, std::move(e));
}

/// Erdos-Renyi G(n, p); deterministic per seed.
inline Graph random_gnp(std::size_t vertices, double p, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < vertices; ++i)
    for (Vertex j = i + 1; j < vertices; ++j)
      if (rng.uniform01() < p) e.emplace_back(i, j);
  return Graph(vertices, std::move(e));
}

/// Uniform-ish d-regular simple graph via the configuration model with
/// restarts. Throws after `max_attempts` rejected pairings.
inline Graph random_regular(std::size_t vertices, std::size_t d, std::uint64_t seed,
                            int max_attempts = 10000) {
  if ((vertices * d) % 2 != 0 || d >= vertices)
    throw PreconditionError("no simple " + std::to_string(d) + "-regular graph on " +
                            std::to_string(vertices) + " vertices");
  CounterRng rng(seed);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Vertex> stubs;
    for (Vertex v = 0; v < vertices; ++v)
      for (std::size_t i = 0; i < d; ++i) stubs.push_back(v);
    for (std::size_t i = stubs.size(); i > 1; --i) std::swap(stubs[i - 1], stubs[rng.below(i)]);
    std::vector<std::pair<Vertex, Vertex>> e;
    bool ok = true;
    for (std::size_t i = 0; i < stubs.size() && ok; i += 2) {
      Vertex a = std::min(stubs[i], stubs[i + 1]), b = std::max(stubs[i], stubs[i + 1]);
      if (a == b) ok = false;
      for (auto& x : e)
        if (x.first == a && x.second == b) ok = false;
      e.emplace_back(a, b);
    }
    if (ok) return Graph(vertices, std::move(e));
  }
  throw PreconditionError("random_regular: no simple pairing found");
}

}  // namespace matchwalk::generators
