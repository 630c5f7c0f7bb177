#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "matchwalk/blossom.hpp"
#include "matchwalk/error.hpp"
#include "matchwalk/exact.hpp"
#include "matchwalk/graph.hpp"
#include "matchwalk/matching.hpp"
#include "matchwalk/rational.hpp"
#include "matchwalk/rng.hpp"
#include "matchwalk/state_space.hpp"

namespace matchwalk {

enum class CoreKind : std::uint8_t { kC4Union, kCycle, kCustom };

struct VertexRange {
  Vertex begin = 0, end = 0;
  std::size_t size() const { return end - begin; }
  bool contains(Vertex v) const { return begin <= v && v < end; }
};

/// Disjoint 10-vertex paths, each carrying its 4 interior alternating edges,
/// next to a core with a perfect matching.
struct GadgetGraph {
  Graph graph;
  std::vector<VertexRange> p9_blocks;
  VertexRange core;
  Matching M;
  Rational delta;
  std::size_t n = 0;
  CoreKind core_kind = CoreKind::kC4Union;
  std::vector<VertexRange> c4_blocks;  // only for kC4Union

  // For each position in M: the P9 block it lies in, or -1 for the core.
  std::vector<int> m_block;
  // For each position in M: the C4 it lies in, or -1.
  std::vector<int> m_c4;
};

namespace detail {

inline std::size_t p9_block_count(std::size_t n, const Rational& delta) {
  const Rational b = delta * n / 2;
  return denominator(b) == 1 ? static_cast<std::size_t>(numerator(b)) : static_cast<std::size_t>(-1);
}

inline bool gadget_size_valid(std::size_t n, const Rational& delta, CoreKind kind) {
  const std::size_t blocks = p9_block_count(n, delta);
  if (blocks == static_cast<std::size_t>(-1) || 10 * blocks > n) return false;
  const std::size_t core = n - 10 * blocks;
  if (kind == CoreKind::kC4Union) return core % 4 == 0;
  if (kind == CoreKind::kCycle) return core % 2 == 0 && (core == 0 || core >= 4);
  return true;
}

inline std::size_t nearest_valid_gadget_size(std::size_t n, const Rational& delta, CoreKind kind) {
  for (std::size_t d = 1; d < 100000; ++d) {
    if (n > d && gadget_size_valid(n - d, delta, kind)) return n - d;
    if (gadget_size_valid(n + d, delta, kind)) return n + d;
  }
  return 0;
}

inline void add_p9_blocks(std::size_t blocks, std::vector<std::pair<Vertex, Vertex>>& pairs,
                          std::vector<VertexRange>& ranges) {
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto base = static_cast<Vertex>(10 * b);
    ranges.push_back({base, base + 10});
    for (Vertex i = 0; i < 9; ++i) pairs.emplace_back(base + i, base + i + 1);
  }
}

inline GadgetGraph finish_gadget(std::size_t n, const Rational& delta, CoreKind kind,
                                 std::vector<std::pair<Vertex, Vertex>> pairs, std::vector<VertexRange> blocks,
                                 VertexRange core, std::vector<std::pair<Vertex, Vertex>> core_matching,
                                 std::vector<VertexRange> c4s) {
  GadgetGraph gg;
  gg.graph = Graph(n, std::move(pairs));
  gg.p9_blocks = std::move(blocks);
  gg.core = core;
  gg.delta = delta;
  gg.n = n;
  gg.core_kind = kind;
  gg.c4_blocks = std::move(c4s);

  std::vector<EdgeId> ids;
  for (const auto& r : gg.p9_blocks)
    for (Vertex i = 1; i < 9; i += 2) ids.push_back(gg.graph.require_edge(r.begin + i, r.begin + i + 1));
  for (auto [a, b] : core_matching) ids.push_back(gg.graph.require_edge(a, b));
  gg.M = Matching(ids);
  if (!is_matching(gg.graph, gg.M)) throw PreconditionError("build_gadget: core matching is not a matching");

  for (EdgeId e : gg.M) {
    const Vertex u = gg.graph.edge(e).u;
    int block = -1, c4 = -1;
    if (u < core.begin) block = static_cast<int>(u / 10);
    for (std::size_t c = 0; c < gg.c4_blocks.size(); ++c)
      if (gg.c4_blocks[c].contains(u)) c4 = static_cast<int>(c);
    gg.m_block.push_back(block);
    gg.m_c4.push_back(c4);
  }
  return gg;
}

}  // namespace detail

/// Builds the gadget on n vertices: δn/2 P9 blocks followed by a core of
/// (1 − 5δ)n vertices, either disjoint C4s or one even cycle.
inline GadgetGraph build_gadget(std::size_t n, const Rational& delta, CoreKind kind = CoreKind::kC4Union) {
  if (delta <= 0 || delta >= Rational(1, 5)) throw PreconditionError("build_gadget: delta must lie in (0, 1/5)");
  if (kind == CoreKind::kCustom) throw PreconditionError("build_gadget: pass the custom core graph explicitly");
  if (!detail::gadget_size_valid(n, delta, kind))
    throw PreconditionError("build_gadget: n = " + std::to_string(n) + " gives non-integral block counts; nearest valid n is " +
                            std::to_string(detail::nearest_valid_gadget_size(n, delta, kind)));
  const std::size_t blocks = detail::p9_block_count(n, delta);
  std::vector<std::pair<Vertex, Vertex>> pairs;
  std::vector<VertexRange> ranges;
  detail::add_p9_blocks(blocks, pairs, ranges);

  const auto base = static_cast<Vertex>(10 * blocks);
  const std::size_t core_size = n - base;
  std::vector<std::pair<Vertex, Vertex>> core_m;
  std::vector<VertexRange> c4s;
  if (kind == CoreKind::kC4Union) {
    for (std::size_t c = 0; c < core_size / 4; ++c) {
      const auto v = static_cast<Vertex>(base + 4 * c);
      c4s.push_back({v, v + 4});
      pairs.insert(pairs.end(), {{v, v + 1}, {v + 1, v + 2}, {v + 2, v + 3}, {v, v + 3}});
      core_m.insert(core_m.end(), {{v, v + 1}, {v + 2, v + 3}});
    }
  } else if (core_size > 0) {
    for (Vertex i = 0; i < core_size; ++i)
      pairs.emplace_back(base + i, base + static_cast<Vertex>((i + 1) % core_size));
    for (Vertex i = 0; i < core_size; i += 2) core_m.emplace_back(base + i, base + i + 1);
  }
  return detail::finish_gadget(n, delta, kind, std::move(pairs), std::move(ranges),
                               {base, static_cast<Vertex>(n)}, std::move(core_m), std::move(c4s));
}

/// Gadget with an arbitrary core graph; its perfect matching comes from the
/// blossom algorithm.
inline GadgetGraph build_gadget(std::size_t n, const Rational& delta, const Graph& core) {
  if (delta <= 0 || delta >= Rational(1, 5)) throw PreconditionError("build_gadget: delta must lie in (0, 1/5)");
  const std::size_t blocks = detail::p9_block_count(n, delta);
  if (blocks == static_cast<std::size_t>(-1) || 10 * blocks + core.n() != n)
    throw PreconditionError("build_gadget: core must have n - 5δn vertices with δn/2 integral");
  auto pm = maximum_matching(core);
  if (2 * pm.size() != core.n()) throw PreconditionError("build_gadget: core graph has no perfect matching");

  std::vector<std::pair<Vertex, Vertex>> pairs;
  std::vector<VertexRange> ranges;
  detail::add_p9_blocks(blocks, pairs, ranges);
  const auto base = static_cast<Vertex>(10 * blocks);
  for (const auto& e : core.edges()) pairs.emplace_back(base + e.u, base + e.v);
  std::vector<std::pair<Vertex, Vertex>> core_m;
  for (EdgeId e : pm) core_m.emplace_back(base + core.edge(e).u, base + core.edge(e).v);
  return detail::finish_gadget(n, delta, CoreKind::kCustom, std::move(pairs), std::move(ranges),
                               {base, static_cast<Vertex>(n)}, std::move(core_m), {});
}

/// A pinning: a set of M-edges fixed in the matching.
struct Pinning {
  std::vector<EdgeId> tau;  // sorted edge ids of the gadget graph
  std::optional<double> lambda;
};

/// G minus every endpoint of τ, with the relabelling kept.
inline InducedSubgraph residual_graph(const Graph& g, const std::vector<EdgeId>& tau) {
  std::vector<char> removed(g.n(), 0);
  for (EdgeId e : tau) {
    if (e >= g.m()) throw PreconditionError("residual_graph: edge id out of range");
    const auto& ed = g.edge(e);
    if (removed[ed.u] || removed[ed.v]) throw PreconditionError("residual_graph: pinning is not a matching");
    removed[ed.u] = removed[ed.v] = 1;
  }
  std::vector<Vertex> keep;
  for (Vertex v = 0; v < g.n(); ++v)
    if (!removed[v]) keep.push_back(v);
  return induced_subgraph(g, std::move(keep));
}

/// Uniform subset of M of the given size; deterministic per seed.
inline Pinning random_pinning(const GadgetGraph& gg, std::size_t size, std::uint64_t seed) {
  if (size > gg.M.size())
    throw PreconditionError("random_pinning: size " + std::to_string(size) + " exceeds |M| = " + std::to_string(gg.M.size()));
  CounterRng rng(seed);
  std::vector<EdgeId> pool(gg.M.begin(), gg.M.end());
  for (std::size_t i = 0; i < size; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  pool.resize(size);
  std::sort(pool.begin(), pool.end());
  Pinning p{std::move(pool), std::nullopt};
  if (!gg.M.empty()) p.lambda = 1.0 - static_cast<double>(size) / static_cast<double>(gg.M.size());
  return p;
}

/// |τ| for λ: round((1 − λ)|M|).
inline std::size_t pin_size_for_lambda(const GadgetGraph& gg, double lambda) {
  if (!(lambda >= 0 && lambda <= 1)) throw PreconditionError("lambda must lie in [0, 1]");
  return static_cast<std::size_t>(std::llround((1.0 - lambda) * static_cast<double>(gg.M.size())));
}

struct SlackStatistics {
  std::size_t x_tau = 0;           // P9 blocks τ does not touch
  std::size_t m_star_residual = 0;
  std::size_t free_edges = 0;      // |M| − |τ|
  Rational ratio;                  // 1 − (|M| − |τ|) / m*(G_τ)
  bool degenerate = false;         // m*(G_τ) = 0, ratio set to 0
};

namespace detail {

inline std::vector<char> pinned_positions(const GadgetGraph& gg, const std::vector<EdgeId>& tau) {
  std::vector<char> pinned(gg.M.size(), 0);
  for (EdgeId e : tau) {
    auto it = std::lower_bound(gg.M.begin(), gg.M.end(), e);
    if (it == gg.M.end() || *it != e) throw PreconditionError("pinning contains an edge outside M");
    pinned[static_cast<std::size_t>(it - gg.M.begin())] = 1;
  }
  return pinned;
}

}  // namespace detail

/// Counts untouched P9 blocks, solves m*(G_τ) with the blossom algorithm and
/// checks m*(G_τ) = |M| − |τ| + X_τ. A mismatch throws CertifierFailure.
inline SlackStatistics slack_statistics(const GadgetGraph& gg, const Pinning& tau) {
  auto pinned = detail::pinned_positions(gg, tau.tau);
  std::vector<char> hit(gg.p9_blocks.size(), 0);
  for (std::size_t i = 0; i < pinned.size(); ++i)
    if (pinned[i] && gg.m_block[i] >= 0) hit[static_cast<std::size_t>(gg.m_block[i])] = 1;

  SlackStatistics s;
  s.x_tau = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 0));
  s.free_edges = gg.M.size() - tau.tau.size();
  s.m_star_residual = matching_number(residual_graph(gg.graph, tau.tau).graph);
  if (s.m_star_residual != s.free_edges + s.x_tau)
    throw CertifierFailure("slack identity fails: m*(G_τ) = " + std::to_string(s.m_star_residual) + " but |M| - |τ| + X_τ = " +
                           std::to_string(s.free_edges + s.x_tau));
  if (s.m_star_residual == 0) {
    s.degenerate = true;
    s.ratio = 0;
  } else {
    s.ratio = 1 - Rational(BigInt(s.free_edges), BigInt(s.m_star_residual));
  }
  return s;
}

/// E[X_τ] for a uniform τ ⊆ M of the given size: blocks · C(|M| − 4, s) / C(|M|, s).
inline Rational expected_avoidance(const GadgetGraph& gg, std::size_t tau_size) {
  const std::size_t m = gg.M.size();
  if (tau_size > m) throw PreconditionError("expected_avoidance: pin size exceeds |M|");
  if (m < 4 || tau_size > m - 4) return 0;
  return Rational(BigInt(gg.p9_blocks.size()) * binomial(m - 4, tau_size), binomial(m, tau_size));
}

/// Wilson score interval for a binomial proportion.
struct Interval {
  double lo = 0, hi = 0;
};

inline Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054) {
  if (trials == 0) return {0, 1};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1 + z * z / n;
  const double centre = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct ErgodicityTrial {
  std::uint64_t seed = 0;
  bool hits_every_p9 = false;
  std::optional<std::size_t> untouched_c4;
  bool certificate = false;  // both conditions hold: the walk on G_τ is not ergodic
  // Witness states in G_τ's edge ids: M \ τ, and the same with the untouched
  // C4's perfect matching swapped.
  Matching witness_x, witness_y;

  bool exact_checked = false;
  bool exact_ergodic = false;
  std::size_t exact_states = 0;
  bool agrees = true;  // certificate ⇒ exact check finds x, y in different components
};

struct ErgodicityReport {
  std::size_t tau_size = 0;
  std::vector<ErgodicityTrial> trials;
  std::size_t fired = 0;
  double frequency = 0;
  Interval interval;
  std::size_t exact_checked = 0;
  std::size_t disagreements = 0;
};

/// Random pinnings of size tau_size; per trial evaluates the structural
/// non-ergodicity certificate and, when |Ω_τ| ≤ exact_limit, the exact
/// connectivity of the walk on matchings of size |M| − |τ| in G_τ.
inline ErgodicityReport ergodicity_experiment(const GadgetGraph& gg, std::size_t tau_size, std::size_t trials,
                                              std::uint64_t seed, std::size_t exact_limit = kDefaultStateBudget) {
  if (gg.core_kind != CoreKind::kC4Union) throw PreconditionError("ergodicity_experiment: needs a C4-union core");
  ErgodicityReport rep;
  rep.tau_size = tau_size;
  const CounterRng root(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    ErgodicityTrial tr;
    tr.seed = root.split(t)();
    Pinning tau = random_pinning(gg, tau_size, tr.seed);
    auto pinned = detail::pinned_positions(gg, tau.tau);

    std::vector<char> block_hit(gg.p9_blocks.size(), 0), c4_hit(gg.c4_blocks.size(), 0);
    for (std::size_t i = 0; i < pinned.size(); ++i) {
      if (!pinned[i]) continue;
      if (gg.m_block[i] >= 0) block_hit[static_cast<std::size_t>(gg.m_block[i])] = 1;
      if (gg.m_c4[i] >= 0) c4_hit[static_cast<std::size_t>(gg.m_c4[i])] = 1;
    }
    tr.hits_every_p9 = std::all_of(block_hit.begin(), block_hit.end(), [](char c) { return c != 0; });
    if (auto it = std::find(c4_hit.begin(), c4_hit.end(), 0); it != c4_hit.end())
      tr.untouched_c4 = static_cast<std::size_t>(it - c4_hit.begin());
    tr.certificate = tr.hits_every_p9 && tr.untouched_c4.has_value();

    const auto res = residual_graph(gg.graph, tau.tau);
    std::vector<Vertex> to_residual(gg.n, kNoVertex);
    for (Vertex i = 0; i < res.original.size(); ++i) to_residual[res.original[i]] = i;
    auto local_edge = [&](Vertex a, Vertex b) { return res.graph.require_edge(to_residual[a], to_residual[b]); };

    std::vector<EdgeId> free_edges;
    for (std::size_t i = 0; i < pinned.size(); ++i)
      if (!pinned[i]) free_edges.push_back(local_edge(gg.graph.edge(gg.M[i]).u, gg.graph.edge(gg.M[i]).v));
    tr.witness_x = Matching(free_edges);
    if (tr.certificate) {
      const Vertex v = gg.c4_blocks[*tr.untouched_c4].begin;
      tr.witness_y = tr.witness_x.exchanged(local_edge(v, v + 1), local_edge(v + 1, v + 2))
                         .exchanged(local_edge(v + 2, v + 3), local_edge(v, v + 3));
    }

    if (res.graph.m() <= EdgeMask::kCapacity) {
      try {
        StateSpace omega(res.graph, free_edges.size(), exact_limit);
        auto erg = check_ergodicity(omega);
        tr.exact_checked = true;
        tr.exact_ergodic = erg.ergodic;
        tr.exact_states = omega.size();
        if (tr.certificate) {
          auto ix = omega.find(to_mask(tr.witness_x));
          auto iy = omega.find(to_mask(tr.witness_y));
          auto component_of = [&](std::uint32_t st) {
            for (std::size_t c = 0; c < erg.components.size(); ++c)
              if (std::binary_search(erg.components[c].begin(), erg.components[c].end(), st)) return c;
            return erg.components.size();
          };
          tr.agrees = !erg.ergodic && ix && iy && component_of(*ix) != component_of(*iy);
        }
      } catch (const BudgetExceeded&) {
      }
    }
    rep.fired += tr.certificate;
    rep.exact_checked += tr.exact_checked;
    rep.disagreements += tr.agrees ? 0 : 1;
    rep.trials.push_back(std::move(tr));
  }
  rep.frequency = trials ? static_cast<double>(rep.fired) / static_cast<double>(trials) : 0;
  rep.interval = wilson_interval(rep.fired, trials);
  return rep;
}

/// Mean slack ratio per λ and the log-log slope against λ.
struct SlackTrendPoint {
  double lambda = 0;
  std::size_t tau_size = 0;
  double mean_ratio = 0;
  double stderr_ratio = 0;
  double mean_x = 0;
  Rational expected_x;
};

struct SlackTrend {
  std::vector<SlackTrendPoint> points;
  double slope = 0;
  Interval slope_interval;  // ± 1.96 sd, delta method on log means
};

inline SlackTrend slack_trend(const GadgetGraph& gg, const std::vector<double>& lambdas, std::size_t trials,
                              std::uint64_t seed) {
  SlackTrend out;
  const CounterRng root(seed);
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    SlackTrendPoint pt;
    pt.lambda = lambdas[li];
    pt.tau_size = pin_size_for_lambda(gg, pt.lambda);
    pt.expected_x = expected_avoidance(gg, pt.tau_size);
    const CounterRng stream = root.split(li);
    double sum = 0, sum2 = 0, sx = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      auto s = slack_statistics(gg, random_pinning(gg, pt.tau_size, stream.split(t)()));
      const double r = to_double(s.ratio);
      sum += r;
      sum2 += r * r;
      sx += static_cast<double>(s.x_tau);
    }
    const double n = static_cast<double>(trials);
    pt.mean_ratio = sum / n;
    pt.mean_x = sx / n;
    pt.stderr_ratio = trials > 1 ? std::sqrt(std::max(0.0, (sum2 - n * pt.mean_ratio * pt.mean_ratio) / (n - 1)) / n) : 0;
    out.points.push_back(pt);
  }

  std::vector<double> xs, ys, vs;
  for (const auto& p : out.points) {
    if (p.mean_ratio <= 0 || p.lambda <= 0) continue;
    xs.push_back(std::log(p.lambda));
    ys.push_back(std::log(p.mean_ratio));
    vs.push_back(std::pow(p.stderr_ratio / p.mean_ratio, 2));
  }
  if (xs.size() >= 2) {
    const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double sxx = 0;
    for (double x : xs) sxx += (x - xbar) * (x - xbar);
    double slope = 0, var = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double w = (xs[i] - xbar) / sxx;
      slope += w * ys[i];
      var += w * w * vs[i];
    }
    out.slope = slope;
    const double half = 1.959963984540054 * std::sqrt(var);
    out.slope_interval = {slope - half, slope + half};
  }
  return out;
}

}  // namespace matchwalk
