#pragma once

#include <cstdint>
#include <vector>

#include "matchwalk/error.hpp"
#include "matchwalk/graph.hpp"
#include "matchwalk/matching.hpp"
#include "matchwalk/rng.hpp"
#include "matchwalk/state_space.hpp"

namespace matchwalk {

struct WalkConfig {
  std::size_t k = 0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  Matching initial;
};

namespace detail {

/// Proposal (e, e') applied to a walker that tracks vertex coverage.
/// Returns true when the exchange was accepted.
inline bool propose(const Graph& g, std::vector<EdgeId>& edges, std::vector<char>& covered, std::size_t pick,
                    EdgeId add) {
  EdgeId remove = edges[pick];
  if (add == remove) return false;
  const Edge& a = g.edge(add);
  const Edge& r = g.edge(remove);
  // After removing `remove`, both endpoints of `add` must be free.
  bool u_free = !covered[a.u] || r.touches(a.u);
  bool v_free = !covered[a.v] || r.touches(a.v);
  if (!u_free || !v_free) return false;
  covered[r.u] = covered[r.v] = 0;
  covered[a.u] = covered[a.v] = 1;
  edges[pick] = add;
  return true;
}

}  // namespace detail

/// One down-up move: e uniform over M, e' uniform over E(G); move to
/// M ∪ {e'} \ {e} when that is a matching of size |M|, else stay.
inline Matching step(const Graph& g, const Matching& m, CounterRng& rng) {
  if (m.empty()) throw PreconditionError("down-up step needs a non-empty matching");
  if (!is_matching(g, m)) throw PreconditionError("step: state is not a matching");
  std::vector<EdgeId> edges(m.begin(), m.end());
  std::vector<char> covered(g.n(), 0);
  for (EdgeId e : edges) covered[g.edge(e).u] = covered[g.edge(e).v] = 1;
  std::size_t pick = rng.below(edges.size());
  auto add = static_cast<EdgeId>(rng.below(g.m()));
  if (detail::propose(g, edges, covered, pick, add)) return Matching(std::move(edges));
  return m;
}

/// Sequential walker with O(1) moves; `state()` materializes the sorted matching.
class Walker {
 public:
  Walker(const Graph& g, const Matching& start, std::uint64_t seed)
      : g_(&g), edges_(start.begin(), start.end()), covered_(g.n(), 0), rng_(seed) {
    if (!is_matching(g, start)) throw PreconditionError("walker start is not a matching");
    if (start.empty()) throw PreconditionError("down-up walk needs k >= 1");
    for (EdgeId e : edges_) covered_[g.edge(e).u] = covered_[g.edge(e).v] = 1;
  }

  bool advance() {
    std::size_t pick = rng_.below(edges_.size());
    auto add = static_cast<EdgeId>(rng_.below(g_->m()));
    return detail::propose(*g_, edges_, covered_, pick, add);
  }

  Matching state() const { return Matching(edges_); }
  EdgeMask mask() const {
    EdgeMask out;
    for (EdgeId e : edges_) out.set(e);
    return out;
  }

 private:
  const Graph* g_;
  std::vector<EdgeId> edges_;
  std::vector<char> covered_;
  CounterRng rng_;
};

inline void validate(const Graph& g, const WalkConfig& cfg) {
  if (!is_matching(g, cfg.initial)) throw PreconditionError("initial state is not a matching");
  if (cfg.initial.size() != cfg.k) throw PreconditionError("initial matching size differs from k");
  if (cfg.k == 0) throw PreconditionError("down-up walk needs k >= 1");
}

/// Full trajectory, cfg.steps + 1 states starting with cfg.initial.
inline std::vector<Matching> run_trajectory(const Graph& g, const WalkConfig& cfg) {
  validate(g, cfg);
  Walker w(g, cfg.initial, cfg.seed);
  std::vector<Matching> out;
  out.reserve(cfg.steps + 1);
  out.push_back(cfg.initial);
  for (std::size_t t = 0; t < cfg.steps; ++t) {
    w.advance();
    out.push_back(w.state());
  }
  return out;
}

/// Final state after cfg.steps moves.
inline Matching run(const Graph& g, const WalkConfig& cfg) {
  validate(g, cfg);
  Walker w(g, cfg.initial, cfg.seed);
  for (std::size_t t = 0; t < cfg.steps; ++t) w.advance();
  return w.state();
}

struct EmpiricalDistribution {
  std::vector<Matching> states;     // canonical Ω order
  std::vector<double> frequency;    // sums to 1
  std::vector<std::uint64_t> counts;
};

/// Frequencies over enumerate_matchings(G, k) order from one walker started
/// at the first state of Ω: burn_in moves, then one sample every `stride` moves.
inline EmpiricalDistribution empirical_distribution(const Graph& g, std::size_t k, std::size_t n_samples,
                                                    std::size_t burn_in, std::size_t stride, std::uint64_t seed,
                                                    std::size_t budget = kDefaultStateBudget) {
  if (stride == 0) throw PreconditionError("stride must be positive");
  StateSpace space(g, k, budget);
  EmpiricalDistribution out;
  out.states.reserve(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) out.states.push_back(space.matching(i));
  out.counts.assign(space.size(), 0);
  Walker w(g, out.states.front(), seed);
  for (std::size_t t = 0; t < burn_in; ++t) w.advance();
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (std::size_t t = 0; t < stride; ++t) w.advance();
    ++out.counts[*space.find(w.mask())];
  }
  out.frequency.resize(space.size());
  for (std::size_t i = 0; i < space.size(); ++i)
    out.frequency[i] = n_samples ? static_cast<double>(out.counts[i]) / static_cast<double>(n_samples) : 0.0;
  return out;
}

}  // namespace matchwalk
