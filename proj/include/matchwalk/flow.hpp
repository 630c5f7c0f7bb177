#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "matchwalk/augmenting.hpp"
#include "matchwalk/error.hpp"
#include "matchwalk/rational.hpp"
#include "matchwalk/short_paths.hpp"
#include "matchwalk/state_space.hpp"
#include "matchwalk/sym_diff.hpp"

namespace matchwalk {

/// Which stage of the canonical-path construction produced a move.
enum class Phase : std::uint8_t {
  kEvenPath,     // even components of x ⊕ y
  kXAugmenting,  // the first x-augmenting path, minus its held edge
  kCycle,        // puncturing and processing cycles
  kYAugmenting,  // the first y-augmenting path, consuming the held edge
  kPair,         // remaining (x-augmenting, y-augmenting) pairs
  kBadPrefix,    // x -> x̃ prefix of a bad pair
};

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::kEvenPath: return "even-path";
    case Phase::kXAugmenting: return "x-aug";
    case Phase::kCycle: return "cycle";
    case Phase::kYAugmenting: return "y-aug";
    case Phase::kPair: return "pair";
    case Phase::kBadPrefix: return "bad-prefix";
  }
  return "?";
}

/// One down-up move M -> M ∪ {add} \ {remove}.
struct Exchange {
  EdgeId add;
  EdgeId remove;
  Phase phase;
};

enum class PairClass { kGood, kBad };

/// Bad iff x ⊕ y has a cycle and no odd path.
inline PairClass classify_pair(const DiffDecomposition& d) {
  return (!d.cycles.empty() && d.odd_paths() == 0) ? PairClass::kBad : PairClass::kGood;
}

inline PairClass classify_pair(const Graph& g, const Matching& x, const Matching& y) {
  if (x.size() != y.size()) throw PreconditionError("classify_pair: matchings differ in size");
  return classify_pair(symmetric_difference(g, x, y));
}

namespace detail {

// Process an even path given as e1, e2, ..., e2l with e1 to be added.
template <class It>
void process_even(It first, It last, Phase phase, std::vector<Exchange>& out) {
  for (; first != last; first += 2) out.push_back({*first, *(first + 1), phase});
}

// x-augmenting path minus the edge at its distinguished endpoint, from the
// far end; returns the held edge e*.
inline EdgeId process_x_augmenting(const DiffComponent& p, Phase phase, std::vector<Exchange>& out) {
  process_even(p.edges.rbegin(), p.edges.rend() - 1, phase, out);
  return p.edges.front();
}

// y-augmenting path minus its distinguished-endpoint edge (already removed).
inline void process_y_augmenting_rest(const DiffComponent& p, Phase phase, std::vector<Exchange>& out) {
  process_even(p.edges.begin() + 1, p.edges.end(), phase, out);
}

}  // namespace detail

/// Exchanges of the canonical path for a good pair and a choice of
/// orderings of its x-augmenting (sigma_x) and y-augmenting (sigma_y) paths.
inline std::vector<Exchange> good_path_exchanges(const DiffDecomposition& d, std::span<const std::size_t> sigma_x,
                                                 std::span<const std::size_t> sigma_y) {
  if (classify_pair(d) != PairClass::kGood) throw PreconditionError("good_path: pair is bad");
  const std::size_t j = d.j();
  if (d.y_augmenting.size() != j) throw PreconditionError("good_path: matchings differ in size");
  if (sigma_x.size() != j || sigma_y.size() != j) throw PreconditionError("good_path: permutation size differs from j");

  std::vector<Exchange> out;
  for (const auto& c : d.even_paths) {
    if (!c.in_x.front())
      detail::process_even(c.edges.begin(), c.edges.end(), Phase::kEvenPath, out);
    else
      detail::process_even(c.edges.rbegin(), c.edges.rend(), Phase::kEvenPath, out);
  }
  if (j == 0) return out;

  EdgeId held = detail::process_x_augmenting(d.x_augmenting[sigma_x[0]], Phase::kXAugmenting, out);

  for (const auto& c : d.cycles) {
    const std::size_t len = c.length();
    const bool first_in_x = c.in_x.front();
    EdgeId ex = first_in_x ? c.edges.front() : c.edges.back();
    EdgeId ey = first_in_x ? c.edges.back() : c.edges.front();
    out.push_back({held, ex, Phase::kCycle});
    if (first_in_x)
      detail::process_even(c.edges.begin() + 1, c.edges.begin() + static_cast<std::ptrdiff_t>(len - 1), Phase::kCycle, out);
    else
      detail::process_even(c.edges.rbegin() + 1, c.edges.rbegin() + static_cast<std::ptrdiff_t>(len - 1), Phase::kCycle, out);
    held = ey;
  }

  const auto& first_y = d.y_augmenting[sigma_y[0]];
  out.push_back({held, first_y.edges.front(), Phase::kYAugmenting});
  detail::process_y_augmenting_rest(first_y, Phase::kYAugmenting, out);

  for (std::size_t i = 1; i < j; ++i) {
    const auto& px = d.x_augmenting[sigma_x[i]];
    const auto& py = d.y_augmenting[sigma_y[i]];
    EdgeId e = detail::process_x_augmenting(px, Phase::kPair, out);
    out.push_back({e, py.edges.front(), Phase::kPair});
    detail::process_y_augmenting_rest(py, Phase::kPair, out);
  }
  return out;
}

/// A path in the transition graph H = (Ω, E(P)).
struct CanonicalPath {
  std::vector<Matching> states;  // states.front() = q⁻, states.back() = q⁺
  std::vector<Phase> phases;     // phases[i] labels states[i] -> states[i+1]
  Rational weight;

  std::size_t length() const { return phases.size(); }
};

namespace detail {

inline CanonicalPath realize(const StateSpace& omega, const Matching& start, const std::vector<Exchange>& moves) {
  CanonicalPath q;
  q.states.push_back(start);
  EdgeMask cur = to_mask(start);
  auto cur_id = omega.find(cur);
  if (!cur_id) throw CertifierFailure("path start " + to_string(start) + " is not in Ω");
  std::vector<std::uint32_t> seen{*cur_id};
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const auto& mv = moves[i];
    if (!cur.test(mv.remove) || cur.test(mv.add))
      throw CertifierFailure("step " + std::to_string(i) + " (" + to_string(mv.phase) + ") is not an exchange");
    EdgeMask next = cur;
    next.reset(mv.remove);
    next.set(mv.add);
    auto next_id = omega.find(next);
    if (!next_id)
      throw CertifierFailure("step " + std::to_string(i) + " (" + to_string(mv.phase) + ") leaves Ω at " +
                             to_string(to_matching(next)));
    if (omega.transition_id(*cur_id, *next_id) == StateSpace::kNoTransition)
      throw CertifierFailure("step " + std::to_string(i) + " is not a legal down-up move");
    if (std::find(seen.begin(), seen.end(), *next_id) != seen.end())
      throw CertifierFailure("step " + std::to_string(i) + " (" + to_string(mv.phase) + ") repeats state " +
                             to_string(to_matching(next)));
    seen.push_back(*next_id);
    q.states.push_back(to_matching(next));
    q.phases.push_back(mv.phase);
    cur = next;
    cur_id = next_id;
  }
  return q;
}

}  // namespace detail

inline Rational path_weight(std::size_t omega_size, std::size_t j) {
  BigInt f = factorial(static_cast<unsigned>(j));
  return Rational(BigInt(1), BigInt(omega_size) * omega_size * f * f);
}

/// Canonical path from x to y for a good pair, weighted 1/(|Ω|² (j!)²).
/// Throws CertifierFailure if the construction leaves Ω or repeats a state.
inline CanonicalPath good_path(const StateSpace& omega, const Matching& x, const Matching& y,
                               std::span<const std::size_t> sigma_x, std::span<const std::size_t> sigma_y) {
  auto d = symmetric_difference(omega.graph(), x, y);
  CanonicalPath q = detail::realize(omega, x, good_path_exchanges(d, sigma_x, sigma_y));
  if (q.states.back() != y) throw CertifierFailure("good path does not end at y");
  q.weight = path_weight(omega.size(), d.j());
  return q;
}

/// Canonical route from a bad pair (x, y) into the good pairs.
struct BadPairPrefix {
  std::vector<Vertex> augmenting_path;  // p, canonical short x-augmenting path
  EdgeId removed = 0;                   // e ∈ x⁺
  Matching x_plus;                      // x ⊕ p
  Matching x_tilde;                     // x⁺ \ e
  std::vector<Exchange> exchanges;      // x -> x̃
};

/// Edges e ∈ x⁺ for which (x⁺ \ e, y) is a good pair, in index order.
inline std::vector<EdgeId> admissible_removals(const Graph& g, const Matching& x_plus, const Matching& y) {
  std::vector<EdgeId> out;
  for (EdgeId e : x_plus) {
    std::vector<EdgeId> rest;
    for (EdgeId f : x_plus)
      if (f != e) rest.push_back(f);
    if (classify_pair(symmetric_difference(g, Matching(std::move(rest)), y)) == PairClass::kGood) out.push_back(e);
  }
  return out;
}

/// Prefix x -> x̃ for augmenting path p and removed edge e ∈ x ⊕ p.
inline BadPairPrefix bad_pair_prefix_with(const Graph& g, const Matching& x, std::vector<Vertex> p, EdgeId e) {
  BadPairPrefix out;
  out.augmenting_path = std::move(p);
  auto edges = path_edges(g, out.augmenting_path);
  out.x_plus = symmetric_difference_set(x, Matching(edges));
  if (!is_matching(g, out.x_plus) || out.x_plus.size() != x.size() + 1)
    throw PreconditionError("bad_pair_prefix: path is not x-augmenting");
  if (!out.x_plus.contains(e)) throw PreconditionError("bad_pair_prefix: removed edge is not in x ⊕ p");
  out.removed = e;
  std::vector<EdgeId> rest;
  for (EdgeId f : out.x_plus)
    if (f != e) rest.push_back(f);
  out.x_tilde = Matching(std::move(rest));

  // p is oriented with its distinguished (smaller) endpoint first; the edge
  // there is held while the rest is processed from the far end.
  EdgeId held = edges.front();
  detail::process_even(edges.rbegin(), edges.rend() - 1, Phase::kBadPrefix, out.exchanges);
  if (e != held) out.exchanges.push_back({held, e, Phase::kBadPrefix});
  return out;
}

/// Canonical prefix: p is the canonical short x-augmenting path and e the
/// lowest-index edge of x⁺ with (x⁺ \ e, y) good.
inline BadPairPrefix bad_pair_prefix(const Graph& g, const Matching& x, const Matching& y, const Rational& delta) {
  if (classify_pair(g, x, y) != PairClass::kBad) throw PreconditionError("bad_pair_prefix: pair is good");
  auto p = find_short_augmenting_path(g, x, delta);
  auto x_plus = flip_path(g, x, p);
  auto choices = admissible_removals(g, x_plus, y);
  if (choices.empty())
    throw CertifierFailure("bad pair " + to_string(x) + " -> " + to_string(y) + ": no edge e ∈ x⁺ makes (x̃, y) good");
  return bad_pair_prefix_with(g, x, std::move(p), choices.front());
}

/// Result of the η_g encoding at transition t = (z, z').
struct EtaGImage {
  Matching m;                // q⁻ ⊕ q⁺ ⊕ (z ∪ z')
  std::vector<Vertex> path;  // canonical short m-augmenting path
  Matching image;            // m ⊕ path, an element of Ω
};

inline Matching union_set(const Matching& a, const Matching& b) {
  std::vector<EdgeId> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Matching(std::move(out));
}

/// η_g(q) at t = (z, z'). Throws CertifierFailure when m is not a matching of
/// size k − 1 or m ⊕ p is not a matching of size k.
inline EtaGImage encoding_eta_g(const Graph& g, const Matching& q_minus, const Matching& q_plus, const Matching& z,
                                const Matching& z_prime, const Rational& delta) {
  EtaGImage out;
  out.m = symmetric_difference_set(symmetric_difference_set(q_minus, q_plus), union_set(z, z_prime));
  if (!is_matching(g, out.m) || out.m.size() + 1 != z.size())
    throw CertifierFailure("η_g: q⁻ ⊕ q⁺ ⊕ (z ∪ z') = " + to_string(out.m) + " is not a matching of size k - 1");
  out.path = find_short_augmenting_path(g, out.m, delta);
  out.image = flip_path(g, out.m, out.path);
  if (!is_matching(g, out.image) || out.image.size() != z.size())
    throw CertifierFailure("η_g: m ⊕ p is not a matching of size k");
  return out;
}

inline EtaGImage encoding_eta_g(const Graph& g, const CanonicalPath& q, std::size_t step, const Rational& delta) {
  if (step >= q.length()) throw PreconditionError("encoding_eta_g: transition index outside the path");
  return encoding_eta_g(g, q.states.front(), q.states.back(), q.states[step], q.states[step + 1], delta);
}

/// Inverse direction: from (m ⊕ p, p) and t recover q⁻ ⊕ q⁺.
inline Matching decode_eta_g(const Graph& g, const Matching& image, const std::vector<Vertex>& path, const Matching& z,
                             const Matching& z_prime) {
  Matching m = flip_path(g, image, path);
  return symmetric_difference_set(m, union_set(z, z_prime));
}

/// How a bad pair picks the edge e removed from x⁺.
enum class RemovalRule : std::uint8_t {
  kLowestIndex,  // lowest-index admissible e
  kFirstSimple,  // lowest-index admissible e whose prefixed paths are all simple
};

struct FlowOptions {
  RemovalRule removal = RemovalRule::kFirstSimple;
  std::size_t path_budget = 10'000'000;
  std::size_t state_budget = kDefaultStateBudget;
};

/// Exact per-transition accounting of the canonical flow.
struct FlowSummary {
  std::size_t n = 0, m = 0, k = 0, omega_size = 0;
  Rational delta;

  std::size_t good_pairs = 0, bad_pairs = 0;
  std::size_t rerouted_bad_pairs = 0;  // e differs from the lowest-index admissible edge
  std::size_t invalid_paths = 0;       // paths that leave Ω, repeat a state or miss y
  std::size_t path_count = 0;
  std::size_t max_j = 0;
  std::size_t ell = 0;  // longest positive-flow path

  // Directed transitions of E(P) (off-diagonal), in StateSpace CSR order.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> transitions;
  // Σ f(q) over paths through each transition, split by how the path uses it:
  // good pairs (g), good part of a bad pair (b), bad-pair prefix (a).
  std::vector<Rational> flow_g, flow_b, flow_a;

  Rational rho;                                             // max_t f(t) / (π(x) P(x,y))
  std::size_t worst_transition = StateSpace::kNoTransition;  // argmax of rho

  bool pair_demand_check = true;  // Σ_{q ∈ Q_xy} f(q) = 1/|Ω|² for every pair
  std::size_t demand_violations = 0;

  // η_g: classes are the paths through t sharing q⁻ ⊕ q⁺ (equivalently m).
  std::size_t eta_g_classes = 0;
  Rational eta_g_max_class_ratio;  // max count / (j!)²
  bool eta_g_class_bound = true;    // count ≤ 2 (j!)² everywhere
  // Whether m is a matching of size k − 1 with m ⊕ p ∈ Ω for every class.
  // Reported, not required: class counts above do not depend on it.
  bool eta_g_matching = true;
  std::size_t eta_g_matching_exceptions = 0;
  // η_a: classes (t, q⁺, p) must share q⁻.
  std::size_t eta_a_classes = 0;
  bool eta_a_endpoints = true;

  std::vector<std::string> failures;     // structural problems with the path family
  std::vector<std::string> diagnostics;  // first few η_g matching exceptions

  Rational flow(std::size_t tid) const { return flow_g[tid] + flow_b[tid] + flow_a[tid]; }
};

namespace detail {

struct MaskLess {
  bool operator()(const EdgeMask& a, const EdgeMask& b) const {
    return a.w[1] != b.w[1] ? a.w[1] < b.w[1] : a.w[0] < b.w[0];
  }
};

class FlowBuilder {
 public:
  FlowBuilder(const StateSpace& omega, const Rational& delta, const FlowOptions& opt)
      : omega_(omega), g_(omega.graph()), delta_(delta), opt_(opt), cutoff_(short_path_cutoff(delta)) {}

  FlowSummary run() {
    const std::size_t N = omega_.size();
    s_.n = g_.n();
    s_.m = g_.m();
    s_.k = omega_.k();
    s_.omega_size = N;
    s_.delta = delta_;
    s_.transitions.reserve(omega_.transition_count());
    for (std::uint32_t x = 0; x < N; ++x)
      for (auto y : omega_.neighbors(x)) s_.transitions.emplace_back(x, y);

    plan();
    counts_.assign(3, std::vector<std::uint64_t>(omega_.transition_count() * (s_.max_j + 1), 0));
    run_good_pairs();
    run_bad_pairs();
    finish();
    return std::move(s_);
  }

 private:
  enum Group { kG = 0, kB = 1, kA = 2 };

  struct BadPlan {
    std::uint32_t x, y;
    BadPairPrefix prefix;
    std::uint32_t path_id;
  };

  const std::vector<Vertex>& augmenting_path_of(const EdgeMask& m) {
    auto it = aug_cache_.find(m);
    if (it != aug_cache_.end()) return it->second;
    // Throws PreconditionError when k > (1 - delta) m*(G).
    auto p = find_short_augmenting_path(g_, to_matching(m), delta_);
    return aug_cache_.emplace(m, std::move(p)).first->second;
  }

  std::uint32_t intern_path(const std::vector<Vertex>& p) {
    auto [it, fresh] = path_ids_.try_emplace(p, static_cast<std::uint32_t>(path_ids_.size()));
    return it->second;
  }

  static std::uint64_t perms_squared(std::size_t j) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= j; ++i) f *= i;
    return f * f;
  }

  void fail(std::string what) {
    if (s_.failures.size() < 50) s_.failures.push_back(std::move(what));
  }

  // Classify every pair, size the path family, prepare bad-pair prefixes.
  void plan() {
    const std::size_t N = omega_.size();
    std::size_t total = 0, worst_j = 0;
    std::pair<std::uint32_t, std::uint32_t> worst_pair{0, 0};
    for (std::uint32_t x = 0; x < N; ++x) {
      for (std::uint32_t y = 0; y < N; ++y) {
        const EdgeMask& mx = omega_.state(x);
        const EdgeMask& my = omega_.state(y);
        std::size_t j = 0;
        if (x != y) {
          auto d = symmetric_difference(g_, mx, my);
          if (classify_pair(d) == PairClass::kGood) {
            good_.push_back({mx ^ my, x, y});
            j = d.j();
            ++s_.good_pairs;
          } else {
            ++s_.bad_pairs;
            auto plan = plan_bad_pair(x, y);
            if (!plan) continue;
            j = symmetric_difference(g_, plan->prefix.x_tilde, to_matching(my)).j();
            bad_.push_back(std::move(*plan));
          }
        } else {
          ++s_.good_pairs;
        }
        total += perms_squared(j);
        s_.max_j = std::max(s_.max_j, j);
        if (j > worst_j) {
          worst_j = j;
          worst_pair = {x, y};
        }
        if (total > opt_.path_budget)
          throw BudgetExceeded("flow path budget of " + std::to_string(opt_.path_budget) +
                                   " exceeded; largest j = " + std::to_string(worst_j) + " at pair " +
                                   to_string(omega_.matching(worst_pair.first)) + " -> " +
                                   to_string(omega_.matching(worst_pair.second)),
                               total);
      }
    }
    std::sort(good_.begin(), good_.end(),
              [](const GoodPair& a, const GoodPair& b) { return MaskLess{}(a.diff, b.diff); });
  }

  struct Walk {
    std::uint32_t tid;
    bool prefix;
  };

  template <class F>
  static void for_each_ordering(std::size_t j, F&& f) {
    std::vector<std::size_t> sx(j), sy(j);
    std::iota(sx.begin(), sx.end(), 0);
    do {
      std::iota(sy.begin(), sy.end(), 0);
      do {
        f(std::span<const std::size_t>(sx), std::span<const std::size_t>(sy));
      } while (std::next_permutation(sy.begin(), sy.end()));
    } while (std::next_permutation(sx.begin(), sx.end()));
  }

  std::optional<BadPlan> plan_bad_pair(std::uint32_t x, std::uint32_t y) {
    const Matching mx = omega_.matching(x);
    const Matching my = omega_.matching(y);
    const auto& p = augmenting_path_of(omega_.state(x));
    const auto choices = admissible_removals(g_, flip_path(g_, mx, p), my);
    if (choices.empty()) {
      s_.pair_demand_check = false;
      ++s_.demand_violations;
      fail("bad pair " + std::to_string(x) + "->" + std::to_string(y) + ": no edge e ∈ x⁺ makes (x̃, y) good");
      return std::nullopt;
    }
    BadPlan plan{x, y, bad_pair_prefix_with(g_, mx, p, choices.front()), intern_path(p)};
    if (opt_.removal == RemovalRule::kFirstSimple) {
      std::vector<Walk> scratch;
      for (EdgeId e : choices) {
        auto prefix = bad_pair_prefix_with(g_, mx, p, e);
        auto d = symmetric_difference(g_, prefix.x_tilde, my);
        bool ok = true;
        for_each_ordering(d.j(), [&](auto sx, auto sy) {
          if (!ok) return;
          auto moves = prefix.exchanges;
          auto rest = good_path_exchanges(d, sx, sy);
          moves.insert(moves.end(), rest.begin(), rest.end());
          ok = walk(x, y, moves, scratch, /*quiet=*/true);
        });
        if (ok) {
          if (e != choices.front()) ++s_.rerouted_bad_pairs;
          plan.prefix = std::move(prefix);
          break;
        }
      }
    }
    return plan;
  }

  // Walk the exchanges from x, checking Ω-membership, legality and simplicity.
  bool walk(std::uint32_t x, std::uint32_t y, const std::vector<Exchange>& moves, std::vector<Walk>& out,
            bool quiet = false) {
    out.clear();
    EdgeMask cur = omega_.state(x);
    std::uint32_t cur_id = x;
    visited_.assign(1, x);
    for (std::size_t i = 0; i < moves.size(); ++i) {
      const auto& mv = moves[i];
      if (!cur.test(mv.remove) || cur.test(mv.add)) {
        if (!quiet) fail("pair " + std::to_string(x) + "->" + std::to_string(y) + ": step " + std::to_string(i) +
             " is not an exchange");
        return false;
      }
      cur.reset(mv.remove);
      cur.set(mv.add);
      auto next = omega_.find(cur);
      if (!next) {
        if (!quiet) fail("pair " + std::to_string(x) + "->" + std::to_string(y) + ": step " + std::to_string(i) + " (" +
             to_string(mv.phase) + ") leaves Ω");
        return false;
      }
      std::size_t tid = omega_.transition_id(cur_id, *next);
      if (tid == StateSpace::kNoTransition) {
        if (!quiet) fail("pair " + std::to_string(x) + "->" + std::to_string(y) + ": illegal move");
        return false;
      }
      if (std::find(visited_.begin(), visited_.end(), *next) != visited_.end()) {
        if (!quiet) fail("pair " + std::to_string(x) + "->" + std::to_string(y) + ": step " + std::to_string(i) + " (" +
             to_string(mv.phase) + ") repeats a state");
        return false;
      }
      visited_.push_back(*next);
      out.push_back({static_cast<std::uint32_t>(tid), mv.phase == Phase::kBadPrefix});
      cur_id = *next;
    }
    if (cur_id != y) {
      if (!quiet) fail("pair " + std::to_string(x) + "->" + std::to_string(y) + ": path ends elsewhere");
      return false;
    }
    return true;
  }

  void check_demand(std::uint32_t x, std::uint32_t y, std::uint64_t paths, std::size_t j) {
    const BigInt N = omega_.size();
    BigInt f = factorial(static_cast<unsigned>(j));
    Rational routed(BigInt(paths), N * N * f * f);
    if (routed != Rational(BigInt(1), N * N)) {
      s_.pair_demand_check = false;
      ++s_.demand_violations;
      fail("pair " + std::to_string(x) + "->" + std::to_string(y) + " routes " + to_string(routed));
    }
  }

  void run_good_pairs() {
    const std::size_t N = omega_.size();
    const std::size_t stride = s_.max_j + 1;
    // x = y: the empty path carries the whole demand.
    s_.path_count += N;
    std::vector<std::size_t> sx, sy;
    std::vector<Walk> steps;
    std::unordered_map<std::uint32_t, std::uint32_t> class_count;  // tid -> paths, for the current q⁻ ⊕ q⁺

    for (std::size_t lo = 0; lo < good_.size();) {
      std::size_t hi = lo;
      while (hi < good_.size() && good_[hi].diff == good_[lo].diff) ++hi;
      class_count.clear();
      std::size_t group_j = 0;

      for (std::size_t i = lo; i < hi; ++i) {
        const auto& gp = good_[i];
        auto d = symmetric_difference(g_, omega_.state(gp.x), omega_.state(gp.y));
        const std::size_t j = d.j();
        group_j = j;
        sx.resize(j);
        sy.resize(j);
        std::iota(sx.begin(), sx.end(), 0);
        std::uint64_t paths = 0;
        do {
          std::iota(sy.begin(), sy.end(), 0);
          do {
            auto moves = good_path_exchanges(d, sx, sy);
            if (!walk(gp.x, gp.y, moves, steps)) {
              ++s_.invalid_paths;
            } else {
              ++paths;
              s_.ell = std::max(s_.ell, steps.size());
              for (const auto& st : steps) {
                ++counts_[kG][st.tid * stride + j];
                ++class_count[st.tid];
              }
            }
          } while (std::next_permutation(sy.begin(), sy.end()));
        } while (std::next_permutation(sx.begin(), sx.end()));
        s_.path_count += paths;
        check_demand(gp.x, gp.y, paths, j);
      }

      const std::uint64_t bound = 2 * perms_squared(group_j);
      for (const auto& [tid, count] : class_count) {
        ++s_.eta_g_classes;
        Rational ratio(BigInt(count), BigInt(perms_squared(group_j)));
        if (ratio > s_.eta_g_max_class_ratio) s_.eta_g_max_class_ratio = ratio;
        if (count > bound) {
          s_.eta_g_class_bound = false;
          fail("η_g class at transition " + std::to_string(tid) + " holds " + std::to_string(count) + " > 2(j!)² paths");
        }
        check_eta_g_image(tid, good_[lo].diff);
      }
      lo = hi;
    }
  }

  void check_eta_g_image(std::uint32_t tid, const EdgeMask& diff) {
    const EdgeMask& z = omega_.state(s_.transitions[tid].first);
    const EdgeMask& zp = omega_.state(s_.transitions[tid].second);
    EdgeMask m = diff ^ (z | zp);
    if (m.count() + 1 != static_cast<int>(omega_.k()) || !is_matching(g_, m)) {
      note_eta_g("q⁻ ⊕ q⁺ ⊕ (z ∪ z') = " + to_string(to_matching(m)) + " is not a matching of size k - 1", tid);
      return;
    }
    const auto& p = augmenting_path_of(m);
    EdgeMask image = m;
    for (EdgeId e : path_edges(g_, p)) image.flip(e);
    if (!omega_.find(image)) note_eta_g("m ⊕ p is not in Ω", tid);
  }

  void note_eta_g(const std::string& what, std::uint32_t tid) {
    s_.eta_g_matching = false;
    ++s_.eta_g_matching_exceptions;
    if (s_.diagnostics.size() < 10)
      s_.diagnostics.push_back("η_g at " + to_string(omega_.matching(s_.transitions[tid].first)) + " -> " +
                               to_string(omega_.matching(s_.transitions[tid].second)) + ": " + what);
  }

  void run_bad_pairs() {
    const std::size_t stride = s_.max_j + 1;
    std::vector<std::size_t> sx, sy;
    std::vector<Walk> steps;
    struct AKey {
      std::uint32_t tid, y, path;
      bool operator==(const AKey&) const = default;
    };
    struct AKeyHash {
      std::size_t operator()(const AKey& k) const {
        return (std::size_t{k.tid} * 0x9e3779b97f4a7c15ULL) ^ (std::size_t{k.y} << 20) ^ k.path;
      }
    };
    std::unordered_map<AKey, std::uint32_t, AKeyHash> eta_a;  // class -> q⁻

    for (const auto& bp : bad_) {
      const Matching y = omega_.matching(bp.y);
      auto d = symmetric_difference(g_, bp.prefix.x_tilde, y);
      const std::size_t j = d.j();
      sx.resize(j);
      sy.resize(j);
      std::iota(sx.begin(), sx.end(), 0);
      std::uint64_t paths = 0;
      do {
        std::iota(sy.begin(), sy.end(), 0);
        do {
          auto moves = bp.prefix.exchanges;
          auto rest = good_path_exchanges(d, sx, sy);
          moves.insert(moves.end(), rest.begin(), rest.end());
          if (!walk(bp.x, bp.y, moves, steps)) {
            ++s_.invalid_paths;
          } else {
            ++paths;
            s_.ell = std::max(s_.ell, steps.size());
            for (const auto& st : steps) {
              ++counts_[st.prefix ? kA : kB][st.tid * stride + j];
              if (st.prefix) {
                auto [it, fresh] = eta_a.try_emplace(AKey{st.tid, bp.y, bp.path_id}, bp.x);
                if (fresh) ++s_.eta_a_classes;
                if (it->second != bp.x) {
                  s_.eta_a_endpoints = false;
                  fail("η_a class at transition " + std::to_string(st.tid) + " mixes start states");
                }
              }
            }
          }
        } while (std::next_permutation(sy.begin(), sy.end()));
      } while (std::next_permutation(sx.begin(), sx.end()));
      s_.path_count += paths;
      check_demand(bp.x, bp.y, paths, j);
    }
  }

  void finish() {
    const std::size_t T = omega_.transition_count();
    const std::size_t stride = s_.max_j + 1;
    const BigInt N = omega_.size();
    // Common denominator (J!)² |Ω|² with J = max j.
    const BigInt fj = factorial(static_cast<unsigned>(s_.max_j));
    const BigInt denom = fj * fj * N * N;
    std::vector<BigInt> scale(stride);
    for (std::size_t j = 0; j < stride; ++j) {
      BigInt f = factorial(static_cast<unsigned>(j));
      scale[j] = (fj * fj) / (f * f);
    }
    std::vector<Rational>* out[3] = {&s_.flow_g, &s_.flow_b, &s_.flow_a};
    BigInt best = -1;
    for (auto* v : out) v->assign(T, Rational(0));
    for (std::size_t t = 0; t < T; ++t) {
      BigInt total = 0;
      for (int grp = 0; grp < 3; ++grp) {
        BigInt acc = 0;
        for (std::size_t j = 0; j < stride; ++j)
          if (auto c = counts_[grp][t * stride + j]) acc += scale[j] * c;
        if (acc != 0) (*out[grp])[t] = Rational(acc, denom);
        total += acc;
      }
      if (total > best) {
        best = total;
        s_.worst_transition = t;
      }
    }
    // ρ = max_t f(t) · |Ω| · k · m, since π(x) P(x, y) = 1 / (|Ω| k m).
    if (T == 0 || best <= 0) {
      s_.rho = 0;
    } else {
      s_.rho = Rational(best, denom) * N * BigInt(s_.k) * BigInt(s_.m);
    }
  }

  struct GoodPair {
    EdgeMask diff;
    std::uint32_t x, y;
  };

  const StateSpace& omega_;
  const Graph& g_;
  Rational delta_;
  FlowOptions opt_;
  std::size_t cutoff_;
  FlowSummary s_;
  std::vector<GoodPair> good_;
  std::vector<BadPlan> bad_;
  std::vector<std::vector<std::uint64_t>> counts_;
  std::vector<std::uint32_t> visited_;
  std::unordered_map<EdgeMask, std::vector<Vertex>, EdgeMaskHash> aug_cache_;
  std::map<std::vector<Vertex>, std::uint32_t> path_ids_;
};

}  // namespace detail

/// Builds the canonical flow on Ω and accumulates exact per-transition loads.
/// Structural violations are collected in `failures` rather than thrown;
/// exceeding the path budget throws BudgetExceeded.
inline FlowSummary build_flow(const StateSpace& omega, const Rational& delta, const FlowOptions& opt = {}) {
  return detail::FlowBuilder(omega, delta, opt).run();
}

inline FlowSummary build_flow(const Graph& g, std::size_t k, const Rational& delta, const FlowOptions& opt = {}) {
  StateSpace omega(g, k, opt.state_budget);
  return build_flow(omega, delta, opt);
}

}  // namespace matchwalk
