#pragma once

#include <string>
#include <vector>

#include "matchwalk/blossom.hpp"
#include "matchwalk/gadget.hpp"
#include "matchwalk/generators.hpp"
#include "matchwalk/rational.hpp"

namespace matchwalk {

struct CorpusGraph {
  std::string name;
  Graph graph;
};

/// Small graphs used for exact checks: paths on 3..8 vertices, cycles C4..C8,
/// K4, K5, twenty G(n, 1/2) with n in 5..8, and optionally the n = 40 gadget.
inline std::vector<CorpusGraph> builtin_corpus(bool include_gadget = true) {
  std::vector<CorpusGraph> out;
  for (std::size_t v = 3; v <= 8; ++v) out.push_back({"path" + std::to_string(v), generators::path(v)});
  for (std::size_t v = 4; v <= 8; ++v) out.push_back({"cycle" + std::to_string(v), generators::cycle(v)});
  out.push_back({"complete4", generators::complete(4)});
  out.push_back({"complete5", generators::complete(5)});
  for (std::uint64_t i = 0; i < 20; ++i) {
    const std::size_t n = 5 + i % 4;
    out.push_back({"gnp" + std::to_string(n) + "-s" + std::to_string(1000 + i), generators::random_gnp(n, 0.5, 1000 + i)});
  }
  if (include_gadget) out.push_back({"gadget40", build_gadget(40, Rational(1, 10)).graph});
  return out;
}

inline std::vector<Rational> builtin_deltas() { return {Rational(1, 2), Rational(1, 3), Rational(1, 4)}; }

/// Sizes 1..⌊(1 − δ) m*(G)⌋.
inline std::vector<std::size_t> admissible_sizes(std::size_t matching_number, const Rational& delta) {
  std::vector<std::size_t> ks;
  const auto top = floor_nonnegative((1 - delta) * BigInt(matching_number));
  for (std::int64_t k = 1; k <= top; ++k) ks.push_back(static_cast<std::size_t>(k));
  return ks;
}

inline std::vector<std::size_t> admissible_sizes(const Graph& g, const Rational& delta) {
  return admissible_sizes(matching_number(g), delta);
}

}  // namespace matchwalk
