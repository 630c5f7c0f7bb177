#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace matchwalk;

namespace {

std::size_t block_of(const GadgetGraph& gg, EdgeId e) {
  for (std::size_t b = 0; b < gg.p9_blocks.size(); ++b)
    if (gg.p9_blocks[b].contains(gg.graph.edge(e).u)) return b;
  return gg.p9_blocks.size();
}

}  // namespace

TEST(Gadget, FortyVertices) {
  auto gg = build_gadget(40, Rational(1, 10));
  EXPECT_EQ(gg.p9_blocks.size(), 2u);
  EXPECT_EQ(gg.c4_blocks.size(), 5u);
  EXPECT_EQ(gg.core.size(), 20u);
  EXPECT_EQ(gg.M.size(), 18u);
  EXPECT_EQ(matching_number(gg.graph), 20u);
  EXPECT_EQ(Rational(static_cast<long long>(gg.M.size())), Rational(9, 10) * 20);
  EXPECT_TRUE(is_matching(gg.graph, gg.M));
  EXPECT_EQ(gg.graph.m(), 2u * 9 + 5u * 4);
  for (const auto& b : gg.p9_blocks) {
    std::vector<Vertex> vs;
    for (Vertex v = b.begin; v < b.end; ++v) vs.push_back(v);
    auto sub = induced_subgraph(gg.graph, vs);
    EXPECT_EQ(sub.graph.m(), 9u);
    EXPECT_EQ(matching_number(sub.graph), 5u);
  }
}

TEST(Gadget, Preconditions) {
  EXPECT_THROW(build_gadget(40, Rational(1, 4)), PreconditionError);
  EXPECT_THROW(build_gadget(40, Rational(1, 5)), PreconditionError);
  try {
    build_gadget(41, Rational(1, 10));
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("nearest valid n is"), std::string::npos);
  }
}

TEST(Gadget, CycleAndCustomCores) {
  auto cyc = build_gadget(40, Rational(1, 10), CoreKind::kCycle);
  EXPECT_EQ(cyc.M.size(), 18u);
  EXPECT_EQ(matching_number(cyc.graph), 20u);
  auto custom = build_gadget(40, Rational(1, 10), generators::ladder(10));
  EXPECT_EQ(custom.M.size(), 18u);
  EXPECT_EQ(custom.core_kind, CoreKind::kCustom);
  EXPECT_EQ(matching_number(custom.graph), 20u);
}

TEST(Residual, Examples) {
  auto p9 = generators::path(10);
  auto same = residual_graph(p9, {});
  EXPECT_EQ(same.graph.edges(), p9.edges());
  auto split = residual_graph(p9, {p9.require_edge(4, 5)});
  EXPECT_EQ(split.graph.n(), 8u);
  EXPECT_EQ(connected_components(split.graph).size(), 2u);
  EXPECT_EQ(split.graph.m(), 6u);
  auto gg = build_gadget(40, Rational(1, 10));
  const Vertex v = gg.c4_blocks[0].begin;
  auto res = residual_graph(gg.graph, {gg.graph.require_edge(v, v + 1)});
  EXPECT_EQ(res.graph.m(), gg.graph.m() - 3);
  EXPECT_THROW(residual_graph(p9, {p9.require_edge(0, 1), p9.require_edge(1, 2)}), PreconditionError);
}

TEST(Pinning, SizesAndDeterminism) {
  auto gg = build_gadget(40, Rational(1, 10));
  EXPECT_EQ(random_pinning(gg, gg.M.size(), 3).tau, gg.M.edge_ids());
  EXPECT_TRUE(random_pinning(gg, 0, 3).tau.empty());
  EXPECT_EQ(random_pinning(gg, 7, 11).tau, random_pinning(gg, 7, 11).tau);
  EXPECT_NE(random_pinning(gg, 7, 11).tau, random_pinning(gg, 7, 12).tau);
  EXPECT_THROW(random_pinning(gg, 19, 0), PreconditionError);
  EXPECT_EQ(pin_size_for_lambda(gg, 0.5), 9u);
  EXPECT_EQ(pin_size_for_lambda(gg, 1.0), 0u);
}

TEST(Pinning, EveryEdgeEquallyLikely) {
  auto gg = build_gadget(40, Rational(1, 10));
  std::vector<std::size_t> hits(gg.graph.m(), 0);
  const std::size_t trials = 20000;
  for (std::size_t t = 0; t < trials; ++t)
    for (EdgeId e : random_pinning(gg, 6, t).tau) ++hits[e];
  const double p = 6.0 / 18;
  for (EdgeId e : gg.M)
    EXPECT_NEAR(static_cast<double>(hits[e]) / trials, p, 5 * std::sqrt(p * (1 - p) / trials));
}

TEST(Slack, Examples) {
  auto gg = build_gadget(40, Rational(1, 10));
  auto full = slack_statistics(gg, Pinning{gg.M.edge_ids(), 0.0});
  EXPECT_EQ(full.x_tau, 0u);
  EXPECT_EQ(full.m_star_residual, 0u);
  EXPECT_TRUE(full.degenerate);
  EXPECT_EQ(full.ratio, 0);

  // One M-edge in each P9 block.
  std::vector<EdgeId> hit_all;
  for (EdgeId e : gg.M)
    if (block_of(gg, e) < gg.p9_blocks.size() && (hit_all.empty() || block_of(gg, hit_all.back()) != block_of(gg, e)))
      hit_all.push_back(e);
  ASSERT_EQ(hit_all.size(), 2u);
  auto s = slack_statistics(gg, Pinning{hit_all, std::nullopt});
  EXPECT_EQ(s.x_tau, 0u);
  EXPECT_EQ(s.ratio, 0);

  // Only the first block pinned: the second is avoided.
  std::vector<EdgeId> one{hit_all[0]};
  auto a = slack_statistics(gg, Pinning{one, std::nullopt});
  EXPECT_EQ(a.x_tau, 1u);
  EXPECT_EQ(a.m_star_residual, gg.M.size() - 1 + 1);
  EXPECT_EQ(a.ratio, Rational(1, static_cast<long long>(gg.M.size() - one.size() + 1)));
}

TEST(Slack, IdentityOnRandomPinnings) {
  for (std::size_t n : {40u, 200u}) {
    auto gg = build_gadget(n, Rational(1, 10));
    for (std::size_t size = 0; size <= gg.M.size(); size += 3) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto s = slack_statistics(gg, random_pinning(gg, size, seed));
        EXPECT_EQ(s.m_star_residual, s.free_edges + s.x_tau);
      }
    }
  }
}

TEST(Slack, IdentityAgreesWithBruteForceOnSmallResiduals) {
  auto gg = build_gadget(40, Rational(1, 10));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto tau = random_pinning(gg, 14, seed);
    auto res = residual_graph(gg.graph, tau.tau);
    EXPECT_EQ(slack_statistics(gg, tau).m_star_residual, oracle::max_matching_size(res.graph));
  }
}

TEST(Avoidance, Examples) {
  auto gg = build_gadget(40, Rational(1, 10));
  EXPECT_EQ(expected_avoidance(gg, 0), 2);
  EXPECT_EQ(expected_avoidance(gg, gg.M.size()), 0);
  EXPECT_EQ(expected_avoidance(gg, 9), Rational(2 * 2002, 48620));
  EXPECT_EQ(expected_avoidance(gg, 9), Rational(7, 85));
}

TEST(Avoidance, MatchesExhaustiveCount) {
  // Count pin sets of size s missing a given block directly.
  auto gg = build_gadget(40, Rational(1, 10));
  for (std::size_t s = 0; s <= gg.M.size(); ++s) {
    Rational direct = Rational(BigInt(gg.p9_blocks.size()) * binomial(gg.M.size() - 4, s), binomial(gg.M.size(), s));
    if (s > gg.M.size() - 4) direct = 0;
    EXPECT_EQ(expected_avoidance(gg, s), direct);
  }
}

TEST(Avoidance, MonteCarloMean) {
  auto gg = build_gadget(200, Rational(1, 10));
  const std::size_t s = pin_size_for_lambda(gg, 0.4);
  const std::size_t trials = 4000;
  double sum = 0, sum2 = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const double x = static_cast<double>(slack_statistics(gg, random_pinning(gg, s, 5000 + t)).x_tau);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt((sum2 / trials - mean * mean) / trials);
  EXPECT_NEAR(mean, to_double(expected_avoidance(gg, s)), 4 * sd);
}

TEST(Wilson, Interval) {
  auto w = wilson_interval(50, 100);
  EXPECT_NEAR(w.lo, 0.4038, 1e-4);
  EXPECT_NEAR(w.hi, 0.5962, 1e-4);
  auto all = wilson_interval(10, 10);
  EXPECT_NEAR(all.hi, 1, 1e-12);
  EXPECT_GT(all.lo, 0.69);
}

TEST(Ergodicity, CertificateWitnessesAreSeparated) {
  auto gg = build_gadget(40, Rational(1, 10));
  auto rep = ergodicity_experiment(gg, 14, 200, 77);
  EXPECT_EQ(rep.trials.size(), 200u);
  EXPECT_EQ(rep.disagreements, 0u);
  EXPECT_EQ(rep.exact_checked, 200u);
  for (const auto& tr : rep.trials) {
    ASSERT_TRUE(tr.exact_checked);
    EXPECT_EQ(tr.certificate, !tr.exact_ergodic);
  }
  EXPECT_GT(rep.fired, 0u);
  EXPECT_LE(rep.interval.lo, rep.frequency);
  EXPECT_GE(rep.interval.hi, rep.frequency);
}

TEST(Ergodicity, MissingBlockMeansNoCertificate) {
  auto gg = build_gadget(40, Rational(1, 10));
  auto rep = ergodicity_experiment(gg, 0, 3, 1);
  for (const auto& tr : rep.trials) {
    EXPECT_FALSE(tr.hits_every_p9);
    EXPECT_FALSE(tr.certificate);
  }
}

TEST(Ergodicity, Reproducible) {
  auto gg = build_gadget(40, Rational(1, 10));
  auto a = ergodicity_experiment(gg, 12, 30, 5);
  auto b = ergodicity_experiment(gg, 12, 30, 5);
  EXPECT_EQ(a.fired, b.fired);
  for (std::size_t i = 0; i < a.trials.size(); ++i) EXPECT_EQ(a.trials[i].seed, b.trials[i].seed);
}
