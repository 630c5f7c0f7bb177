#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace matchwalk;

TEST(TransitionMatrix, MatchesProposalCountsOnPathOfFour) {
  auto g = generators::path(4);
  auto t = build_transition_matrix(g, 1);
  ASSERT_EQ(t.size(), 3u);
  Rational row_sum;
  for (std::size_t x = 0; x < 3; ++x) {
    row_sum = 0;
    for (std::size_t y = 0; y < 3; ++y) {
      EXPECT_EQ(t.entry(x, y), oracle::transition(g, t.space().matching(x), t.space().matching(y)));
      row_sum += t.entry(x, y);
    }
    EXPECT_EQ(row_sum, 1);
  }
  // States in order {01}, {12}, {23}. Swapping one edge for another is always
  // legal when k = 1, so {01} -> {12} has probability 1/3 even though the
  // edges share vertex 1.
  EXPECT_EQ(t.entry(0, 2), Rational(1, 3));
  EXPECT_EQ(t.entry(0, 1), Rational(1, 3));
  EXPECT_EQ(t.stay(0), Rational(1, 3));
}

TEST(TransitionMatrix, EvenCycleIsIdentity) {
  auto t = build_transition_matrix(generators::cycle(4), 2);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.entry(0, 0), 1);
  EXPECT_EQ(t.entry(0, 1), 0);
  EXPECT_TRUE(t.dense().isIdentity());
}

TEST(TransitionMatrix, DisjointEdgesAreUniform) {
  auto t = build_transition_matrix(generators::disjoint_edges(4), 1);
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y) EXPECT_EQ(t.entry(x, y), Rational(1, 4));
}

TEST(TransitionMatrix, SymmetricStochasticAgainstOracle) {
  for (std::uint64_t s = 0; s < 6; ++s) {
    auto g = generators::random_gnp(7, 0.45, 500 + s);
    for (std::size_t k = 1; k <= 3; ++k) {
      if (oracle::matchings(g, k).empty()) continue;
      auto t = build_transition_matrix(g, k);
      auto p = t.dense();
      EXPECT_LT((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-15);
      EXPECT_LT((p.rowwise().sum().array() - 1).abs().maxCoeff(), 1e-12);
      for (std::size_t x = 0; x < t.size(); x += 2)
        for (std::size_t y = 0; y < t.size(); ++y)
          EXPECT_EQ(t.entry(x, y), oracle::transition(g, t.space().matching(x), t.space().matching(y)));
    }
  }
}

TEST(Dirichlet, Examples) {
  auto t = build_transition_matrix(generators::disjoint_edges(2), 1);
  std::vector<double> f{1, 0};
  EXPECT_DOUBLE_EQ(dirichlet_form(t, f, f), 0.25);
  std::vector<double> c{3, 3};
  EXPECT_DOUBLE_EQ(dirichlet_form(t, c, c), 0);
  auto id = build_transition_matrix(generators::cycle(4), 2);
  std::vector<double> a{1, -2}, b{5, 7};
  EXPECT_DOUBLE_EQ(dirichlet_form(id, a, b), 0);
}

TEST(SpectralGap, Examples) {
  EXPECT_NEAR(spectral_gap(build_transition_matrix(generators::disjoint_edges(5), 1)).alpha, 1, 1e-12);
  EXPECT_NEAR(spectral_gap(build_transition_matrix(generators::cycle(4), 2)).alpha, 0, 1e-12);
  auto single = spectral_gap(build_transition_matrix(generators::path(2), 1));
  EXPECT_TRUE(single.single_state);
  EXPECT_EQ(single.alpha, 1);
}

TEST(SpectralGap, IsTheVariationalMinimum) {
  // alpha = min E(f,f)/Var(f) over non-constant f: random f never beat it and
  // the reported eigenvector attains it.
  for (const auto& g : {generators::path(4), generators::cycle(6), generators::ladder(3)}) {
    auto t = build_transition_matrix(g, g.n() == 4 ? 1 : 2);
    auto gap = spectral_gap(t);
    EXPECT_LT(gap.residual, 1e-9);
    CounterRng rng(17);
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<double> f(t.size());
      for (auto& v : f) v = static_cast<double>(rng.below(2001)) / 1000.0 - 1.0;
      const double var = variance_uniform(f);
      if (var < 1e-9) continue;
      EXPECT_GE(dirichlet_form(t, f, f) / var, gap.alpha - 1e-9);
    }
    std::vector<double> v(gap.second_eigenvector.data(), gap.second_eigenvector.data() + t.size());
    EXPECT_NEAR(dirichlet_form(t, v, v) / variance_uniform(v), gap.alpha, 1e-9);
  }
}

TEST(Ergodicity, Examples) {
  auto c4 = check_ergodicity(build_transition_matrix(generators::cycle(4), 2));
  EXPECT_FALSE(c4.ergodic);
  EXPECT_EQ(c4.components, (std::vector<std::vector<std::uint32_t>>{{0}, {1}}));
  EXPECT_TRUE(check_ergodicity(build_transition_matrix(generators::path(4), 1)).ergodic);
  EXPECT_TRUE(check_ergodicity(build_transition_matrix(generators::path(2), 1)).ergodic);
}

TEST(TotalVariation, Examples) {
  std::vector<double> a{1, 0}, b{0, 1}, u{0.5, 0.5};
  EXPECT_EQ(tv_distance(a, a), 0);
  EXPECT_EQ(tv_distance(a, b), 1);
  EXPECT_EQ(tv_distance(a, u), 0.5);
  std::vector<double> three{1, 0, 0};
  EXPECT_THROW(tv_distance(a, three), PreconditionError);
}

TEST(MixingTime, Examples) {
  EXPECT_EQ(mixing_time(build_transition_matrix(generators::path(2), 1), 0.25), 0u);
  EXPECT_EQ(mixing_time(build_transition_matrix(generators::disjoint_edges(4), 1), 0.25), 1u);
  EXPECT_THROW(mixing_time(build_transition_matrix(generators::path(3), 1), 0), PreconditionError);
}

TEST(MixingTime, NonErgodicCarriesCertificate) {
  try {
    mixing_time(build_transition_matrix(generators::cycle(4), 2), 0.25);
    FAIL();
  } catch (const NonErgodicError& e) {
    EXPECT_EQ(e.certificate().components.size(), 2u);
  }
}

TEST(MixingTime, AgreesWithNaivePowering) {
  std::vector<std::pair<Graph, std::size_t>> cases{{generators::cycle(6), 2}, {generators::path(5), 1},
                                                   {generators::path(6), 2}, {generators::ladder(3), 2},
                                                   {generators::complete(5), 2}};
  for (const auto& [g, k] : cases) {
    auto t = build_transition_matrix(g, k);
    for (double eps : {0.25, 0.1, 0.01}) EXPECT_EQ(mixing_time(t, eps), oracle::mixing_time(t.dense(), eps));
  }
}

TEST(MixingTime, CycleSixRespectsSpectralBound) {
  auto t = build_transition_matrix(generators::cycle(6), 2);
  const auto tmix = mixing_time(t, 0.25);
  const double alpha = spectral_gap(t).alpha;
  EXPECT_LE(static_cast<double>(tmix), std::log(9.0 / 0.25) / alpha);
}
