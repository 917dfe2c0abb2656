#include <gtest/gtest.h>

#include <set>

#include "cecdpop/generators.hpp"
#include "cecdpop/pseudotree.hpp"

using namespace cecdpop;

TEST(Generators, EdgeCountAndConnectivity) {
  RandomDcopConfig c;
  c.n = 20;
  c.d = 10;
  c.density = 0.5;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    c.seed = seed;
    const auto p = gen_random(c);
    const auto g = ConstraintGraph::of(p);
    EXPECT_EQ(g.edges().size(), 95u);
    EXPECT_TRUE(g.connected());
    for (const auto& d : p.domains()) EXPECT_EQ(d.size(), 10u);
  }
}

TEST(Generators, FullDensityIsComplete) {
  RandomDcopConfig c;
  c.n = 4;
  c.density = 1.0;
  const auto g = ConstraintGraph::of(gen_random(c));
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
}

TEST(Generators, SameSeedSameInstance) {
  RandomDcopConfig c;
  c.n = 9;
  c.seed = 42;
  EXPECT_EQ(gen_random(c), gen_random(c));
  auto other = c;
  other.seed = 43;
  EXPECT_NE(gen_random(c), gen_random(other));
  RlfaConfig f;
  f.seed = 42;
  EXPECT_EQ(gen_rlfa(f), gen_rlfa(f));
}

TEST(Generators, HardFractionAndRelations) {
  for (double hf : {0.0, 0.3, 0.5, 1.0}) {
    RandomDcopConfig c;
    c.n = 10;
    c.density = 0.6;
    c.hard_fraction = hf;
    c.seed = 5;
    const auto p = gen_random(c);
    const std::size_t m = 27;
    EXPECT_EQ(p.hard_constraints().size(), static_cast<std::size_t>(std::llround(hf * m)));
    EXPECT_EQ(p.hard_constraints().size() + p.soft_constraints().size(), m);
    std::set<Edge> hard;
    for (const auto& h : p.hard_constraints()) {
      hard.insert(Edge::of(h.first, h.second));
      const auto k = h.relation.kind;
      EXPECT_TRUE(k == RelationKind::LessThan || k == RelationKind::GreaterThan || k == RelationKind::Equal);
    }
    for (const auto& s : p.soft_constraints()) {
      EXPECT_FALSE(hard.contains(Edge::of(s.first, s.second)));
      for (auto u : s.utilities) {
        EXPECT_GE(u, c.utility_lo);
        EXPECT_LE(u, c.utility_hi);
      }
    }
  }
}

TEST(Generators, RelationMixIsRoughlyUniform) {
  std::size_t counts[3] = {0, 0, 0};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomDcopConfig c;
    c.n = 12;
    c.hard_fraction = 1.0;
    c.seed = seed;
    const auto p = gen_random(c);
    for (const auto& h : p.hard_constraints()) ++counts[static_cast<int>(h.relation.kind)];
  }
  const auto total = counts[0] + counts[1] + counts[2];
  for (auto k : counts) {
    EXPECT_GT(k * 4, total);
    EXPECT_LT(k * 2, total);
  }
}

TEST(Generators, RlfaShape) {
  RlfaConfig c;
  c.n = 5;
  c.freqs = 6;
  c.separations = {1, 3};
  c.density = 0.5;
  const auto p = gen_rlfa(c);
  EXPECT_EQ(p.hard_constraints().size(), 5u);
  EXPECT_EQ(p.soft_constraints().size(), 5u);
  for (const auto& h : p.hard_constraints()) {
    EXPECT_EQ(h.relation.kind, RelationKind::MinSeparation);
    EXPECT_TRUE(h.relation.separation == 1 || h.relation.separation == 3);
  }
  const auto& t = p.soft_constraints()[0].utilities;
  EXPECT_EQ(t.front(), 10);
  EXPECT_EQ(t.back(), 0);
  EXPECT_TRUE(ConstraintGraph::of(p).connected());
}

TEST(Generators, SingleFrequencyIsInfeasible) {
  RlfaConfig c;
  c.n = 4;
  c.freqs = 1;
  c.separations = {0};
  const auto p = gen_rlfa(c);
  for (const auto& h : p.hard_constraints()) EXPECT_FALSE(p.matrix(h).get(0, 0));
}

TEST(Generators, InvalidConfigs) {
  RandomDcopConfig c;
  c.n = 10;
  c.density = 0.1;
  EXPECT_THROW(gen_random(c), InvalidConfig);
  c.density = 1.5;
  EXPECT_THROW(gen_random(c), InvalidConfig);
  c.density = 0.5;
  c.d = 0;
  EXPECT_THROW(gen_random(c), InvalidConfig);
  c.d = 3;
  c.hard_fraction = -0.1;
  EXPECT_THROW(gen_random(c), InvalidConfig);
  c.hard_fraction = 0.5;
  c.utility_lo = 5;
  c.utility_hi = 4;
  EXPECT_THROW(gen_random(c), InvalidConfig);
  c.n = 0;
  EXPECT_THROW(gen_random(c), InvalidConfig);
  RlfaConfig f;
  f.separations = {};
  EXPECT_THROW(gen_rlfa(f), InvalidConfig);
  f.separations = {-1};
  EXPECT_THROW(gen_rlfa(f), InvalidConfig);
  f.separations = {1};
  f.freqs = 0;
  EXPECT_THROW(gen_rlfa(f), InvalidConfig);
}
