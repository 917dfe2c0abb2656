#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "cecdpop/consistency.hpp"
#include "cecdpop/generators.hpp"
#include "cecdpop/io.hpp"
#include "cecdpop/oracle.hpp"
#include "cecdpop/verify.hpp"
#include "corpus.hpp"

using namespace cecdpop;

namespace {

std::vector<std::size_t> iota(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> v;
  for (auto k = lo; k <= hi; ++k) v.push_back(k);
  return v;
}

DcopInstance range_instance(std::size_t n, std::size_t d, std::vector<HardConstraint> hard) {
  std::vector<std::vector<Value>> dom(n);
  for (auto& x : dom) {
    for (std::size_t v = 0; v < d; ++v) x.push_back(static_cast<Value>(v));
  }
  return DcopInstance(std::move(dom), {}, std::move(hard));
}

struct Setup {
  PseudoTree tree;
  std::vector<std::vector<CrossEdge>> cross;
};

Setup bfs_setup(const DcopInstance& p) {
  const auto g = ConstraintGraph::of(p);
  Setup s{build_bfs_tree(g, choose_root(g)), {}};
  s.cross = cross_edge_sets(s.tree, LcaIndex(s.tree));
  return s;
}

bool entry_present(const NextList& n, VarId l, std::optional<VarId> child) {
  return std::find(n.entries.begin(), n.entries.end(), NextEntry{l, child}) != n.entries.end();
}

}  // namespace

TEST(ArcConsistency, LessThanTrimsBothEnds) {
  const auto p = range_instance(2, 5, {{0, 1, Relation::less_than()}});
  const auto r = enforce_arc_consistency(p);
  EXPECT_FALSE(r.wiped_out);
  EXPECT_EQ(r.domains[0], iota(0, 3));
  EXPECT_EQ(r.domains[1], iota(1, 4));
}

TEST(ArcConsistency, ChainPinsEveryValue) {
  const auto p = range_instance(3, 3, {{0, 1, Relation::less_than()}, {1, 2, Relation::less_than()}});
  const auto r = enforce_arc_consistency(p);
  EXPECT_EQ(r.domains, (DomainSets{{0}, {1}, {2}}));
}

TEST(ArcConsistency, EqualityPrunesNothing) {
  const auto p = range_instance(2, 4, {{0, 1, Relation::equal()}});
  const auto r = enforce_arc_consistency(p);
  EXPECT_EQ(r.domains, full_domains(p));
}

TEST(ArcConsistency, CycleWipesOut) {
  const auto r = enforce_arc_consistency(load_instance(corpus::fixture("infeasible.dcop")));
  EXPECT_TRUE(r.wiped_out);
}

TEST(ArcConsistency, WorkedExampleDomains) {
  const auto r = enforce_arc_consistency(load_instance(corpus::fixture("fig4.dcop")));
  EXPECT_EQ(r.domains[0], iota(2, 4));
  EXPECT_EQ(r.domains[1], iota(1, 3));
  EXPECT_EQ(r.domains[2], iota(2, 4));
  EXPECT_EQ(r.domains[3], iota(0, 4));
  EXPECT_EQ(r.domains[4], iota(0, 2));
  EXPECT_EQ(r.domains[5], iota(2, 4));
}

TEST(ArcConsistency, MatchesCentralizedAc3UnderAnyOrder) {
  for (const auto& e : corpus::full()) {
    const auto want = oracle::centralized_ac3(e.instance);
    for (std::uint64_t seed : {0, 1, 99}) {
      RunOptions o;
      o.order_seed = seed;
      const auto got = enforce_arc_consistency(e.instance, o);
      ASSERT_EQ(got.wiped_out, want.wiped_out) << e.name;
      if (!want.wiped_out) {
        EXPECT_EQ(got.domains, want.domains) << e.name << " seed " << seed;
      }
    }
  }
}

TEST(ArcConsistency, NoHardConstraintsShortCircuits) {
  RandomDcopConfig c;
  c.n = 6;
  c.hard_fraction = 0.0;
  const auto p = gen_random(c);
  const auto r = enforce_arc_consistency(p);
  EXPECT_EQ(r.domains, full_domains(p));
}

TEST(Paths, WorkedExampleNextLists) {
  const auto s = bfs_setup(load_instance(corpus::fixture("fig4.dcop")));
  ASSERT_EQ(s.tree.edges_of(EdgeClass::Cross), (std::vector<Edge>{{4, 5}}));
  const auto r = construct_paths(s.tree, s.cross);
  EXPECT_EQ(r.next[4].entries, (std::vector<NextEntry>{{0, std::nullopt}}));
  EXPECT_EQ(r.next[5].entries, (std::vector<NextEntry>{{0, std::nullopt}}));
  EXPECT_EQ(r.next[1].entries, (std::vector<NextEntry>{{0, 4}}));
  EXPECT_EQ(r.next[2].entries, (std::vector<NextEntry>{{0, 5}}));
  EXPECT_TRUE(entry_present(r.next[0], 0, 1));
  EXPECT_TRUE(entry_present(r.next[0], 0, 2));
  EXPECT_EQ(r.next[0].entries.size(), 2u);
  EXPECT_TRUE(r.next[3].entries.empty());
  EXPECT_TRUE(r.next[6].entries.empty());
  for (std::size_t x = 0; x < 7; ++x) EXPECT_EQ(r.next[x].cnt_next, s.tree.children(static_cast<VarId>(x)).size());
}

TEST(Paths, NoCrossEdges) {
  const DcopInstance p({{0, 1}, {0, 1}, {0, 1}, {0, 1}}, {},
                       {{0, 1, Relation::equal()}, {1, 2, Relation::equal()}, {1, 3, Relation::less_than()}});
  const auto s = bfs_setup(p);
  const auto r = construct_paths(s.tree, s.cross);
  for (const auto& n : r.next) EXPECT_TRUE(n.entries.empty());
  // One NULL update and one complete per non-root agent.
  EXPECT_EQ(r.metrics.messages, 6u);
}

TEST(Paths, RandomPathsReachBothEndpoints) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RandomDcopConfig c;
    c.n = 12;
    c.density = 0.35;
    c.seed = seed;
    const auto s = bfs_setup(gen_random(c));
    const auto r = construct_paths(s.tree, s.cross);
    const LcaIndex lca(s.tree);
    for (const auto& e : s.tree.edges_of(EdgeClass::Cross)) {
      const auto l = lca.lca(e.a, e.b);
      for (auto end : {e.a, e.b}) {
        EXPECT_TRUE(entry_present(r.next[static_cast<std::size_t>(end)], l, std::nullopt));
        // Every hop strictly below l on the way up points at the node below.
        for (auto x = end; x != l; x = s.tree.parent(x)) {
          const auto up = s.tree.parent(x);
          EXPECT_TRUE(entry_present(r.next[static_cast<std::size_t>(up)], l, x)) << "seed " << seed;
        }
      }
    }
    // And nothing else: every child entry lies on such a path.
    for (std::size_t x = 0; x < r.next.size(); ++x) {
      for (const auto& en : r.next[x].entries) {
        if (!en.child) continue;
        EXPECT_TRUE(s.tree.is_ancestor(en.lca, static_cast<VarId>(x)));
        EXPECT_EQ(s.tree.parent(*en.child), static_cast<VarId>(x));
      }
    }
  }
}

TEST(Cec, WorkedExampleReducedMatrix) {
  const auto p = load_instance(corpus::fixture("fig4.dcop"));
  const auto s = bfs_setup(p);
  const auto paths = construct_paths(s.tree, s.cross);
  // Without arc consistency first: 25 candidate pairs, 6 survive.
  const auto full = propagate_cec(p, s.tree, full_domains(p), paths.next, s.cross);
  const auto& m = full.reduced.at({4, 5});
  EXPECT_EQ(m.entries(), 25u);
  EXPECT_EQ(m.count(), 6u);
  for (std::size_t u = 0; u < 5; ++u) {
    for (std::size_t v = 0; v < 5; ++v) EXPECT_EQ(m.get(u, v), v >= u + 2) << u << "," << v;
  }
  // Root fans out to its three children, x1 and x2 pass down, x3 sends
  // NULL to x6, and x4 hands its matrix across.
  EXPECT_EQ(full.metrics.messages, 7u);

  const auto ac = enforce_arc_consistency(p);
  const auto after = propagate_cec(p, s.tree, ac.domains, paths.next, s.cross);
  EXPECT_EQ(after.reduced.at({4, 5}).entries(), 9u);
  EXPECT_EQ(after.reduced.at({4, 5}).count(), 6u);
}

TEST(Cec, SelfPathMatrixIsIdentity) {
  const auto p = load_instance(corpus::fixture("fig4.dcop"));
  const auto s = bfs_setup(p);
  const auto paths = construct_paths(s.tree, s.cross);
  const auto r = propagate_cec(p, s.tree, full_domains(p), paths.next, s.cross);
  EXPECT_EQ(r.path_matrices[0].at(0), ConsistencyMatrix::identity(5));
  // x1 < x0 composed with identity is the plain x1 - x0 matrix.
  EXPECT_EQ(r.path_matrices[1].at(0), pair_matrix(p, 1, 0, iota(0, 4), iota(0, 4)));
}

TEST(Cec, MatchesPathOracleOnCorpus) {
  std::size_t edges = 0;
  for (const auto& e : corpus::full()) {
    const auto res = check_cec_exactness(e.instance);
    EXPECT_NE(res.status, CheckStatus::Fail) << e.name << ": " << res.detail;
    if (res.status == CheckStatus::Pass) edges += std::stoul(res.detail);
  }
  EXPECT_GT(edges, 100u);
}

TEST(Cec, DirectConstraintIsIntersected) {
  // Unconstrained tree hops; the x1 - x2 cross edge carries x1 != x2.
  const std::vector<Utility> zeros(9, 0);
  const DcopInstance p({{0, 1, 2}, {0, 1, 2}, {0, 1, 2}}, {{0, 1, zeros}, {0, 2, zeros}},
                       {{1, 2, Relation::min_separation(0)}});
  const auto s = bfs_setup(p);
  ASSERT_EQ(s.tree.edges_of(EdgeClass::Cross), (std::vector<Edge>{{1, 2}}));
  const auto paths = construct_paths(s.tree, s.cross);
  const auto r = propagate_cec(p, s.tree, full_domains(p), paths.next, s.cross);
  EXPECT_EQ(r.reduced.at({1, 2}), (ConsistencyMatrix{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}));
}

TEST(Pruning, NothingToPrune) {
  const DomainSets d{{0, 1, 2}, {0, 1}};
  const auto r = apply_pruning(d, {});
  EXPECT_EQ(r.domains, d);
  EXPECT_FALSE(r.infeasible);
  const auto q = apply_pruning(d, {{{0, 1}, ConsistencyMatrix::ones(3, 2)}});
  EXPECT_EQ(q.domains, d);
}

TEST(Pruning, EmptyRowsAndColumnsShrinkDomains) {
  const DomainSets d{{0, 1, 2, 3}, {0, 1, 2, 3}};
  const ConsistencyMatrix m{{0, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}};
  const auto r = apply_pruning(d, {{{0, 1}, m}});
  EXPECT_EQ(r.domains, (DomainSets{{0, 2}, {1, 3}}));
  EXPECT_EQ(r.pair_masks.at({0, 1}), ConsistencyMatrix::identity(2));
}

TEST(Pruning, CascadesAcrossMasks) {
  // Removing x1=0 via the first mask empties a row of the second.
  const DomainSets d{{0, 1}, {0, 1}, {0, 1}};
  const ConsistencyMatrix a{{0, 1}, {0, 1}};
  const ConsistencyMatrix b{{1, 0}, {0, 1}};
  const auto r = apply_pruning(d, {{{0, 1}, a}, {{1, 2}, b}});
  EXPECT_EQ(r.domains, (DomainSets{{0, 1}, {1}, {1}}));
}

TEST(Pruning, EmptyMaskIsInfeasible) {
  const auto r = apply_pruning({{0, 1}, {0, 1}}, {{{0, 1}, ConsistencyMatrix::zeros(2, 2)}});
  EXPECT_TRUE(r.infeasible);
}

TEST(Pruning, WorkedExampleMasks) {
  const auto p = load_instance(corpus::fixture("fig4.dcop"));
  const auto run = run_cec(p);
  const auto r = apply_pruning(run.ac_domains, run.cec.reduced);
  EXPECT_FALSE(r.infeasible);
  EXPECT_EQ(r.domains, run.ac_domains);
  EXPECT_EQ(r.pair_masks.at({4, 5}).count(), 6u);
  const auto view = pruned_view(p, r);
  EXPECT_EQ(view.extent(4), 3u);
}

TEST(Pruning, SoundOnCorpus) {
  for (const auto& e : corpus::full()) {
    const auto res = check_pruning_soundness(e.instance);
    EXPECT_NE(res.status, CheckStatus::Fail) << e.name << ": " << res.detail;
  }
}
