#include <gtest/gtest.h>

#include <vector>

#include "cecdpop/generators.hpp"
#include "cecdpop/io.hpp"
#include "cecdpop/oracle.hpp"
#include "cecdpop/propagation.hpp"
#include "cecdpop/solver.hpp"
#include "corpus.hpp"

using namespace cecdpop;

namespace {

struct Run {
  PseudoTree tree;
  EliminationPlan plan;
  ProblemView view;
};

Run plain_run(const DcopInstance& p, bool bfs) {
  const auto g = ConstraintGraph::of(p);
  auto tree = bfs ? build_bfs_tree(g, choose_root(g)) : build_dfs_tree(g, choose_root(g));
  auto plan = plan_elimination(tree, g);
  return {std::move(tree), std::move(plan), identity_view(p)};
}

}  // namespace

TEST(Propagation, SingleSoftEdge) {
  const DcopInstance p({{0, 1}, {0, 1}}, {{0, 1, {12, 3, 7, 3}}}, {});
  for (auto algo : kAllAlgorithms) {
    const auto r = solve(p, algo);
    EXPECT_TRUE(r.feasible);
    EXPECT_EQ(r.utility, 12);
    EXPECT_EQ(r.assignment, (Assignment{0, 0}));
  }
}

TEST(Propagation, UtilAndValueOnWorkedExample) {
  const auto p = load_instance(corpus::fixture("fig1.dcop"));
  const auto run = plain_run(p, true);
  const PropagationSetup s{&run.tree, &run.view, &run.plan};
  const auto util = util_phase(s);
  const auto truth = oracle::brute_force_solve(p);
  ASSERT_TRUE(truth.optimum);
  EXPECT_EQ(util.optimum, *truth.optimum);
  // One UTIL per non-root node.
  EXPECT_EQ(util.metrics.messages, 6u);
  const auto value = value_phase(s, util);
  EXPECT_FALSE(value.infeasible);
  EXPECT_EQ(value.metrics.messages, 6u);
  const auto a = to_assignment(p, run.view, value.positions);
  EXPECT_EQ(evaluate(p, a), Evaluation{util.optimum});
}

TEST(Propagation, UtilDimsAreSeparators) {
  for (const auto& e : corpus::random_instances(60)) {
    const auto g = ConstraintGraph::of(e.instance);
    if (!g.connected()) continue;
    const auto run = plain_run(e.instance, false);
    const PropagationSetup s{&run.tree, &run.view, &run.plan};
    Transcript t;
    RunOptions o;
    o.transcript = &t;
    const auto util = util_phase(s, o);
    std::size_t entries = 0;
    for (std::size_t x = 0; x < run.tree.size(); ++x) {
      const auto v = static_cast<VarId>(x);
      if (v == run.tree.root()) continue;
      EXPECT_EQ(util.caches[x].table.dims(), run.plan.separator[x]) << e.name;
      EXPECT_EQ(run.plan.separator[x], separator(run.tree, e.instance, v));
      std::size_t vol = 1;
      for (auto y : run.plan.separator[x]) vol *= e.instance.domain(y).size();
      entries += vol;
    }
    EXPECT_EQ(util.metrics.entries, entries) << e.name;
    EXPECT_EQ(t.lines.size(), run.tree.size() - 1);
  }
}

TEST(Propagation, AllAlgorithmsMatchOracle) {
  std::size_t feasible = 0;
  for (const auto& e : corpus::full()) {
    const auto truth = oracle::brute_force_solve(e.instance);
    for (auto algo : kAllAlgorithms) {
      const auto r = solve(e.instance, algo);
      ASSERT_EQ(r.feasible, truth.optimum.has_value()) << e.name << ' ' << to_string(algo);
      if (!r.feasible) continue;
      EXPECT_EQ(r.utility, *truth.optimum) << e.name << ' ' << to_string(algo);
      EXPECT_EQ(evaluate(e.instance, r.assignment), Evaluation{r.utility}) << e.name << ' ' << to_string(algo);
    }
    feasible += truth.optimum.has_value();
  }
  EXPECT_GT(feasible, 100u);
}

TEST(Propagation, SingleVariable) {
  const DcopInstance p({{3, 4, 5}}, {}, {});
  for (auto algo : kAllAlgorithms) {
    const auto r = solve(p, algo);
    EXPECT_TRUE(r.feasible);
    EXPECT_EQ(r.utility, 0);
    ASSERT_EQ(r.assignment.size(), 1u);
    EXPECT_EQ(r.metrics.total().messages, 0u);
  }
}

TEST(Propagation, InfeasibleFixture) {
  const auto p = load_instance(corpus::fixture("infeasible.dcop"));
  for (auto algo : kAllAlgorithms) {
    const auto r = solve(p, algo);
    EXPECT_FALSE(r.feasible) << to_string(algo);
    EXPECT_TRUE(r.assignment.empty());
  }
  // Without consistency phases the root learns it from UTIL alone.
  const auto dpop = solve(p, Algorithm::Dpop);
  ASSERT_NE(dpop.metrics.find("util"), nullptr);
  EXPECT_EQ(dpop.metrics.find("value"), nullptr);
  // Arc consistency stops the pipeline before UTIL.
  const auto ac = solve(p, Algorithm::AcDpop);
  EXPECT_EQ(ac.metrics.find("util"), nullptr);
  EXPECT_EQ(ac.surviving_values, 0u);
}

TEST(Propagation, DisconnectedInstanceSolvedPerComponent) {
  const DcopInstance p({{0, 1}, {0, 1}, {0, 1}, {0, 1}}, {{0, 1, {1, 2, 3, 4}}, {2, 3, {5, 0, 0, 1}}},
                       {{2, 3, Relation::equal()}});
  for (auto algo : kAllAlgorithms) {
    const auto r = solve(p, algo);
    EXPECT_TRUE(r.feasible);
    EXPECT_EQ(r.utility, 9);
    EXPECT_EQ(r.assignment, (Assignment{1, 1, 0, 0}));
  }
}

TEST(Propagation, WithoutHardConstraintsCecEqualsBfs) {
  RandomDcopConfig c;
  c.n = 8;
  c.d = 3;
  c.hard_fraction = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    c.seed = seed;
    const auto p = gen_random(c);
    const auto bfs = solve(p, Algorithm::BfsDpop);
    const auto cec = solve(p, Algorithm::CecDpop);
    EXPECT_EQ(bfs.metrics, cec.metrics);
    EXPECT_EQ(bfs.utility, cec.utility);
    EXPECT_EQ(cec.metrics.find("ac"), nullptr);
  }
}

TEST(Propagation, ShapeModeCountsMatchRealRuns) {
  for (const auto& e : corpus::random_instances(80)) {
    for (auto algo : kAllAlgorithms) {
      SolveOptions o;
      const auto real = solve(e.instance, algo, o);
      o.shapes_only = true;
      const auto shape = solve(e.instance, algo, o);
      const auto* ru = real.metrics.find("util");
      const auto* su = shape.metrics.find("util");
      ASSERT_EQ(ru == nullptr, su == nullptr) << e.name;
      if (!ru) continue;
      EXPECT_FALSE(shape.solved);
      EXPECT_EQ(ru->messages, su->messages) << e.name;
      EXPECT_EQ(ru->entries, su->entries) << e.name;
      EXPECT_EQ(ru->max_entries, su->max_entries) << e.name;
      EXPECT_EQ(shape.metrics.find("value"), nullptr);
    }
  }
}

TEST(Propagation, BudgetIsEnforced) {
  RandomDcopConfig c;
  c.n = 10;
  c.d = 5;
  c.density = 0.9;
  c.hard_fraction = 0.0;
  SolveOptions o;
  o.table_budget = 1000;
  EXPECT_THROW(solve(gen_random(c), Algorithm::Dpop, o), BudgetExceeded);
}

TEST(Propagation, PruningToggleKeepsOptimum) {
  for (const auto& e : corpus::random_instances(40)) {
    SolveOptions o;
    o.prune_domains = false;
    const auto a = solve(e.instance, Algorithm::CecDpop, o);
    const auto b = solve(e.instance, Algorithm::CecDpop);
    EXPECT_EQ(a.feasible, b.feasible);
    if (a.feasible) {
      EXPECT_EQ(a.utility, b.utility) << e.name;
    }
    EXPECT_GE(a.surviving_values, b.surviving_values);
  }
}

TEST(Propagation, AlgorithmNames) {
  for (auto algo : kAllAlgorithms) EXPECT_EQ(parse_algorithm(to_string(algo)), algo);
  EXPECT_THROW(parse_algorithm("adopt"), InvalidConfig);
}
