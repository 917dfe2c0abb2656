#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "cecdpop/util_table.hpp"

using namespace cecdpop;

namespace {

UtilTable random_table(std::mt19937_64& rng, std::vector<VarId> dims, std::vector<std::size_t> extents) {
  UtilTable t(std::move(dims), std::move(extents));
  for (auto& v : t.values()) v = (rng() % 7 == 0) ? kInfeasible : static_cast<Utility>(rng() % 50);
  return t;
}

}  // namespace

TEST(UtilTable, LayoutIsRowMajor) {
  const UtilTable t({1, 4}, {2, 3}, std::vector<Utility>{0, 1, 2, 3, 4, 5});
  EXPECT_EQ(t.strides(), (std::vector<std::size_t>{3, 1}));
  const std::size_t idx[] = {1, 2};
  EXPECT_EQ(t.at(idx), 5);
  EXPECT_EQ(t.axis(4), 1);
  EXPECT_EQ(t.axis(2), -1);
  EXPECT_THROW(UtilTable({2, 1}, {2, 2}), DimensionMismatch);
  EXPECT_THROW(UtilTable({1}, {2}, std::vector<Utility>{1}), DimensionMismatch);
}

TEST(UtilTable, JoinWithScalarIdentity) {
  std::mt19937_64 rng(3);
  const auto t = random_table(rng, {0, 2}, {3, 4});
  EXPECT_EQ(join(t, UtilTable()), t);
  EXPECT_EQ(join(UtilTable(), t), t);
}

TEST(UtilTable, OneDimensionalJoinSums) {
  const UtilTable a({0}, {3}, std::vector<Utility>{1, 2, 3});
  const UtilTable b({0}, {3}, std::vector<Utility>{10, kInfeasible, 30});
  EXPECT_EQ(join(a, b).values(), (std::vector<Utility>{11, kInfeasible, 33}));
  const UtilTable c({1}, {2}, std::vector<Utility>{100, 200});
  EXPECT_EQ(join(a, c).values(), (std::vector<Utility>{101, 201, 102, 202, 103, 203}));
}

TEST(UtilTable, SoftTableGatedByHardConstraint) {
  // x5 x6 utilities [[12, 3], [7, 3]] joined with a x5 < x6 gate.
  const UtilTable soft({4, 5}, {2, 2}, std::vector<Utility>{12, 3, 7, 3});
  const UtilTable gate({4, 5}, {2, 2}, std::vector<Utility>{kInfeasible, 0, kInfeasible, kInfeasible});
  EXPECT_EQ(join(soft, gate).values(), (std::vector<Utility>{kInfeasible, 3, kInfeasible, kInfeasible}));
}

TEST(UtilTable, ProjectToScalar) {
  const UtilTable t({7}, {4}, std::vector<Utility>{5, kInfeasible, 9, 2});
  const auto p = project(t, 7);
  EXPECT_TRUE(p.table.dims().empty());
  EXPECT_EQ(p.table.values(), (std::vector<Utility>{9}));
  EXPECT_EQ(p.argmax, (std::vector<std::int64_t>{2}));
  EXPECT_THROW(project(t, 3), UnknownVariable);
}

TEST(UtilTable, ProjectOutOneOfTwo) {
  const UtilTable t({4, 5}, {2, 2}, std::vector<Utility>{12, 3, 7, 3});
  const auto p = project(t, 5);
  EXPECT_EQ(p.table.dims(), (std::vector<VarId>{4}));
  EXPECT_EQ(p.table.values(), (std::vector<Utility>{12, 7}));
  EXPECT_EQ(p.argmax, (std::vector<std::int64_t>{0, 0}));
}

TEST(UtilTable, AllInfeasibleProjectsToInfeasible) {
  const UtilTable t({0, 1}, {2, 2}, std::vector<Utility>{kInfeasible, kInfeasible, 4, kInfeasible});
  const auto p = project(t, 1);
  EXPECT_EQ(p.table.values(), (std::vector<Utility>{kInfeasible, 4}));
  EXPECT_EQ(p.argmax, (std::vector<std::int64_t>{-1, 0}));
}

TEST(UtilTable, JoinProjectAgainstExhaustiveScan) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 25; ++k) {
    const std::vector<VarId> dims{0, 1, 2, 3};
    std::vector<std::size_t> ext(4);
    for (auto& e : ext) e = 1 + rng() % 4;
    const auto a = random_table(rng, {0, 2}, {ext[0], ext[2]});
    const auto b = random_table(rng, {1, 2, 3}, {ext[1], ext[2], ext[3]});
    const auto c = random_table(rng, {3}, {ext[3]});
    const UtilTable* in[] = {&a, &b, &c};
    const auto p = join_project(in, dims, ext, {1, 3}, 1 << 20);
    ASSERT_EQ(p.table.dims(), (std::vector<VarId>{0, 2}));
    for (std::size_t i0 = 0; i0 < ext[0]; ++i0) {
      for (std::size_t i2 = 0; i2 < ext[2]; ++i2) {
        Utility best = kInfeasible;
        for (std::size_t i1 = 0; i1 < ext[1]; ++i1) {
          for (std::size_t i3 = 0; i3 < ext[3]; ++i3) {
            const std::size_t ia[] = {i0, i2};
            const std::size_t ib[] = {i1, i2, i3};
            const std::size_t ic[] = {i3};
            const auto s = add_utility(add_utility(a.at(ia), b.at(ib)), c.at(ic));
            best = std::max(best, s);
          }
        }
        const std::size_t io[] = {i0, i2};
        EXPECT_EQ(p.table.at(io), best);
        const auto arg = p.argmax[p.table.offset(io)];
        if (best == kInfeasible) {
          EXPECT_EQ(arg, -1);
        } else {
          const auto i1 = static_cast<std::size_t>(arg) / ext[3];
          const auto i3 = static_cast<std::size_t>(arg) % ext[3];
          const std::size_t ia[] = {i0, i2};
          const std::size_t ib[] = {i1, i2, i3};
          const std::size_t ic[] = {i3};
          EXPECT_EQ(add_utility(add_utility(a.at(ia), b.at(ib)), c.at(ic)), best);
        }
      }
    }
  }
}

TEST(UtilTable, BudgetAndShapeChecks) {
  const UtilTable a({0}, {10});
  const UtilTable* in[] = {&a};
  EXPECT_THROW(join_project(in, {0, 1}, {10, 10}, {}, 99), BudgetExceeded);
  EXPECT_NO_THROW(join_project(in, {0, 1}, {10, 10}, {}, 100));
  EXPECT_THROW(join_project(in, {1}, {10}, {}, 100), DimensionMismatch);
  EXPECT_THROW(join_project(in, {0}, {9}, {}, 100), DimensionMismatch);
  EXPECT_THROW(join(a, UtilTable({0}, {3})), DimensionMismatch);
}
